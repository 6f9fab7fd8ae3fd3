#pragma once

#include <fstream>
#include <vector>

#include "pnu/adjudicator.hpp"
#include "pnu/metrics.hpp"
#include "pnu/sample.hpp"

namespace pnu {

// Macro-F1 of one round's agreed pseudo-labels against gold. Undefined
// (defined = false) when nothing was agreed or golds are missing.
inline QualityPoint round_quality(int round,
                                  const std::vector<AdjudicationTranscript>& transcripts,
                                  const Dataset& dataset) {
    QualityPoint q;
    q.round = round;
    std::vector<int> preds, golds;
    for (const auto& t : transcripts) {
        int pseudo;
        if (t.outcome == Outcome::AgreedPositive)
            pseudo = 1;
        else if (t.outcome == Outcome::AgreedNegative)
            pseudo = 0;
        else
            continue;
        if (!dataset.has(t.sample_id)) return q;  // golds unavailable: skip round
        const auto& gold = dataset.by_id(t.sample_id).gold_label;
        if (!gold) return q;
        preds.push_back(pseudo);
        golds.push_back(*gold);
    }
    q.count = preds.size();
    if (!preds.empty()) {
        q.macro_f1 = macro_f1(preds, golds);
        q.defined = true;
    }
    return q;
}

// Plot-ready table: round, count, macro_f1 ("-" when undefined).
inline void write_quality_table(const std::string& path,
                                const std::vector<QualityPoint>& series) {
    std::ofstream out(path);
    out << "round\tcount\tmacro_f1\n";
    for (const auto& q : series) {
        out << q.round << "\t" << q.count << "\t";
        if (q.defined)
            out << q.macro_f1;
        else
            out << "-";
        out << "\n";
    }
}

}  // namespace pnu
