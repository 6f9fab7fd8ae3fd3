#pragma once

#include <array>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace pnu {

struct ConfusionMatrix {
    // counts[gold][pred]
    std::array<std::array<std::size_t, 2>, 2> counts{{{0, 0}, {0, 0}}};

    static ConfusionMatrix from(const std::vector<int>& predictions,
                                const std::vector<int>& golds) {
        if (predictions.size() != golds.size())
            throw std::runtime_error("predictions/golds length mismatch");
        if (predictions.empty()) throw std::runtime_error("empty prediction list");
        ConfusionMatrix m;
        for (std::size_t i = 0; i < predictions.size(); ++i) {
            if ((predictions[i] | 1) != 1 || (golds[i] | 1) != 1)
                throw std::runtime_error("labels must be 0 or 1");
            ++m.counts[golds[i]][predictions[i]];
        }
        return m;
    }

    std::size_t total() const {
        return counts[0][0] + counts[0][1] + counts[1][0] + counts[1][1];
    }

    // F1 for class c; 0 when the class is degenerate (absent from both sides).
    double f1(int c) const {
        std::size_t tp = counts[c][c];
        std::size_t fp = counts[1 - c][c];
        std::size_t fn = counts[c][1 - c];
        if (2 * tp + fp + fn == 0) return 0.0;
        return 2.0 * static_cast<double>(tp) / static_cast<double>(2 * tp + fp + fn);
    }

    // True when class c appears in neither golds nor predictions.
    bool class_degenerate(int c) const {
        return counts[c][0] + counts[c][1] == 0 && counts[0][c] + counts[1][c] == 0;
    }
};

inline double accuracy(const std::vector<int>& predictions, const std::vector<int>& golds) {
    auto m = ConfusionMatrix::from(predictions, golds);
    return static_cast<double>(m.counts[0][0] + m.counts[1][1]) /
           static_cast<double>(m.total());
}

// Unweighted mean of per-class F1 over both classes.
inline double macro_f1(const std::vector<int>& predictions, const std::vector<int>& golds) {
    auto m = ConfusionMatrix::from(predictions, golds);
    return 0.5 * (m.f1(0) + m.f1(1));
}

// Per-round pseudo-label quality point; absent when no labels were agreed.
struct QualityPoint {
    int round = 0;
    std::size_t count = 0;
    double macro_f1 = 0.0;
    bool defined = false;
};

// Least-squares slope over the defined points of a quality series.
inline double quality_trend_slope(const std::vector<QualityPoint>& series) {
    double n = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& q : series) {
        if (!q.defined) continue;
        double x = q.round, y = q.macro_f1;
        ++n;
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    if (n < 2) return 0.0;
    double denom = n * sxx - sx * sx;
    if (denom == 0.0) return 0.0;
    return (n * sxy - sx * sy) / denom;
}

}  // namespace pnu
