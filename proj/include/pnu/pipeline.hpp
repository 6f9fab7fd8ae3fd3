#pragma once

#include <algorithm>
#include <chrono>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "pnu/adjudicator.hpp"
#include "pnu/config.hpp"
#include "pnu/persist.hpp"
#include "pnu/pools.hpp"
#include "pnu/quality.hpp"
#include "pnu/trainer.hpp"

namespace pnu {

struct Candidate {
    std::string id;
    double proba = 0.0;
    double conf = 0.0;
    int pseudo_label = 0;
};

// Ranks the unlabeled pool by confidence descending, ties broken by id
// ascending; returns min(k, pool size) candidates with hard pseudo-labels.
inline std::vector<Candidate> select_top_k(const ClassifierParams& params,
                                           const FeatureStore& store,
                                           const std::set<std::string>& unlabeled,
                                           std::size_t k) {
    if (unlabeled.empty()) throw std::runtime_error("unlabeled pool is empty");
    std::vector<Candidate> all;
    all.reserve(unlabeled.size());
    for (const auto& id : unlabeled) {
        double p = predict_proba(params, store.get(id));
        all.push_back({id, p, confidence(p), hard_label(p)});
    }
    std::sort(all.begin(), all.end(), [](const Candidate& a, const Candidate& b) {
        if (a.conf != b.conf) return a.conf > b.conf;
        return a.id < b.id;
    });
    if (all.size() > k) all.resize(k);
    return all;
}

struct RoundReport {
    int round_number = 0;
    std::size_t k_selected = 0;
    std::size_t moved_agreed_positive = 0;
    std::size_t moved_agreed_negative = 0;
    std::size_t moved_disagreed = 0;
    double dev_accuracy_before = 0.0;
    double dev_macro_f1_before = 0.0;
    double dev_accuracy_after = 0.0;
    double dev_macro_f1_after = 0.0;
    bool accepted = false;
    LossBreakdown final_loss;
    double duration_sec = 0.0;  // recorded separately, not in the report file
};

inline nlohmann::json round_report_to_json(const RoundReport& r) {
    return {{"round_number", r.round_number},
            {"k_selected", r.k_selected},
            {"moved",
             {{"agreed_positive", r.moved_agreed_positive},
              {"agreed_negative", r.moved_agreed_negative},
              {"disagreed", r.moved_disagreed}}},
            {"dev_before", {{"accuracy", r.dev_accuracy_before}, {"macro_f1", r.dev_macro_f1_before}}},
            {"dev_after", {{"accuracy", r.dev_accuracy_after}, {"macro_f1", r.dev_macro_f1_after}}},
            {"accepted", r.accepted},
            {"loss",
             {{"total", r.final_loss.total},
              {"pn", r.final_loss.pn},
              {"soft_pn", r.final_loss.soft_pn},
              {"pu", r.final_loss.pu},
              {"nu", r.final_loss.nu},
              {"pu_clamp_active", r.final_loss.pu_clamp_active},
              {"nu_clamp_active", r.final_loss.nu_clamp_active}}}};
}

struct SelfTrainState {
    PoolState pools;
    ClassifierParams params;       // current accepted params
    ClassifierParams best_params;  // best dev snapshot across the whole run
    double best_dev_f1 = -1.0;
    int rounds_completed = 0;
};

struct RunResult {
    ClassifierParams final_params;  // best dev snapshot
    std::vector<RoundReport> reports;
    std::vector<QualityPoint> quality;
    SplitMetrics dev_metrics;
    SplitMetrics test_metrics;
};

namespace detail {

inline LossConfig supervised_loss(const LossConfig& base) {
    LossConfig cfg = base;
    cfg.gamma = 0.0;  // no unknown pools exist yet; plain PN training
    return cfg;
}

}  // namespace detail

// Step 1 of the pipeline and the SupOnly baseline: train on the n labeled
// samples only, from zero-initialized params.
inline TrainResult initial_training(const SelfTrainState& state, const FeatureStore& store,
                                    const RunConfig& cfg, const EvalSet& dev_set) {
    return train(ClassifierParams::zeros(store.dim()), state.pools, store,
                 detail::supervised_loss(cfg.loss), cfg.epochs, cfg.learning_rate, dev_set);
}

// Steps 2-5: select, adjudicate, transition, retrain, validation check.
// A rejected round restores params bitwise and moves the round's samples
// to Discarded; they are never reselected.
inline RoundReport run_round(SelfTrainState& state, const Dataset& dataset,
                             const FeatureStore& store, const RunConfig& cfg,
                             Transport& transport, const EvalSet& dev_set,
                             std::vector<AdjudicationTranscript>* transcripts_out = nullptr) {
    auto started = std::chrono::steady_clock::now();
    RoundReport report;
    report.round_number = state.rounds_completed + 1;
    state.pools.round_number = report.round_number;

    auto candidates =
        select_top_k(state.params, store, state.pools.pool(LabelState::Unlabeled), cfg.k);
    report.k_selected = candidates.size();

    std::vector<AdjudicationItem> items;
    items.reserve(candidates.size());
    for (const auto& c : candidates)
        items.push_back({&dataset.by_id(c.id), c.pseudo_label});
    auto transcripts =
        adjudicate_batch(items, cfg.adjudicator_config(), transport, cfg.agents.parallelism);

    const ClassifierParams pre_round_params = state.params;
    SplitMetrics before = evaluate(state.params, store, dev_set);
    report.dev_accuracy_before = before.accuracy;
    report.dev_macro_f1_before = before.macro_f1;

    std::vector<std::string> moved;
    moved.reserve(transcripts.size());
    for (const auto& t : transcripts) {
        LabelState to;
        switch (t.outcome) {
            case Outcome::AgreedPositive:
                to = LabelState::AgreedUnknownPositive;
                ++report.moved_agreed_positive;
                break;
            case Outcome::AgreedNegative:
                to = LabelState::AgreedUnknownNegative;
                ++report.moved_agreed_negative;
                break;
            case Outcome::Disagreed:
                to = LabelState::DisagreedUnknown;
                ++report.moved_disagreed;
                break;
        }
        transition(state.pools, t.sample_id, to);
        moved.push_back(t.sample_id);
    }

    ClassifierParams init =
        cfg.warm_start ? state.params : ClassifierParams::zeros(store.dim());
    init.version = state.params.version;
    TrainResult trained =
        train(init, state.pools, store, cfg.loss, cfg.epochs, cfg.learning_rate, dev_set);
    report.final_loss = pnu_loss(trained.params, state.pools, store, cfg.loss);

    SplitMetrics after = evaluate(trained.params, store, dev_set);
    report.dev_accuracy_after = after.accuracy;
    report.dev_macro_f1_after = after.macro_f1;

    report.accepted = cfg.accept_ties ? after.macro_f1 >= state.best_dev_f1
                                      : after.macro_f1 > state.best_dev_f1;
    if (report.accepted) {
        state.params = trained.params;
        if (after.macro_f1 >= state.best_dev_f1) {
            state.best_dev_f1 = after.macro_f1;
            state.best_params = state.params;
        }
    } else {
        state.params = pre_round_params;  // bitwise revert
        for (const auto& id : moved) transition(state.pools, id, LabelState::Discarded);
    }

    state.rounds_completed = report.round_number;
    report.duration_sec =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    if (transcripts_out) *transcripts_out = std::move(transcripts);
    return report;
}

inline void assert_partition(const SelfTrainState& state, const std::set<std::string>& universe) {
    if (!state.pools.partitions(universe))
        throw std::logic_error("pool invariant violated: sets no longer partition the train ids");
}

// The full loop: initial supervised training, then rounds until the
// unlabeled pool is exhausted. Returns the best-dev snapshot.
inline RunResult run_self_training(const Dataset& dataset, const RunConfig& cfg,
                                   Transport& transport,
                                   std::optional<fs::path> run_dir = std::nullopt) {
    FeatureStore store(dataset, cfg.featurizer);
    EvalSet dev_set = EvalSet::from_split(dataset, Split::Dev);
    EvalSet test_set = EvalSet::from_split(dataset, Split::Test);

    std::set<std::string> universe;
    for (const auto& id : dataset.ids_of_split(Split::Train)) universe.insert(id);

    SelfTrainState state;
    RunResult result;
    std::string cfg_hash = run_config_hash(cfg);

    bool resumed = false;
    if (run_dir) {
        ensure_run_dir(*run_dir);
        if (fs::exists(*run_dir / "pool_snapshot.json")) {
            state.pools = load_pool_snapshot(*run_dir);
            state.params = load_checkpoint(*run_dir / "checkpoint.json");
            state.best_params = load_checkpoint(*run_dir / "best_checkpoint.json");
            state.rounds_completed = state.pools.round_number;
            state.best_dev_f1 = evaluate(state.best_params, store, dev_set).macro_f1;
            resumed = true;
        } else {
            std::ofstream cfg_out(*run_dir / "config.json");
            cfg_out << run_config_to_json(cfg).dump(2) << "\n";
        }
    }

    if (!resumed) {
        state.pools = init_pools(dataset, cfg.n_labeled, cfg.seed);
        assert_partition(state, universe);

        auto started = std::chrono::steady_clock::now();
        TrainResult initial = initial_training(state, store, cfg, dev_set);
        state.params = initial.params;
        state.best_params = initial.params;
        SplitMetrics dev0 = evaluate(state.params, store, dev_set);
        state.best_dev_f1 = dev0.macro_f1;

        RoundReport r0;
        r0.round_number = 0;
        r0.accepted = true;
        r0.dev_accuracy_before = r0.dev_accuracy_after = dev0.accuracy;
        r0.dev_macro_f1_before = r0.dev_macro_f1_after = dev0.macro_f1;
        r0.final_loss = pnu_loss(state.params, state.pools, store,
                                 detail::supervised_loss(cfg.loss));
        r0.duration_sec =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
        result.reports.push_back(r0);
        if (run_dir) {
            write_round_report(*run_dir, 0, round_report_to_json(r0));
            save_pool_snapshot(*run_dir, state.pools);
            save_checkpoint(*run_dir / "checkpoint.json", state.params, cfg_hash);
            save_checkpoint(*run_dir / "best_checkpoint.json", state.best_params, cfg_hash);
            append_timing(*run_dir, 0, r0.duration_sec);
        }
    }

    while (!state.pools.pool(LabelState::Unlabeled).empty()) {
        std::vector<AdjudicationTranscript> transcripts;
        RoundReport report =
            run_round(state, dataset, store, cfg, transport, dev_set, &transcripts);
        assert_partition(state, universe);
        result.reports.push_back(report);
        result.quality.push_back(round_quality(report.round_number, transcripts, dataset));
        if (run_dir) {
            write_round_report(*run_dir, report.round_number, round_report_to_json(report));
            write_transcripts(*run_dir, report.round_number, transcripts);
            save_pool_snapshot(*run_dir, state.pools);
            save_checkpoint(*run_dir / "checkpoint.json", state.params, cfg_hash);
            save_checkpoint(*run_dir / "best_checkpoint.json", state.best_params, cfg_hash);
            append_timing(*run_dir, report.round_number, report.duration_sec);
        }
    }

    result.final_params = state.best_params;
    result.dev_metrics = evaluate(result.final_params, store, dev_set);
    if (!test_set.ids.empty())
        result.test_metrics = evaluate(result.final_params, store, test_set);
    if (run_dir) write_quality_table((*run_dir / "quality.tsv").string(), result.quality);
    return result;
}

// SupOnly baseline: the same code path with no self-training rounds.
inline RunResult run_supervised_only(const Dataset& dataset, const RunConfig& cfg) {
    FeatureStore store(dataset, cfg.featurizer);
    EvalSet dev_set = EvalSet::from_split(dataset, Split::Dev);
    EvalSet test_set = EvalSet::from_split(dataset, Split::Test);

    SelfTrainState state;
    state.pools = init_pools(dataset, cfg.n_labeled, cfg.seed);
    TrainResult initial = initial_training(state, store, cfg, dev_set);

    RunResult result;
    result.final_params = initial.params;
    result.dev_metrics = evaluate(initial.params, store, dev_set);
    if (!test_set.ids.empty())
        result.test_metrics = evaluate(initial.params, store, test_set);
    return result;
}

}  // namespace pnu
