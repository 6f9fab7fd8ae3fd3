#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "pnu/classifier.hpp"
#include "pnu/featurizer.hpp"
#include "pnu/loss.hpp"
#include "pnu/metrics.hpp"
#include "pnu/pools.hpp"

namespace pnu {

// Fixed evaluation split: ids with their gold labels.
struct EvalSet {
    std::vector<std::string> ids;
    std::vector<int> golds;

    static EvalSet from_split(const Dataset& dataset, Split split) {
        EvalSet e;
        for (const auto& s : dataset.samples) {
            if (s.split != split) continue;
            e.ids.push_back(s.id);
            e.golds.push_back(*s.gold_label);
        }
        return e;
    }
};

inline std::vector<int> predict_labels(const ClassifierParams& params,
                                       const FeatureStore& store,
                                       const std::vector<std::string>& ids) {
    std::vector<int> out;
    out.reserve(ids.size());
    for (const auto& id : ids) out.push_back(hard_label(predict_proba(params, store.get(id))));
    return out;
}

struct SplitMetrics {
    double accuracy = 0.0;
    double macro_f1 = 0.0;
};

inline SplitMetrics evaluate(const ClassifierParams& params, const FeatureStore& store,
                             const EvalSet& eval_set) {
    auto preds = predict_labels(params, store, eval_set.ids);
    return {accuracy(preds, eval_set.golds), macro_f1(preds, eval_set.golds)};
}

struct TrainResult {
    ClassifierParams params;            // snapshot from the best epoch
    std::vector<double> loss_history;   // total loss after each epoch's step
    std::vector<double> dev_f1_history; // dev macro-F1 after each epoch's step
    int best_epoch = 0;                 // 1-based; 0 means no epochs ran
};

// Full-batch gradient descent on the PNU objective. Returns the parameter
// snapshot from the epoch with the best dev macro-F1 (ties go to the
// earlier epoch). epochs = 0 returns the initial params unchanged.
inline TrainResult train(const ClassifierParams& params_init, const PoolState& pools,
                         const FeatureStore& store, const LossConfig& loss_cfg,
                         int epochs, double learning_rate, const EvalSet& dev_set) {
    loss_cfg.validate();
    if (pools.labeled_count() == 0)
        throw std::runtime_error("cannot train with empty labeled pools");

    TrainResult result;
    result.params = params_init;
    if (epochs == 0) return result;

    ClassifierParams current = params_init;
    ClassifierParams best = params_init;
    double best_f1 = -1.0;

    for (int epoch = 1; epoch <= epochs; ++epoch) {
        Gradient g = pnu_gradient(current, pools, store, loss_cfg);
        for (std::size_t j = 0; j < current.weights.size(); ++j)
            current.weights[j] -= learning_rate * g.w[j];
        current.bias -= learning_rate * g.b;

        double loss = pnu_loss(current, pools, store, loss_cfg).total;
        if (!std::isfinite(loss))
            throw std::runtime_error("non-finite loss at epoch " + std::to_string(epoch) +
                                     "; learning rate likely too large");
        result.loss_history.push_back(loss);

        double dev_f1 = evaluate(current, store, dev_set).macro_f1;
        result.dev_f1_history.push_back(dev_f1);
        if (dev_f1 > best_f1) {
            best_f1 = dev_f1;
            best = current;
            result.best_epoch = epoch;
        }
    }

    best.version = params_init.version + 1;
    result.params = best;
    return result;
}

}  // namespace pnu
