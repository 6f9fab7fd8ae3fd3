#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace pnu {

inline constexpr double kProbClamp = 1e-7;  // keeps cross-entropy finite

// Linear logistic model. version increments on every accepted retrain.
struct ClassifierParams {
    std::vector<double> weights;
    double bias = 0.0;
    std::int64_t version = 0;

    static ClassifierParams zeros(std::size_t dim) {
        ClassifierParams p;
        p.weights.assign(dim, 0.0);
        return p;
    }
};

inline double logit(const ClassifierParams& params, const std::vector<double>& x) {
    if (params.weights.size() != x.size())
        throw std::runtime_error("feature dimension mismatch");
    double z = params.bias;
    for (std::size_t i = 0; i < x.size(); ++i) z += params.weights[i] * x[i];
    return z;
}

inline double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    double e = std::exp(z);
    return e / (1.0 + e);
}

inline double clamp_proba(double p) {
    if (p < kProbClamp) return kProbClamp;
    if (p > 1.0 - kProbClamp) return 1.0 - kProbClamp;
    return p;
}

// p = logistic(w.x + b), clamped to [eps, 1-eps].
inline double predict_proba(const ClassifierParams& params, const std::vector<double>& x) {
    return clamp_proba(sigmoid(logit(params, x)));
}

// max(p, 1-p); the ranking key for top-k selection.
inline double confidence(double p) { return p >= 0.5 ? p : 1.0 - p; }

inline int hard_label(double p) { return p >= 0.5 ? 1 : 0; }

}  // namespace pnu
