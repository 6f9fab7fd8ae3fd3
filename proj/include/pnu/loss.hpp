#pragma once

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "pnu/classifier.hpp"
#include "pnu/featurizer.hpp"
#include "pnu/pools.hpp"

namespace pnu {

struct LossConfig {
    double gamma = 0.1;   // in [-1, 1]; 0 reduces to PN learning
    double pi_p = 0.5;    // class prior of the positive class
    double y_p = 1.0;     // hard targets
    double y_n = 0.0;
    double y_hat_p = 0.67;  // soft targets for agreed-unknown samples
    double y_hat_n = 0.33;

    double pi_n() const { return 1.0 - pi_p; }

    void validate() const {
        if (gamma < -1.0 || gamma > 1.0)
            throw std::runtime_error("gamma must lie in [-1, 1]");
        if (pi_p <= 0.0 || pi_p >= 1.0)
            throw std::runtime_error("pi_p must lie in (0, 1)");
        if (!(0.0 < y_hat_n && y_hat_n < y_hat_p && y_hat_p < 1.0))
            throw std::runtime_error("soft targets must satisfy 0 < y_hat_n < y_hat_p < 1");
    }
};

struct LossBreakdown {
    double total = 0.0;
    double pn = 0.0;
    double soft_pn = 0.0;
    double pu = 0.0;
    double nu = 0.0;
    bool pu_clamp_active = false;
    bool nu_clamp_active = false;
};

struct Gradient {
    std::vector<double> w;
    double b = 0.0;
};

// Cross-entropy against a (possibly soft) target in [0, 1].
inline double point_loss(double p, double y) {
    return -(y * std::log(p) + (1.0 - y) * std::log(1.0 - p));
}

namespace detail {

// Per-pool predictions computed once and reused across targets.
struct PoolProbs {
    std::vector<double> p;      // clamped probabilities
    std::vector<double> p_raw;  // unclamped, for gradient gating
    std::vector<const std::vector<double>*> x;

    bool empty() const { return p.empty(); }
    std::size_t size() const { return p.size(); }
};

inline PoolProbs eval_pool(const ClassifierParams& params,
                           const std::set<std::string>& ids,
                           const FeatureStore& store) {
    PoolProbs out;
    out.p.reserve(ids.size());
    out.p_raw.reserve(ids.size());
    out.x.reserve(ids.size());
    for (const auto& id : ids) {
        const auto& feat = store.get(id);
        double pr = sigmoid(logit(params, feat));
        out.p_raw.push_back(pr);
        out.p.push_back(clamp_proba(pr));
        out.x.push_back(&feat);
    }
    return out;
}

inline double mean_loss(const PoolProbs& pool, double y) {
    if (pool.empty()) return 0.0;  // round-0 convention: empty pool contributes 0
    double sum = 0.0;
    for (double p : pool.p) sum += point_loss(p, y);
    return sum / static_cast<double>(pool.size());
}

// Adds coeff * grad(mean cross-entropy) to (gw, gb). Where the probability
// is clamped the point contributes zero gradient.
inline void add_mean_grad(const PoolProbs& pool, double y, double coeff,
                          std::vector<double>& gw, double& gb) {
    if (pool.empty() || coeff == 0.0) return;
    double scale = coeff / static_cast<double>(pool.size());
    for (std::size_t i = 0; i < pool.size(); ++i) {
        double pr = pool.p_raw[i];
        if (pr <= kProbClamp || pr >= 1.0 - kProbClamp) continue;
        double g = scale * (pr - y);
        const auto& feat = *pool.x[i];
        for (std::size_t j = 0; j < feat.size(); ++j) gw[j] += g * feat[j];
        gb += g;
    }
}

struct PoolSet {
    PoolProbs lp, ln, aup, aun, du;
};

inline PoolSet eval_all(const ClassifierParams& params, const PoolState& pools,
                        const FeatureStore& store) {
    PoolSet s;
    s.lp = eval_pool(params, pools.pool(LabelState::LabeledPositive), store);
    s.ln = eval_pool(params, pools.pool(LabelState::LabeledNegative), store);
    s.aup = eval_pool(params, pools.pool(LabelState::AgreedUnknownPositive), store);
    s.aun = eval_pool(params, pools.pool(LabelState::AgreedUnknownNegative), store);
    s.du = eval_pool(params, pools.pool(LabelState::DisagreedUnknown), store);
    return s;
}

inline LossBreakdown breakdown(const PoolSet& s, const LossConfig& cfg) {
    LossBreakdown b;
    const double pi_p = cfg.pi_p, pi_n = cfg.pi_n();

    b.pn = pi_p * mean_loss(s.lp, cfg.y_p) + pi_n * mean_loss(s.ln, cfg.y_n);
    b.soft_pn = pi_p * mean_loss(s.aup, cfg.y_hat_p) + pi_n * mean_loss(s.aun, cfg.y_hat_n);

    // PU: labeled positives + agreed positives as positive data, disagreed as
    // unlabeled; the negative-risk estimate is clamped at zero.
    double pu_pos = pi_p * (mean_loss(s.lp, cfg.y_p) + mean_loss(s.aup, cfg.y_hat_p));
    double pu_corr = mean_loss(s.du, cfg.y_n) -
                     pi_p * (mean_loss(s.lp, cfg.y_n) + mean_loss(s.aup, cfg.y_hat_n));
    b.pu_clamp_active = pu_corr < 0.0;
    b.pu = pu_pos + std::max(0.0, pu_corr);

    // NU: exact label mirror of the PU estimator.
    double nu_neg = pi_n * (mean_loss(s.ln, cfg.y_n) + mean_loss(s.aun, cfg.y_hat_n));
    double nu_corr = mean_loss(s.du, cfg.y_p) -
                     pi_n * (mean_loss(s.ln, cfg.y_p) + mean_loss(s.aun, cfg.y_hat_p));
    b.nu_clamp_active = nu_corr < 0.0;
    b.nu = nu_neg + std::max(0.0, nu_corr);

    if (cfg.gamma >= 0.0)
        b.total = (1.0 - cfg.gamma) * (b.pn + b.soft_pn) + cfg.gamma * b.pu;
    else
        b.total = (1.0 + cfg.gamma) * (b.pn + b.soft_pn) - cfg.gamma * b.nu;
    return b;
}

}  // namespace detail

inline double mean_pool_loss(const ClassifierParams& params,
                             const std::set<std::string>& ids,
                             const FeatureStore& store, double target) {
    return detail::mean_loss(detail::eval_pool(params, ids, store), target);
}

inline LossBreakdown pnu_loss(const ClassifierParams& params, const PoolState& pools,
                              const FeatureStore& store, const LossConfig& cfg) {
    cfg.validate();
    return detail::breakdown(detail::eval_all(params, pools, store), cfg);
}

inline double pn_loss(const ClassifierParams& params, const PoolState& pools,
                      const FeatureStore& store, const LossConfig& cfg) {
    return pnu_loss(params, pools, store, cfg).pn;
}

inline double soft_pn_loss(const ClassifierParams& params, const PoolState& pools,
                           const FeatureStore& store, const LossConfig& cfg) {
    return pnu_loss(params, pools, store, cfg).soft_pn;
}

inline double nn_pu_loss(const ClassifierParams& params, const PoolState& pools,
                         const FeatureStore& store, const LossConfig& cfg,
                         bool* clamp_active = nullptr) {
    LossBreakdown b = pnu_loss(params, pools, store, cfg);
    if (clamp_active) *clamp_active = b.pu_clamp_active;
    return b.pu;
}

inline double nn_nu_loss(const ClassifierParams& params, const PoolState& pools,
                         const FeatureStore& store, const LossConfig& cfg,
                         bool* clamp_active = nullptr) {
    LossBreakdown b = pnu_loss(params, pools, store, cfg);
    if (clamp_active) *clamp_active = b.nu_clamp_active;
    return b.nu;
}

// Exact gradient of the pnu_loss total. A clamped max(0, .) branch
// contributes zero gradient.
inline Gradient pnu_gradient(const ClassifierParams& params, const PoolState& pools,
                             const FeatureStore& store, const LossConfig& cfg) {
    cfg.validate();
    auto s = detail::eval_all(params, pools, store);
    LossBreakdown b = detail::breakdown(s, cfg);

    Gradient g;
    g.w.assign(params.weights.size(), 0.0);
    const double pi_p = cfg.pi_p, pi_n = cfg.pi_n();
    const double g_abs = std::abs(cfg.gamma);
    const double w_pn = 1.0 - g_abs;

    // (1 - |gamma|) * (pn + soft_pn), shared by both branches
    detail::add_mean_grad(s.lp, cfg.y_p, w_pn * pi_p, g.w, g.b);
    detail::add_mean_grad(s.ln, cfg.y_n, w_pn * pi_n, g.w, g.b);
    detail::add_mean_grad(s.aup, cfg.y_hat_p, w_pn * pi_p, g.w, g.b);
    detail::add_mean_grad(s.aun, cfg.y_hat_n, w_pn * pi_n, g.w, g.b);

    if (cfg.gamma > 0.0) {
        detail::add_mean_grad(s.lp, cfg.y_p, cfg.gamma * pi_p, g.w, g.b);
        detail::add_mean_grad(s.aup, cfg.y_hat_p, cfg.gamma * pi_p, g.w, g.b);
        if (!b.pu_clamp_active) {
            detail::add_mean_grad(s.du, cfg.y_n, cfg.gamma, g.w, g.b);
            detail::add_mean_grad(s.lp, cfg.y_n, -cfg.gamma * pi_p, g.w, g.b);
            detail::add_mean_grad(s.aup, cfg.y_hat_n, -cfg.gamma * pi_p, g.w, g.b);
        }
    } else if (cfg.gamma < 0.0) {
        detail::add_mean_grad(s.ln, cfg.y_n, g_abs * pi_n, g.w, g.b);
        detail::add_mean_grad(s.aun, cfg.y_hat_n, g_abs * pi_n, g.w, g.b);
        if (!b.nu_clamp_active) {
            detail::add_mean_grad(s.du, cfg.y_p, g_abs, g.w, g.b);
            detail::add_mean_grad(s.ln, cfg.y_p, -g_abs * pi_n, g.w, g.b);
            detail::add_mean_grad(s.aun, cfg.y_hat_p, -g_abs * pi_n, g.w, g.b);
        }
    }
    return g;
}

}  // namespace pnu
