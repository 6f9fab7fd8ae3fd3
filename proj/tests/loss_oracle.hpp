#pragma once

// Independent direct-summation reference for the loss family. Deliberately
// shares no code with pnu/loss.hpp beyond the config struct.

#include <cmath>
#include <vector>

#include "pnu/classifier.hpp"
#include "pnu/loss.hpp"

namespace pnu_test {

struct OracleInstance {
    std::vector<std::vector<double>> lp, ln, aup, aun, du;
};

inline double oracle_prob(const pnu::ClassifierParams& params, const std::vector<double>& x) {
    double z = params.bias;
    for (std::size_t i = 0; i < x.size(); ++i) z += params.weights[i] * x[i];
    double p = 1.0 / (1.0 + std::exp(-z));
    if (p < 1e-7) p = 1e-7;
    if (p > 1.0 - 1e-7) p = 1.0 - 1e-7;
    return p;
}

inline double oracle_mean(const pnu::ClassifierParams& params,
                          const std::vector<std::vector<double>>& pool, double y) {
    if (pool.empty()) return 0.0;
    double sum = 0.0;
    for (const auto& x : pool) {
        double p = oracle_prob(params, x);
        sum += -(y * std::log(p) + (1.0 - y) * std::log(1.0 - p));
    }
    return sum / static_cast<double>(pool.size());
}

struct OracleBreakdown {
    double pn, soft_pn, pu, nu, total;
    bool pu_clamp, nu_clamp;
};

inline OracleBreakdown oracle_pnu(const pnu::ClassifierParams& params,
                                  const OracleInstance& inst, const pnu::LossConfig& cfg) {
    OracleBreakdown b{};
    double pi_p = cfg.pi_p, pi_n = 1.0 - cfg.pi_p;
    b.pn = pi_p * oracle_mean(params, inst.lp, cfg.y_p) +
           pi_n * oracle_mean(params, inst.ln, cfg.y_n);
    b.soft_pn = pi_p * oracle_mean(params, inst.aup, cfg.y_hat_p) +
                pi_n * oracle_mean(params, inst.aun, cfg.y_hat_n);

    double pu_corr = oracle_mean(params, inst.du, cfg.y_n) -
                     pi_p * (oracle_mean(params, inst.lp, cfg.y_n) +
                             oracle_mean(params, inst.aup, cfg.y_hat_n));
    b.pu_clamp = pu_corr < 0.0;
    b.pu = pi_p * (oracle_mean(params, inst.lp, cfg.y_p) +
                   oracle_mean(params, inst.aup, cfg.y_hat_p)) +
           (pu_corr > 0.0 ? pu_corr : 0.0);

    double nu_corr = oracle_mean(params, inst.du, cfg.y_p) -
                     pi_n * (oracle_mean(params, inst.ln, cfg.y_p) +
                             oracle_mean(params, inst.aun, cfg.y_hat_p));
    b.nu_clamp = nu_corr < 0.0;
    b.nu = pi_n * (oracle_mean(params, inst.ln, cfg.y_n) +
                   oracle_mean(params, inst.aun, cfg.y_hat_n)) +
           (nu_corr > 0.0 ? nu_corr : 0.0);

    b.total = cfg.gamma >= 0.0
                  ? (1.0 - cfg.gamma) * (b.pn + b.soft_pn) + cfg.gamma * b.pu
                  : (1.0 + cfg.gamma) * (b.pn + b.soft_pn) - cfg.gamma * b.nu;
    return b;
}

}  // namespace pnu_test
