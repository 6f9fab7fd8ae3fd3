// Acceptance suite: one pass/fail line per criterion, nonzero exit when
// anything fails. Runs entirely on synthetic data with scripted agents.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <vector>

#include "pnu/mock_transport.hpp"
#include "pnu/pipeline.hpp"
#include "pnu/synth.hpp"

#include "loss_oracle.hpp"
#include "test_helpers.hpp"

using namespace pnu;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

int g_failures = 0;

void report(const char* name, bool ok, const std::string& detail = "") {
    std::printf("%s %s%s%s\n", ok ? "PASS" : "FAIL", name, detail.empty() ? "" : " -- ",
                detail.c_str());
    if (!ok) ++g_failures;
}

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

// ---- shared instance machinery (mirrors the unit-test helpers) ----

struct Materialized {
    Dataset dataset;
    FeatureStore store;
    PoolState pools;
};

Materialized materialize(const pnu_test::OracleInstance& inst) {
    std::vector<Sample> samples;
    PoolState pools;
    auto add = [&](const std::vector<std::vector<double>>& feats, const char* prefix,
                   LabelState state) {
        for (std::size_t i = 0; i < feats.size(); ++i) {
            Sample s;
            char buf[32];
            std::snprintf(buf, sizeof(buf), "%s%03zu", prefix, i);
            s.id = buf;
            s.split = Split::Train;
            s.embedding = feats[i];
            samples.push_back(std::move(s));
            pools.pool(state).insert(buf);
        }
    };
    add(inst.lp, "lp", LabelState::LabeledPositive);
    add(inst.ln, "ln", LabelState::LabeledNegative);
    add(inst.aup, "ap", LabelState::AgreedUnknownPositive);
    add(inst.aun, "an", LabelState::AgreedUnknownNegative);
    add(inst.du, "du", LabelState::DisagreedUnknown);
    Materialized m{build_dataset(std::move(samples)), FeatureStore{}, std::move(pools)};
    FeaturizerConfig fc;
    fc.source = FeatureSource::Embedding;
    m.store = FeatureStore(m.dataset, fc);
    return m;
}

pnu_test::OracleInstance random_instance(std::mt19937_64& rng, std::size_t dim) {
    std::uniform_int_distribution<std::size_t> count(0, 4);
    pnu_test::OracleInstance inst;
    inst.lp = pnu_test::random_features(rng, 1 + count(rng), dim);
    inst.ln = pnu_test::random_features(rng, 1 + count(rng), dim);
    inst.aup = pnu_test::random_features(rng, count(rng), dim);
    inst.aun = pnu_test::random_features(rng, count(rng), dim);
    inst.du = pnu_test::random_features(rng, count(rng), dim);
    return inst;
}

ClassifierParams random_params(std::mt19937_64& rng, std::size_t dim) {
    std::normal_distribution<double> gauss(0.0, 0.5);
    ClassifierParams p;
    p.weights.resize(dim);
    for (auto& w : p.weights) w = gauss(rng);
    p.bias = gauss(rng);
    return p;
}

pnu_test::OracleInstance clamp_instance(std::size_t dim) {
    pnu_test::OracleInstance inst;
    std::vector<double> pos(dim, 1.0), neg(dim, -1.0);
    inst.lp = {pos, pos};
    inst.aup = {pos};
    inst.du = {neg, neg, neg};
    inst.ln = {neg};
    return inst;
}

// ---- criteria ----

void criterion_loss_correctness() {
    auto t0 = Clock::now();
    std::mt19937_64 rng(101);
    std::uniform_real_distribution<double> gdist(-1.0, 1.0);
    bool ok = true;
    for (int trial = 0; trial < 50 && ok; ++trial) {
        auto inst = random_instance(rng, 5);
        auto m = materialize(inst);
        auto params = random_params(rng, 5);
        LossConfig cfg;
        cfg.gamma = gdist(rng);
        auto got = pnu_loss(params, m.pools, m.store, cfg);
        auto want = pnu_test::oracle_pnu(params, inst, cfg);
        ok = std::abs(got.pn - want.pn) <= 1e-10 &&
             std::abs(got.soft_pn - want.soft_pn) <= 1e-10 &&
             std::abs(got.pu - want.pu) <= 1e-10 && std::abs(got.nu - want.nu) <= 1e-10 &&
             std::abs(got.total - want.total) <= 1e-10;
    }
    double secs = seconds_since(t0);
    report("loss-correctness", ok && secs < 5.0,
           "50 instances vs direct-summation oracle, " + std::to_string(secs) + "s");
}

void criterion_gradient_check() {
    auto t0 = Clock::now();
    std::mt19937_64 rng(202);
    std::uniform_real_distribution<double> gdist(-1.0, 1.0);
    const double step = 1e-5;
    bool ok = true;
    int pos_branch = 0, neg_branch = 0, clamped = 0, unclamped = 0;

    for (int trial = 0; trial < 50; ++trial) {
        pnu_test::OracleInstance inst;
        ClassifierParams params;
        LossConfig cfg;
        if (trial % 4 == 3) {
            inst = clamp_instance(4);
            params.weights.assign(4, 1.5);
            cfg.gamma = (trial % 8 == 3) ? 0.6 : -0.6;
        } else {
            inst = random_instance(rng, 4);
            params = random_params(rng, 4);
            cfg.gamma = gdist(rng);
        }
        auto m = materialize(inst);
        auto b = pnu_loss(params, m.pools, m.store, cfg);
        (cfg.gamma >= 0 ? pos_branch : neg_branch)++;
        (b.pu_clamp_active || b.nu_clamp_active ? clamped : unclamped)++;

        auto analytic = pnu_gradient(params, m.pools, m.store, cfg);
        double num = 0.0, den = 0.0;
        for (std::size_t j = 0; j <= params.weights.size(); ++j) {
            ClassifierParams lo = params, hi = params;
            if (j < params.weights.size()) {
                lo.weights[j] -= step;
                hi.weights[j] += step;
            } else {
                lo.bias -= step;
                hi.bias += step;
            }
            double fd = (pnu_loss(hi, m.pools, m.store, cfg).total -
                         pnu_loss(lo, m.pools, m.store, cfg).total) /
                        (2.0 * step);
            double ga = j < params.weights.size() ? analytic.w[j] : analytic.b;
            num += (ga - fd) * (ga - fd);
            den += ga * ga + fd * fd;
        }
        if (std::sqrt(num) / std::max(1e-12, std::sqrt(den)) > 1e-4) ok = false;
    }
    bool coverage = pos_branch > 0 && neg_branch > 0 && clamped > 0 && unclamped > 0;
    double secs = seconds_since(t0);
    report("gradient-check", ok && coverage && secs < 30.0,
           "50 instances, both branches and clamp states, " + std::to_string(secs) + "s");
}

void criterion_gamma_identities() {
    std::mt19937_64 rng(303);
    bool ok = true;
    for (int trial = 0; trial < 10; ++trial) {
        auto inst = random_instance(rng, 4);
        auto m = materialize(inst);
        auto params = random_params(rng, 4);
        LossConfig cfg;
        cfg.gamma = 0.0;
        auto b0 = pnu_loss(params, m.pools, m.store, cfg);
        if (b0.total != b0.pn + b0.soft_pn) ok = false;
        cfg.gamma = 1.0;
        auto b1 = pnu_loss(params, m.pools, m.store, cfg);
        if (b1.total != b1.pu) ok = false;
        // continuity: approach zero from both sides
        cfg.gamma = 1e-13;
        double above = pnu_loss(params, m.pools, m.store, cfg).total;
        cfg.gamma = -1e-13;
        double below = pnu_loss(params, m.pools, m.store, cfg).total;
        if (std::abs(above - b0.total) > 1e-12 || std::abs(below - b0.total) > 1e-12)
            ok = false;
    }
    report("gamma-branch-identities", ok);
}

void criterion_nnpu_clamp() {
    auto inst = clamp_instance(3);
    auto m = materialize(inst);
    ClassifierParams params;
    params.weights.assign(3, 2.0);
    LossConfig cfg;
    cfg.gamma = 1.0;

    bool clamp = false;
    double pu = nn_pu_loss(params, m.pools, m.store, cfg, &clamp);
    double positive_terms =
        cfg.pi_p * (pnu_test::oracle_mean(params, inst.lp, 1.0) +
                    pnu_test::oracle_mean(params, inst.aup, cfg.y_hat_p));
    bool value_ok = clamp && std::abs(pu - positive_terms) <= 1e-12;

    // gradient of the clamped branch must vanish: compare against the
    // positive-terms-only instance
    auto g = pnu_gradient(params, m.pools, m.store, cfg);
    pnu_test::OracleInstance pos_only;
    pos_only.lp = inst.lp;
    pos_only.aup = inst.aup;
    auto mp = materialize(pos_only);
    auto gp = pnu_gradient(params, mp.pools, mp.store, cfg);
    bool grad_ok = std::abs(g.b - gp.b) <= 1e-12;
    for (std::size_t j = 0; j < g.w.size(); ++j)
        if (std::abs(g.w[j] - gp.w[j]) > 1e-12) grad_ok = false;

    report("nnpu-clamp", value_ok && grad_ok);
}

void criterion_unanimity() {
    int agreed = 0, disagreed = 0;
    bool ok = true;
    for (int cl = 0; cl <= 1; ++cl)
        for (int mo = 0; mo <= 1; ++mo)
            for (int us = 0; us <= 1; ++us) {
                auto out = combine_outcome(cl, mo ? Decision::Positive : Decision::Negative,
                                           us ? Decision::Positive : Decision::Negative);
                if (out == Outcome::Disagreed)
                    ++disagreed;
                else {
                    ++agreed;
                    if (!(cl == mo && mo == us)) ok = false;
                }
            }
    report("unanimity-rule", ok && agreed == 2 && disagreed == 6,
           std::to_string(agreed) + " agreed / " + std::to_string(disagreed) + " disagreed");
}

RunConfig safety_config(std::uint64_t seed) {
    RunConfig cfg;
    cfg.seed = seed;
    cfg.seed_set = true;
    cfg.n_labeled = 100;
    cfg.k = 250;
    cfg.epochs = 30;
    cfg.learning_rate = 2.0;
    cfg.loss.gamma = 0.1;
    cfg.featurizer.source = FeatureSource::Embedding;
    cfg.agents.parallelism = 4;
    return cfg;
}

void criterion_pipeline_safety() {
    auto t0 = Clock::now();
    bool ok = true;
    std::string detail;
    for (std::uint64_t seed = 0; seed < 5 && ok; ++seed) {
        SynthConfig sc;
        sc.size = 2000;
        sc.dim = 16;
        sc.separability = 2.0;
        sc.noise = 0.05;
        sc.seed = seed;
        auto dataset = make_synthetic(sc);
        auto cfg = safety_config(seed);

        auto sup = run_supervised_only(dataset, cfg);

        // adversarial agents: everything disagreed, agreed pools never grow
        MockScript adv;
        adv.mode = MockMode::Adversarial;
        MockTransport adv_t(adv);
        auto adv_run = run_self_training(dataset, cfg, adv_t);
        for (const auto& r : adv_run.reports)
            if (r.moved_agreed_positive + r.moved_agreed_negative != 0) ok = false;
        if (adv_run.dev_metrics.macro_f1 < sup.dev_metrics.macro_f1) ok = false;

        // wrong-label agents: every pseudo-label inverted
        MockScript wrong;
        wrong.mode = MockMode::Oracle;
        wrong.flip_prob = 1.0;
        for (const auto& s : dataset.samples)
            if (s.gold_label) wrong.gold[s.id] = *s.gold_label;
        MockTransport wrong_t(wrong);
        auto wrong_run = run_self_training(dataset, cfg, wrong_t);
        if (wrong_run.dev_metrics.macro_f1 < sup.dev_metrics.macro_f1) ok = false;
    }
    double secs = seconds_since(t0);
    report("pipeline-safety", ok && secs < 120.0,
           "5 seeds, adversarial + inverted agents, " + std::to_string(secs) + "s");
}

struct DirectionalRuns {
    std::vector<double> sup_f1, st_f1;
};

DirectionalRuns run_directional() {
    DirectionalRuns out;
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        SynthConfig sc;
        sc.size = 10000;
        sc.dim = 1024;
        sc.separability = 3.5;  // moderate: supervised-only clearly suboptimal
        sc.noise = 0.05;
        sc.seed = seed;
        auto dataset = make_synthetic(sc);

        RunConfig cfg;
        cfg.seed = seed;
        cfg.seed_set = true;
        cfg.n_labeled = 100;
        cfg.k = 500;
        cfg.epochs = 120;
        cfg.learning_rate = 5.0;
        cfg.loss.gamma = 0.1;
        cfg.featurizer.source = FeatureSource::Embedding;
        cfg.agents.parallelism = 8;

        auto sup = run_supervised_only(dataset, cfg);
        MockScript script;
        script.mode = MockMode::Oracle;
        script.flip_prob = 0.1;
        script.seed = seed;
        for (const auto& s : dataset.samples)
            if (s.gold_label) script.gold[s.id] = *s.gold_label;
        MockTransport transport(script);
        auto st = run_self_training(dataset, cfg, transport);

        out.sup_f1.push_back(sup.test_metrics.macro_f1);
        out.st_f1.push_back(st.test_metrics.macro_f1);
    }
    return out;
}

void criterion_directional() {
    auto t0 = Clock::now();
    auto runs = run_directional();
    double sup_mean = 0.0, st_mean = 0.0;
    for (double v : runs.sup_f1) sup_mean += v;
    for (double v : runs.st_f1) st_mean += v;
    sup_mean /= runs.sup_f1.size();
    st_mean /= runs.st_f1.size();
    double gain_points = 100.0 * (st_mean - sup_mean);
    double secs = seconds_since(t0);

    char buf[160];
    std::snprintf(buf, sizeof(buf),
                  "SupOnly %.4f, SelfTrain %.4f, gain %.1f points over 5 seeds, %.1fs",
                  sup_mean, st_mean, gain_points, secs);
    report("directional-selftrain-gain", gain_points >= 5.0 && secs < 300.0, buf);
}

// Pseudo-label quality declines as the confident samples are exhausted: the
// classifier starts strong, so early rounds adjudicate its easiest samples
// and later rounds face the ambiguous remainder.
void criterion_quality_trend() {
    bool ok = true;
    std::string detail;
    for (std::uint64_t seed = 0; seed < 3; ++seed) {
        SynthConfig sc;
        sc.size = 10000;
        sc.dim = 64;
        sc.separability = 2.5;
        sc.noise = 0.05;
        sc.seed = seed;
        auto dataset = make_synthetic(sc);

        RunConfig cfg;
        cfg.seed = seed;
        cfg.seed_set = true;
        cfg.n_labeled = 100;
        cfg.k = 500;
        cfg.epochs = 40;
        cfg.learning_rate = 2.0;
        cfg.loss.gamma = 0.1;
        cfg.featurizer.source = FeatureSource::Embedding;
        cfg.agents.parallelism = 8;

        MockScript script;
        script.mode = MockMode::Oracle;
        script.flip_prob = 0.2;
        script.seed = seed;
        for (const auto& s : dataset.samples)
            if (s.gold_label) script.gold[s.id] = *s.gold_label;
        MockTransport transport(script);
        auto st = run_self_training(dataset, cfg, transport);

        double slope = quality_trend_slope(st.quality);
        if (slope > 0.0) ok = false;
        char buf[48];
        std::snprintf(buf, sizeof(buf), "%sseed %llu slope %.5f", seed ? ", " : "",
                      static_cast<unsigned long long>(seed), slope);
        detail += buf;
    }
    report("pseudo-label-quality-trend", ok, detail);
}

void criterion_termination_and_determinism() {
    SynthConfig sc;
    sc.size = 1500;
    sc.dim = 16;
    sc.separability = 2.5;
    sc.noise = 0.05;
    sc.seed = 7;
    auto dataset = make_synthetic(sc);

    auto cfg = safety_config(7);
    cfg.k = 200;
    std::size_t unlabeled0 = 1200 - cfg.n_labeled;
    std::size_t expected_rounds = (unlabeled0 + cfg.k - 1) / cfg.k;

    // pool-union conservation is asserted inside run_self_training after
    // every round; a violation would throw
    fs::path dir1 = fs::temp_directory_path() / "pnu_accept_det1";
    fs::path dir2 = fs::temp_directory_path() / "pnu_accept_det2";
    fs::remove_all(dir1);
    fs::remove_all(dir2);

    MockScript script;
    script.mode = MockMode::Oracle;
    script.flip_prob = 0.1;
    script.seed = 7;
    for (const auto& s : dataset.samples)
        if (s.gold_label) script.gold[s.id] = *s.gold_label;

    MockTransport t1(script), t2(script);
    auto r1 = run_self_training(dataset, cfg, t1, dir1);
    auto r2 = run_self_training(dataset, cfg, t2, dir2);

    bool rounds_ok = r1.reports.size() == expected_rounds + 1;
    report("termination-and-conservation", rounds_ok,
           std::to_string(r1.reports.size() - 1) + " rounds, expected " +
               std::to_string(expected_rounds));

    bool identical = true;
    for (std::size_t round = 0; round < r1.reports.size(); ++round) {
        auto name = round_file_name("round", static_cast<int>(round), ".json");
        std::ifstream a(dir1 / "rounds" / name), b(dir2 / "rounds" / name);
        std::string ca((std::istreambuf_iterator<char>(a)), {});
        std::string cb((std::istreambuf_iterator<char>(b)), {});
        if (ca.empty() || ca != cb) identical = false;
    }
    report("determinism", identical,
           "byte-identical round reports across two identical runs");
}

}  // namespace

int main() {
    criterion_loss_correctness();
    criterion_gradient_check();
    criterion_gamma_identities();
    criterion_nnpu_clamp();
    criterion_unanimity();
    criterion_pipeline_safety();
    criterion_directional();
    criterion_quality_trend();
    criterion_termination_and_determinism();
    if (g_failures) {
        std::printf("%d criterion(s) failed\n", g_failures);
        return 1;
    }
    std::printf("all acceptance criteria passed\n");
    return 0;
}
