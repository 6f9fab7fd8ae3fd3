// Command-line driver: synthetic data generation, supervised baseline,
// full self-training runs, checkpoint evaluation, and standalone
// adjudication dry runs.
//
// Exit codes: 0 success, 2 configuration error, 3 runtime failure
// (resumable via --run-dir for pipeline runs).

#include <cstdlib>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "pnu/config.hpp"
#include "pnu/http_transport.hpp"
#include "pnu/mock_transport.hpp"
#include "pnu/pipeline.hpp"
#include "pnu/synth.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

std::optional<std::string> env_str(const char* name) {
    if (const char* v = std::getenv(name)) return std::string(v);
    return std::nullopt;
}

// Precedence below flags: environment overrides the config file.
void apply_env_overrides(pnu::RunConfig& cfg) {
    if (auto v = env_str("PNU_DATASET")) cfg.dataset_path = *v;
    if (auto v = env_str("PNU_RUN_DIR")) cfg.run_dir = *v;
    if (auto v = env_str("PNU_GAMMA")) cfg.loss.gamma = std::stod(*v);
    if (auto v = env_str("PNU_K")) cfg.k = std::stoull(*v);
    if (auto v = env_str("PNU_N_LABELED")) cfg.n_labeled = std::stoull(*v);
    if (auto v = env_str("PNU_SEED")) {
        cfg.seed = std::stoull(*v);
        cfg.seed_set = true;
    }
    if (auto v = env_str("PNU_EPOCHS")) cfg.epochs = std::stoi(*v);
    if (auto v = env_str("PNU_LEARNING_RATE")) cfg.learning_rate = std::stod(*v);
    if (auto v = env_str("PNU_ENDPOINT")) cfg.agents.endpoint = *v;
    if (auto v = env_str("PNU_MODEL")) cfg.agents.model = *v;
}

struct ConfigFlags {
    std::string config_path;
    std::optional<std::string> dataset, run_dir, transport, mock_mode, endpoint, model;
    std::optional<double> gamma, pi_p, learning_rate, flip_prob;
    std::optional<std::size_t> k, n_labeled;
    std::optional<int> epochs, parallelism;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> featurizer_source;
    std::optional<std::size_t> featurizer_dim;

    void attach(CLI::App* cmd) {
        cmd->add_option("--config", config_path, "JSON config file");
        cmd->add_option("--dataset", dataset, "dataset JSONL path");
        cmd->add_option("--run-dir", run_dir, "run directory for artifacts and resume");
        cmd->add_option("--gamma", gamma, "PNU gamma in [-1,1]");
        cmd->add_option("--pi-p", pi_p, "positive class prior");
        cmd->add_option("--k", k, "top-k candidates per round");
        cmd->add_option("--n-labeled", n_labeled, "number of labeled samples");
        cmd->add_option("--seed", seed, "random seed (required)");
        cmd->add_option("--epochs", epochs, "training epochs per round");
        cmd->add_option("--learning-rate", learning_rate, "gradient-descent step size");
        cmd->add_option("--transport", transport, "agent transport: mock | http");
        cmd->add_option("--mock-mode", mock_mode, "mock mode: oracle | fixed | adversarial");
        cmd->add_option("--flip-prob", flip_prob, "mock oracle flip probability");
        cmd->add_option("--endpoint", endpoint, "chat-completion endpoint URL");
        cmd->add_option("--model", model, "model name sent to the endpoint");
        cmd->add_option("--parallelism", parallelism, "concurrent adjudication requests");
        cmd->add_option("--featurizer", featurizer_source,
                        "feature source: hashed-text | embedding");
        cmd->add_option("--featurizer-dim", featurizer_dim, "hashed-text dimension");
    }

    pnu::RunConfig resolve() const {
        pnu::RunConfig cfg;
        if (!config_path.empty()) cfg = pnu::load_run_config(config_path);
        apply_env_overrides(cfg);
        if (dataset) cfg.dataset_path = *dataset;
        if (run_dir) cfg.run_dir = *run_dir;
        if (gamma) cfg.loss.gamma = *gamma;
        if (pi_p) cfg.loss.pi_p = *pi_p;
        if (k) cfg.k = *k;
        if (n_labeled) cfg.n_labeled = *n_labeled;
        if (seed) {
            cfg.seed = *seed;
            cfg.seed_set = true;
        }
        if (epochs) cfg.epochs = *epochs;
        if (learning_rate) cfg.learning_rate = *learning_rate;
        if (transport) cfg.agents.transport = *transport;
        if (mock_mode) cfg.agents.mock_mode = *mock_mode;
        if (flip_prob) cfg.agents.flip_prob = *flip_prob;
        if (endpoint) cfg.agents.endpoint = *endpoint;
        if (model) cfg.agents.model = *model;
        if (parallelism) cfg.agents.parallelism = *parallelism;
        if (featurizer_source) {
            if (*featurizer_source == "embedding")
                cfg.featurizer.source = pnu::FeatureSource::Embedding;
            else if (*featurizer_source == "hashed-text")
                cfg.featurizer.source = pnu::FeatureSource::HashedText;
            else
                throw std::runtime_error("unknown featurizer source: " + *featurizer_source);
        }
        if (featurizer_dim) cfg.featurizer.dim = *featurizer_dim;
        return cfg;
    }
};

int report_config_errors(const pnu::RunConfig& cfg) {
    auto errors = cfg.validate();
    if (errors.empty()) return kExitOk;
    std::cerr << "configuration invalid:\n";
    for (const auto& e : errors) std::cerr << "  - " << e << "\n";
    return kExitConfig;
}

std::unique_ptr<pnu::Transport> make_transport(const pnu::RunConfig& cfg,
                                               const pnu::Dataset& dataset) {
    if (cfg.agents.transport == "http")
        return std::make_unique<pnu::HttpTransport>(cfg.agents.endpoint);
    pnu::MockScript script;
    script.mode = pnu::mock_mode_from_string(cfg.agents.mock_mode);
    script.flip_prob = cfg.agents.flip_prob;
    script.seed = cfg.seed;
    for (const auto& s : dataset.samples)
        if (s.gold_label) script.gold[s.id] = *s.gold_label;
    return std::make_unique<pnu::MockTransport>(std::move(script));
}

void print_round_line(const pnu::RoundReport& r) {
    std::cout << "round " << r.round_number << ": k=" << r.k_selected << " agreed_pos="
              << r.moved_agreed_positive << " agreed_neg=" << r.moved_agreed_negative
              << " disagreed=" << r.moved_disagreed << " dev_f1 " << r.dev_macro_f1_before
              << " -> " << r.dev_macro_f1_after << (r.accepted ? " accepted" : " reverted")
              << "\n";
}

int cmd_synth(const pnu::SynthConfig& sc, const std::string& out_path) {
    auto dataset = pnu::make_synthetic(sc);
    pnu::save_dataset(dataset, out_path);
    std::cout << "wrote " << dataset.samples.size() << " samples to " << out_path << "\n";
    return kExitOk;
}

int cmd_run(const ConfigFlags& flags) {
    auto cfg = flags.resolve();
    if (int rc = report_config_errors(cfg)) return rc;
    if (!std::filesystem::exists(cfg.dataset_path)) {
        std::cerr << "dataset not found: " << cfg.dataset_path << "\n";
        return kExitConfig;
    }
    auto dataset = pnu::load_dataset(cfg.dataset_path);
    auto transport = make_transport(cfg, dataset);
    std::optional<pnu::fs::path> run_dir;
    if (!cfg.run_dir.empty()) run_dir = cfg.run_dir;

    auto result = pnu::run_self_training(dataset, cfg, *transport, run_dir);
    for (const auto& r : result.reports) print_round_line(r);
    std::cout << "final dev: acc " << result.dev_metrics.accuracy << " macro_f1 "
              << result.dev_metrics.macro_f1 << "\n";
    std::cout << "final test: acc " << result.test_metrics.accuracy << " macro_f1 "
              << result.test_metrics.macro_f1 << "\n";
    return kExitOk;
}

int cmd_supervised(const ConfigFlags& flags) {
    auto cfg = flags.resolve();
    if (int rc = report_config_errors(cfg)) return rc;
    auto dataset = pnu::load_dataset(cfg.dataset_path);
    auto result = pnu::run_supervised_only(dataset, cfg);
    std::cout << "supervised dev: acc " << result.dev_metrics.accuracy << " macro_f1 "
              << result.dev_metrics.macro_f1 << "\n";
    std::cout << "supervised test: acc " << result.test_metrics.accuracy << " macro_f1 "
              << result.test_metrics.macro_f1 << "\n";
    if (!cfg.run_dir.empty()) {
        pnu::ensure_run_dir(cfg.run_dir);
        pnu::save_checkpoint(pnu::fs::path(cfg.run_dir) / "checkpoint.json",
                             result.final_params, pnu::run_config_hash(cfg));
    }
    return kExitOk;
}

int cmd_eval(const ConfigFlags& flags, const std::string& checkpoint_path,
             const std::string& split_name) {
    auto cfg = flags.resolve();
    auto dataset = pnu::load_dataset(cfg.dataset_path);
    auto params = pnu::load_checkpoint(checkpoint_path);
    pnu::FeatureStore store(dataset, cfg.featurizer);

    pnu::Split split = pnu::split_from_string(split_name);
    pnu::EvalSet eval_set;
    for (const auto& s : dataset.samples) {
        if (s.split != split || !s.gold_label) continue;
        eval_set.ids.push_back(s.id);
        eval_set.golds.push_back(*s.gold_label);
    }
    if (eval_set.ids.empty()) {
        std::cerr << "no gold-labeled samples in split " << split_name << "\n";
        return kExitConfig;
    }
    auto preds = pnu::predict_labels(params, store, eval_set.ids);
    auto matrix = pnu::ConfusionMatrix::from(preds, eval_set.golds);
    std::cout << "split " << split_name << ": n=" << eval_set.ids.size() << " acc "
              << pnu::accuracy(preds, eval_set.golds) << " macro_f1 "
              << pnu::macro_f1(preds, eval_set.golds) << "\n";
    std::cout << "confusion: tn=" << matrix.counts[0][0] << " fp=" << matrix.counts[0][1]
              << " fn=" << matrix.counts[1][0] << " tp=" << matrix.counts[1][1] << "\n";
    for (int c = 0; c < 2; ++c)
        if (matrix.class_degenerate(c))
            std::cerr << "warning: class " << c << " absent from golds and predictions; "
                      << "its F1 counts as 0\n";
    return kExitOk;
}

int cmd_adjudicate(const ConfigFlags& flags, const std::vector<std::string>& ids,
                   const std::string& checkpoint_path, int assume_label) {
    auto cfg = flags.resolve();
    auto dataset = pnu::load_dataset(cfg.dataset_path);
    auto transport = make_transport(cfg, dataset);

    std::optional<pnu::ClassifierParams> params;
    std::optional<pnu::FeatureStore> store;
    if (!checkpoint_path.empty()) {
        params = pnu::load_checkpoint(checkpoint_path);
        store.emplace(dataset, cfg.featurizer);
    }

    std::vector<pnu::AdjudicationItem> items;
    for (const auto& id : ids) {
        int label = assume_label;
        if (params) label = pnu::hard_label(pnu::predict_proba(*params, store->get(id)));
        items.push_back({&dataset.by_id(id), label});
    }
    auto transcripts = pnu::adjudicate_batch(items, cfg.adjudicator_config(), *transport,
                                             cfg.agents.parallelism);
    for (const auto& t : transcripts)
        std::cout << pnu::transcript_to_json(t).dump(2) << "\n";
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Semi-supervised self-training engine with agent-verified pseudo-labels"};
    app.require_subcommand(1);

    // synth
    auto* synth = app.add_subcommand("synth", "generate a synthetic two-class dataset");
    pnu::SynthConfig sc;
    std::string synth_out = "synth.jsonl";
    synth->add_option("--out", synth_out, "output JSONL path");
    synth->add_option("--size", sc.size, "total sample count");
    synth->add_option("--positive-fraction", sc.positive_fraction, "positive class share");
    synth->add_option("--separability", sc.separability, "distance between class means");
    synth->add_option("--noise", sc.noise, "gold-label flip probability");
    synth->add_option("--dim", sc.dim, "embedding dimension");
    synth->add_option("--seed", sc.seed, "random seed")->required();

    auto* run = app.add_subcommand("run", "full self-training pipeline run");
    ConfigFlags run_flags;
    run_flags.attach(run);

    auto* supervised = app.add_subcommand("supervised", "supervised-only baseline");
    ConfigFlags sup_flags;
    sup_flags.attach(supervised);

    auto* eval = app.add_subcommand("eval", "score a checkpoint against a split");
    ConfigFlags eval_flags;
    eval_flags.attach(eval);
    std::string eval_checkpoint, eval_split = "test";
    eval->add_option("--checkpoint", eval_checkpoint, "checkpoint file")->required();
    eval->add_option("--split", eval_split, "split to score: train | dev | test");

    auto* adjudicate = app.add_subcommand("adjudicate", "negotiation dry run on given ids");
    ConfigFlags adj_flags;
    adj_flags.attach(adjudicate);
    std::vector<std::string> adj_ids;
    std::string adj_checkpoint;
    int adj_label = 1;
    adjudicate->add_option("--ids", adj_ids, "sample ids to adjudicate")->required();
    adjudicate->add_option("--checkpoint", adj_checkpoint,
                           "checkpoint used to produce classifier labels");
    adjudicate->add_option("--assume-label", adj_label,
                           "classifier label to assume when no checkpoint is given");

    CLI11_PARSE(app, argc, argv);

    try {
        if (synth->parsed()) return cmd_synth(sc, synth_out);
        if (run->parsed()) return cmd_run(run_flags);
        if (supervised->parsed()) return cmd_supervised(sup_flags);
        if (eval->parsed()) return cmd_eval(eval_flags, eval_checkpoint, eval_split);
        if (adjudicate->parsed())
            return cmd_adjudicate(adj_flags, adj_ids, adj_checkpoint, adj_label);
    } catch (const pnu::FatalConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitOk;
}
