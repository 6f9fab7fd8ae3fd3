#pragma once

#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "pnu/adjudicator.hpp"
#include "pnu/featurizer.hpp"
#include "pnu/loss.hpp"
#include "pnu/mock_transport.hpp"

namespace pnu {

struct AgentSettings {
    std::string transport = "mock";  // "mock" | "http"
    // mock settings
    std::string mock_mode = "oracle";
    double flip_prob = 0.0;
    // http settings
    std::string endpoint;
    std::string model = "default";
    double temperature = 0.0;
    int max_tokens = 512;
    int parallelism = 4;
    int max_retries = 3;
    int retry_backoff_ms = 250;
    bool reveal_classifier_label = false;
    std::string task_description = default_task_description();
    std::string moderator_prompt = moderator_persona().system_prompt;
    std::string user_prompt = user_persona().system_prompt;
};

struct RunConfig {
    std::string dataset_path;
    std::string run_dir;
    std::size_t n_labeled = 100;
    std::size_t k = 500;
    std::uint64_t seed = 0;
    bool seed_set = false;
    int epochs = 10;
    double learning_rate = 0.1;
    bool accept_ties = true;    // dev tie counts as improvement
    bool warm_start = true;     // retrain from current params each round
    LossConfig loss;
    FeaturizerConfig featurizer;
    AgentSettings agents;

    std::vector<std::string> validate() const {
        std::vector<std::string> errors;
        if (dataset_path.empty()) errors.push_back("dataset path is required");
        if (!seed_set) errors.push_back("seed must be set explicitly");
        if (k < 1) errors.push_back("k must be >= 1");
        if (n_labeled < 2) errors.push_back("n_labeled must be >= 2");
        if (epochs < 0) errors.push_back("epochs must be >= 0");
        if (learning_rate <= 0.0) errors.push_back("learning_rate must be positive");
        try {
            loss.validate();
        } catch (const std::exception& e) {
            errors.push_back(e.what());
        }
        if (agents.transport != "mock" && agents.transport != "http")
            errors.push_back("agents.transport must be \"mock\" or \"http\"");
        if (agents.transport == "http" && agents.endpoint.empty())
            errors.push_back("agents.endpoint is required for http transport");
        if (agents.transport == "mock") {
            try {
                mock_mode_from_string(agents.mock_mode);
            } catch (const std::exception& e) {
                errors.push_back(e.what());
            }
        }
        if (agents.parallelism < 1) errors.push_back("agents.parallelism must be >= 1");
        if (agents.flip_prob < 0.0 || agents.flip_prob > 1.0)
            errors.push_back("agents.flip_prob must lie in [0, 1]");
        return errors;
    }

    AdjudicatorConfig adjudicator_config() const {
        AdjudicatorConfig cfg;
        cfg.moderator.system_prompt = agents.moderator_prompt;
        cfg.user.system_prompt = agents.user_prompt;
        cfg.task_description = agents.task_description;
        cfg.model = agents.model;
        cfg.temperature = agents.temperature;
        cfg.max_tokens = agents.max_tokens;
        cfg.max_retries = agents.max_retries;
        cfg.retry_backoff = std::chrono::milliseconds(agents.retry_backoff_ms);
        cfg.reveal_classifier_label = agents.reveal_classifier_label;
        return cfg;
    }
};

inline nlohmann::json run_config_to_json(const RunConfig& c) {
    return {
        {"dataset", c.dataset_path},
        {"run_dir", c.run_dir},
        {"n_labeled", c.n_labeled},
        {"k", c.k},
        {"seed", c.seed},
        {"epochs", c.epochs},
        {"learning_rate", c.learning_rate},
        {"accept_ties", c.accept_ties},
        {"warm_start", c.warm_start},
        {"loss",
         {{"gamma", c.loss.gamma},
          {"pi_p", c.loss.pi_p},
          {"y_hat_p", c.loss.y_hat_p},
          {"y_hat_n", c.loss.y_hat_n}}},
        {"featurizer",
         {{"source", c.featurizer.source == FeatureSource::Embedding ? "embedding" : "hashed-text"},
          {"dim", c.featurizer.dim}}},
        {"agents",
         {{"transport", c.agents.transport},
          {"mock_mode", c.agents.mock_mode},
          {"flip_prob", c.agents.flip_prob},
          {"endpoint", c.agents.endpoint},
          {"model", c.agents.model},
          {"temperature", c.agents.temperature},
          {"max_tokens", c.agents.max_tokens},
          {"parallelism", c.agents.parallelism},
          {"max_retries", c.agents.max_retries},
          {"retry_backoff_ms", c.agents.retry_backoff_ms},
          {"reveal_classifier_label", c.agents.reveal_classifier_label},
          {"task_description", c.agents.task_description},
          {"moderator_prompt", c.agents.moderator_prompt},
          {"user_prompt", c.agents.user_prompt}}},
    };
}

inline RunConfig run_config_from_json(const nlohmann::json& j) {
    RunConfig c;
    c.dataset_path = j.value("dataset", c.dataset_path);
    c.run_dir = j.value("run_dir", c.run_dir);
    c.n_labeled = j.value("n_labeled", c.n_labeled);
    c.k = j.value("k", c.k);
    if (j.contains("seed")) {
        c.seed = j["seed"].get<std::uint64_t>();
        c.seed_set = true;
    }
    c.epochs = j.value("epochs", c.epochs);
    c.learning_rate = j.value("learning_rate", c.learning_rate);
    c.accept_ties = j.value("accept_ties", c.accept_ties);
    c.warm_start = j.value("warm_start", c.warm_start);
    if (j.contains("loss")) {
        const auto& l = j["loss"];
        c.loss.gamma = l.value("gamma", c.loss.gamma);
        c.loss.pi_p = l.value("pi_p", c.loss.pi_p);
        c.loss.y_hat_p = l.value("y_hat_p", c.loss.y_hat_p);
        c.loss.y_hat_n = l.value("y_hat_n", c.loss.y_hat_n);
    }
    if (j.contains("featurizer")) {
        const auto& f = j["featurizer"];
        std::string src = f.value("source", std::string("hashed-text"));
        if (src == "embedding")
            c.featurizer.source = FeatureSource::Embedding;
        else if (src == "hashed-text")
            c.featurizer.source = FeatureSource::HashedText;
        else
            throw std::runtime_error("unknown featurizer source: " + src);
        c.featurizer.dim = f.value("dim", c.featurizer.dim);
    }
    if (j.contains("agents")) {
        const auto& a = j["agents"];
        c.agents.transport = a.value("transport", c.agents.transport);
        c.agents.mock_mode = a.value("mock_mode", c.agents.mock_mode);
        c.agents.flip_prob = a.value("flip_prob", c.agents.flip_prob);
        c.agents.endpoint = a.value("endpoint", c.agents.endpoint);
        c.agents.model = a.value("model", c.agents.model);
        c.agents.temperature = a.value("temperature", c.agents.temperature);
        c.agents.max_tokens = a.value("max_tokens", c.agents.max_tokens);
        c.agents.parallelism = a.value("parallelism", c.agents.parallelism);
        c.agents.max_retries = a.value("max_retries", c.agents.max_retries);
        c.agents.retry_backoff_ms = a.value("retry_backoff_ms", c.agents.retry_backoff_ms);
        c.agents.reveal_classifier_label =
            a.value("reveal_classifier_label", c.agents.reveal_classifier_label);
        c.agents.task_description = a.value("task_description", c.agents.task_description);
        c.agents.moderator_prompt = a.value("moderator_prompt", c.agents.moderator_prompt);
        c.agents.user_prompt = a.value("user_prompt", c.agents.user_prompt);
    }
    return c;
}

inline RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    nlohmann::json j;
    in >> j;
    return run_config_from_json(j);
}

// Stable hash of the full config, recorded in checkpoints.
inline std::string run_config_hash(const RunConfig& c) {
    std::ostringstream out;
    out << std::hex << fnv1a64(run_config_to_json(c).dump());
    return out.str();
}

}  // namespace pnu
