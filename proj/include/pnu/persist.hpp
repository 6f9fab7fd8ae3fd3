#pragma once

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "pnu/adjudicator.hpp"
#include "pnu/classifier.hpp"
#include "pnu/featurizer.hpp"
#include "pnu/pools.hpp"

namespace pnu {

namespace fs = std::filesystem;

inline std::string round_file_name(const std::string& stem, int round,
                                   const std::string& ext) {
    std::ostringstream out;
    out << stem << "_" << std::setw(3) << std::setfill('0') << round << ext;
    return out.str();
}

inline void ensure_run_dir(const fs::path& dir) {
    fs::create_directories(dir / "rounds");
    fs::create_directories(dir / "transcripts");
}

inline std::string checksum_of(const nlohmann::json& payload) {
    std::ostringstream out;
    out << std::hex << fnv1a64(payload.dump());
    return out.str();
}

// Writes {"payload": ..., "checksum": ...}; load verifies the checksum.
inline void write_checksummed(const fs::path& path, const nlohmann::json& payload) {
    nlohmann::json wrapper{{"payload", payload}, {"checksum", checksum_of(payload)}};
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << wrapper.dump(2) << "\n";
}

inline nlohmann::json read_checksummed(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    nlohmann::json wrapper;
    in >> wrapper;
    nlohmann::json payload = wrapper.at("payload");
    if (checksum_of(payload) != wrapper.at("checksum").get<std::string>())
        throw std::runtime_error("checksum mismatch in " + path.string());
    return payload;
}

inline nlohmann::json pool_state_to_json(const PoolState& st) {
    nlohmann::json pools;
    for (int i = 0; i < kNumLabelStates; ++i) {
        auto state = static_cast<LabelState>(i);
        pools[label_state_name(state)] = st.pool(state);
    }
    nlohmann::json log = nlohmann::json::array();
    for (const auto& tr : st.log)
        log.push_back({{"round", tr.round},
                       {"id", tr.id},
                       {"from", label_state_name(tr.from)},
                       {"to", label_state_name(tr.to)}});
    return {{"round_number", st.round_number}, {"pools", pools}, {"log", log}};
}

inline PoolState pool_state_from_json(const nlohmann::json& j) {
    PoolState st;
    st.round_number = j.at("round_number").get<int>();
    for (int i = 0; i < kNumLabelStates; ++i) {
        auto state = static_cast<LabelState>(i);
        for (const auto& id : j.at("pools").at(label_state_name(state)))
            st.pool(state).insert(id.get<std::string>());
    }
    for (const auto& tr : j.value("log", nlohmann::json::array()))
        st.log.push_back({tr.at("round").get<int>(), tr.at("id").get<std::string>(),
                          label_state_from_string(tr.at("from").get<std::string>()),
                          label_state_from_string(tr.at("to").get<std::string>())});
    return st;
}

inline void save_pool_snapshot(const fs::path& run_dir, const PoolState& st) {
    write_checksummed(run_dir / "pool_snapshot.json", pool_state_to_json(st));
}

inline PoolState load_pool_snapshot(const fs::path& run_dir) {
    return pool_state_from_json(read_checksummed(run_dir / "pool_snapshot.json"));
}

inline nlohmann::json params_to_json(const ClassifierParams& p,
                                     const std::string& config_hash) {
    return {{"dim", p.weights.size()},
            {"weights", p.weights},
            {"bias", p.bias},
            {"version", p.version},
            {"config_hash", config_hash}};
}

inline ClassifierParams params_from_json(const nlohmann::json& j,
                                         std::string* config_hash = nullptr) {
    ClassifierParams p;
    p.weights = j.at("weights").get<std::vector<double>>();
    p.bias = j.at("bias").get<double>();
    p.version = j.at("version").get<std::int64_t>();
    if (p.weights.size() != j.at("dim").get<std::size_t>())
        throw std::runtime_error("checkpoint dim does not match weight count");
    if (config_hash) *config_hash = j.value("config_hash", std::string{});
    return p;
}

inline void save_checkpoint(const fs::path& path, const ClassifierParams& p,
                            const std::string& config_hash) {
    write_checksummed(path, params_to_json(p, config_hash));
}

inline ClassifierParams load_checkpoint(const fs::path& path,
                                        std::string* config_hash = nullptr) {
    return params_from_json(read_checksummed(path), config_hash);
}

inline void write_round_report(const fs::path& run_dir, int round,
                               const nlohmann::json& report) {
    fs::path path = run_dir / "rounds" / round_file_name("round", round, ".json");
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << report.dump(2) << "\n";
}

inline void write_transcripts(const fs::path& run_dir, int round,
                              const std::vector<AdjudicationTranscript>& transcripts) {
    fs::path path = run_dir / "transcripts" / round_file_name("round", round, ".jsonl");
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    for (const auto& t : transcripts) out << transcript_to_json(t).dump() << "\n";
}

// Wall-clock timings live here, outside the deterministic round reports.
inline void append_timing(const fs::path& run_dir, int round, double seconds) {
    std::ofstream out(run_dir / "timings.tsv", std::ios::app);
    out << round << "\t" << seconds << "\n";
}

}  // namespace pnu
