#pragma once

#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include <json.hpp>

namespace pnu {

enum class Split { Train, Dev, Test };

inline const char* split_name(Split s) {
    switch (s) {
        case Split::Train: return "train";
        case Split::Dev: return "dev";
        case Split::Test: return "test";
    }
    return "?";
}

inline Split split_from_string(const std::string& s) {
    if (s == "train") return Split::Train;
    if (s == "dev") return Split::Dev;
    if (s == "test") return Split::Test;
    throw std::runtime_error("unknown split: " + s);
}

// One classifiable item. gold_label: 1 = positive (offensive), 0 = negative.
struct Sample {
    std::string id;
    std::string text;
    std::optional<std::vector<double>> embedding;
    std::optional<int> gold_label;
    Split split = Split::Train;
    std::string image_ref;  // opaque, carried through, never decoded
};

struct Dataset {
    std::vector<Sample> samples;
    std::optional<std::size_t> embedding_dim;
    std::unordered_map<std::string, std::size_t> index;  // id -> position

    const Sample& by_id(const std::string& id) const {
        auto it = index.find(id);
        if (it == index.end()) throw std::runtime_error("unknown sample id: " + id);
        return samples[it->second];
    }
    bool has(const std::string& id) const { return index.count(id) > 0; }

    std::vector<std::string> ids_of_split(Split s) const {
        std::vector<std::string> out;
        for (const auto& smp : samples)
            if (smp.split == s) out.push_back(smp.id);
        return out;
    }
};

inline Sample parse_sample_json(const nlohmann::json& j) {
    Sample s;
    s.id = j.at("id").get<std::string>();
    s.text = j.value("text", std::string{});
    if (j.contains("embedding") && !j["embedding"].is_null())
        s.embedding = j["embedding"].get<std::vector<double>>();
    if (j.contains("label") && !j["label"].is_null()) {
        int lab = j["label"].get<int>();
        if (lab != 0 && lab != 1) throw std::runtime_error("label must be 0 or 1");
        s.gold_label = lab;
    }
    s.split = split_from_string(j.at("split").get<std::string>());
    if (j.contains("image_ref") && !j["image_ref"].is_null())
        s.image_ref = j["image_ref"].get<std::string>();
    return s;
}

inline nlohmann::json sample_to_json(const Sample& s) {
    nlohmann::json j;
    j["id"] = s.id;
    j["text"] = s.text;
    if (s.embedding) j["embedding"] = *s.embedding;
    j["label"] = s.gold_label ? nlohmann::json(*s.gold_label) : nlohmann::json(nullptr);
    j["split"] = split_name(s.split);
    if (!s.image_ref.empty()) j["image_ref"] = s.image_ref;
    return j;
}

inline Dataset build_dataset(std::vector<Sample> samples,
                             std::optional<std::size_t> declared_dim = std::nullopt) {
    Dataset d;
    d.embedding_dim = declared_dim;
    d.samples = std::move(samples);
    for (std::size_t i = 0; i < d.samples.size(); ++i) {
        const Sample& s = d.samples[i];
        if (!d.index.emplace(s.id, i).second)
            throw std::runtime_error("duplicate sample id: " + s.id);
        if (s.embedding) {
            if (!d.embedding_dim) d.embedding_dim = s.embedding->size();
            if (s.embedding->size() != *d.embedding_dim) {
                std::ostringstream msg;
                msg << "sample " << s.id << ": embedding length " << s.embedding->size()
                    << " != declared dimension " << *d.embedding_dim;
                throw std::runtime_error(msg.str());
            }
        }
        if ((s.split == Split::Dev || s.split == Split::Test) && !s.gold_label)
            throw std::runtime_error("sample " + s.id + ": " + split_name(s.split) +
                                     " sample missing gold label");
    }
    return d;
}

// JSONL loader, one sample object per line. Blank lines are skipped.
inline Dataset load_dataset(const std::string& path,
                            std::optional<std::size_t> declared_dim = std::nullopt) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open dataset file: " + path);
    std::vector<Sample> samples;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
            samples.push_back(parse_sample_json(nlohmann::json::parse(line)));
        } catch (const std::exception& e) {
            std::ostringstream msg;
            msg << path << ":" << lineno << ": " << e.what();
            throw std::runtime_error(msg.str());
        }
        if (declared_dim && samples.back().embedding &&
            samples.back().embedding->size() != *declared_dim) {
            std::ostringstream msg;
            msg << path << ":" << lineno << ": embedding length "
                << samples.back().embedding->size() << " != declared dimension "
                << *declared_dim;
            throw std::runtime_error(msg.str());
        }
    }
    return build_dataset(std::move(samples), declared_dim);
}

inline void save_dataset(const Dataset& d, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write dataset file: " + path);
    for (const auto& s : d.samples) out << sample_to_json(s).dump() << "\n";
}

}  // namespace pnu
