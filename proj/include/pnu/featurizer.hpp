#pragma once

#include <cctype>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "pnu/sample.hpp"

namespace pnu {

enum class FeatureSource { HashedText, Embedding };

struct FeaturizerConfig {
    FeatureSource source = FeatureSource::HashedText;
    std::size_t dim = 1u << 15;  // hashed-text dimension; ignored for embeddings
};

inline std::uint64_t fnv1a64(const void* data, std::size_t len,
                             std::uint64_t h = 14695981039346656037ull) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 1099511628211ull;
    }
    return h;
}

inline std::uint64_t fnv1a64(const std::string& s,
                             std::uint64_t h = 14695981039346656037ull) {
    return fnv1a64(s.data(), s.size(), h);
}

// Hashed bag of tokens, L2-normalized. Tokens are lowercased maximal
// alphanumeric runs; empty text maps to the zero vector.
inline std::vector<double> featurize_text(const std::string& text, std::size_t dim) {
    std::vector<double> v(dim, 0.0);
    std::string tok;
    auto flush = [&] {
        if (tok.empty()) return;
        v[fnv1a64(tok) % dim] += 1.0;
        tok.clear();
    };
    for (unsigned char c : text) {
        if (std::isalnum(c))
            tok.push_back(static_cast<char>(std::tolower(c)));
        else
            flush();
    }
    flush();
    double norm = 0.0;
    for (double x : v) norm += x * x;
    if (norm > 0.0) {
        norm = std::sqrt(norm);
        for (double& x : v) x /= norm;
    }
    return v;
}

// Precomputed feature vectors for a dataset, keyed by sample id.
class FeatureStore {
public:
    FeatureStore() = default;

    FeatureStore(const Dataset& dataset, const FeaturizerConfig& cfg) {
        if (cfg.source == FeatureSource::Embedding) {
            if (!dataset.embedding_dim)
                throw std::runtime_error("featurizer source is embedding but dataset has none");
            dim_ = *dataset.embedding_dim;
            for (const auto& s : dataset.samples) {
                if (!s.embedding)
                    throw std::runtime_error("sample " + s.id + " has no embedding");
                by_id_.emplace(s.id, *s.embedding);
            }
        } else {
            dim_ = cfg.dim;
            for (const auto& s : dataset.samples)
                by_id_.emplace(s.id, featurize_text(s.text, dim_));
        }
    }

    std::size_t dim() const { return dim_; }

    const std::vector<double>& get(const std::string& id) const {
        auto it = by_id_.find(id);
        if (it == by_id_.end()) throw std::runtime_error("no features for id: " + id);
        return it->second;
    }

private:
    std::size_t dim_ = 0;
    std::unordered_map<std::string, std::vector<double>> by_id_;
};

}  // namespace pnu
