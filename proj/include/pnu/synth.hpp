#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "pnu/sample.hpp"

namespace pnu {

// Two-class synthetic data: Gaussian clusters in embedding space plus
// token-pattern text, with controllable separation and label noise.
struct SynthConfig {
    std::size_t size = 10000;
    double positive_fraction = 0.5;
    double separability = 2.0;  // distance between the class means
    double noise = 0.0;         // gold-label flip probability
    std::size_t dim = 32;
    std::uint64_t seed = 0;

    void validate() const {
        if (size < 10) throw std::runtime_error("synth size must be >= 10");
        if (positive_fraction <= 0.0 || positive_fraction >= 1.0)
            throw std::runtime_error("positive fraction must lie in (0, 1)");
        if (separability < 0.0) throw std::runtime_error("separability must be >= 0");
        if (noise < 0.0 || noise > 0.5)
            throw std::runtime_error("noise must lie in [0, 0.5]");
        if (dim == 0) throw std::runtime_error("dim must be positive");
    }
};

namespace detail {

inline std::vector<std::string> synth_vocab(const std::string& prefix, std::size_t n) {
    std::vector<std::string> v;
    for (std::size_t i = 0; i < n; ++i) v.push_back(prefix + std::to_string(i));
    return v;
}

}  // namespace detail

// Deterministic for a fixed config. Every sample carries its (possibly
// noise-flipped) gold label; splits are 80/10/10 train/dev/test.
inline Dataset make_synthetic(const SynthConfig& cfg) {
    cfg.validate();
    std::mt19937_64 rng(cfg.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    const auto shared_vocab = detail::synth_vocab("word", 50);
    const auto pos_vocab = detail::synth_vocab("toxic", 30);
    const auto neg_vocab = detail::synth_vocab("benign", 30);

    // Class means sit at +-separability/2 along the all-ones direction.
    const double offset = cfg.separability / (2.0 * std::sqrt(static_cast<double>(cfg.dim)));

    std::vector<Sample> samples;
    samples.reserve(cfg.size);
    std::size_t n_pos = static_cast<std::size_t>(std::llround(cfg.size * cfg.positive_fraction));
    int width = static_cast<int>(std::to_string(cfg.size).size());

    for (std::size_t i = 0; i < cfg.size; ++i) {
        int true_class = i < n_pos ? 1 : 0;
        Sample s;
        std::ostringstream id;
        id << "s";
        id.fill('0');
        id.width(width);
        id << i;
        s.id = id.str();

        std::vector<double> emb(cfg.dim);
        double mu = true_class == 1 ? offset : -offset;
        for (auto& x : emb) x = mu + gauss(rng);
        s.embedding = std::move(emb);

        // Token mix leans toward the class vocabulary with the same margin
        // the embedding has, keeping hashed-text mode learnable too.
        const auto& class_vocab = true_class == 1 ? pos_vocab : neg_vocab;
        double class_token_prob = std::min(0.9, 0.3 + 0.1 * cfg.separability);
        std::ostringstream text;
        for (int tkn = 0; tkn < 8; ++tkn) {
            if (tkn) text << " ";
            if (unif(rng) < class_token_prob)
                text << class_vocab[static_cast<std::size_t>(unif(rng) * class_vocab.size())];
            else
                text << shared_vocab[static_cast<std::size_t>(unif(rng) * shared_vocab.size())];
        }
        s.text = text.str();

        int gold = true_class;
        if (unif(rng) < cfg.noise) gold = 1 - gold;
        s.gold_label = gold;
        samples.push_back(std::move(s));
    }

    // 80/10/10 split assignment, shuffled so classes spread evenly.
    std::vector<std::size_t> order(cfg.size);
    for (std::size_t i = 0; i < cfg.size; ++i) order[i] = i;
    std::shuffle(order.begin(), order.end(), rng);
    std::size_t n_train = cfg.size * 8 / 10;
    std::size_t n_dev = cfg.size / 10;
    for (std::size_t rank = 0; rank < order.size(); ++rank) {
        Split sp = rank < n_train            ? Split::Train
                   : rank < n_train + n_dev  ? Split::Dev
                                             : Split::Test;
        samples[order[rank]].split = sp;
    }
    return build_dataset(std::move(samples));
}

}  // namespace pnu
