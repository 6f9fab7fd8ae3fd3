#pragma once

#include <algorithm>
#include <array>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "pnu/sample.hpp"

namespace pnu {

// Labeled pools are frozen at init. Agreed/Disagreed pools grow through
// adjudication; Discarded holds samples consumed by reverted rounds.
enum class LabelState {
    LabeledPositive,
    LabeledNegative,
    AgreedUnknownPositive,
    AgreedUnknownNegative,
    DisagreedUnknown,
    Unlabeled,
    Discarded,
};

inline constexpr int kNumLabelStates = 7;

inline const char* label_state_name(LabelState s) {
    switch (s) {
        case LabelState::LabeledPositive: return "labeled_positive";
        case LabelState::LabeledNegative: return "labeled_negative";
        case LabelState::AgreedUnknownPositive: return "agreed_unknown_positive";
        case LabelState::AgreedUnknownNegative: return "agreed_unknown_negative";
        case LabelState::DisagreedUnknown: return "disagreed_unknown";
        case LabelState::Unlabeled: return "unlabeled";
        case LabelState::Discarded: return "discarded";
    }
    return "?";
}

inline LabelState label_state_from_string(const std::string& s) {
    for (int i = 0; i < kNumLabelStates; ++i) {
        auto st = static_cast<LabelState>(i);
        if (s == label_state_name(st)) return st;
    }
    throw std::runtime_error("unknown label state: " + s);
}

struct PoolTransition {
    int round = 0;
    std::string id;
    LabelState from = LabelState::Unlabeled;
    LabelState to = LabelState::Unlabeled;
};

// Disjoint partition of the train-split ids. std::set keeps iteration
// order deterministic.
struct PoolState {
    std::array<std::set<std::string>, kNumLabelStates> pools;
    int round_number = 0;
    std::vector<PoolTransition> log;

    std::set<std::string>& pool(LabelState s) { return pools[static_cast<int>(s)]; }
    const std::set<std::string>& pool(LabelState s) const {
        return pools[static_cast<int>(s)];
    }

    LabelState state_of(const std::string& id) const {
        for (int i = 0; i < kNumLabelStates; ++i)
            if (pools[i].count(id)) return static_cast<LabelState>(i);
        throw std::runtime_error("sample not in any pool: " + id);
    }

    std::size_t total_size() const {
        std::size_t n = 0;
        for (const auto& p : pools) n += p.size();
        return n;
    }

    std::size_t labeled_count() const {
        return pool(LabelState::LabeledPositive).size() +
               pool(LabelState::LabeledNegative).size();
    }

    // Disjointness plus union-equals-universe, checked against the train ids.
    bool partitions(const std::set<std::string>& universe) const {
        std::set<std::string> seen;
        for (const auto& p : pools)
            for (const auto& id : p)
                if (!seen.insert(id).second) return false;
        return seen == universe;
    }
};

// Stratified labeled-set draw: equal per-class counts where possible,
// deterministic for a fixed seed. Remaining train samples start Unlabeled.
inline PoolState init_pools(const Dataset& dataset, std::size_t n_labeled,
                            std::uint64_t seed) {
    std::vector<std::string> pos, neg, train_ids;
    for (const auto& s : dataset.samples) {
        if (s.split != Split::Train) continue;
        train_ids.push_back(s.id);
        if (s.gold_label) (*s.gold_label == 1 ? pos : neg).push_back(s.id);
    }
    if (n_labeled > train_ids.size())
        throw std::runtime_error("n_labeled exceeds train split size");
    if (n_labeled < 2)
        throw std::runtime_error("n_labeled must be at least 2");

    std::mt19937_64 rng(seed);
    std::shuffle(pos.begin(), pos.end(), rng);
    std::shuffle(neg.begin(), neg.end(), rng);

    std::size_t want_pos = n_labeled / 2;
    std::size_t want_neg = n_labeled - want_pos;
    // Rebalance when one class runs short.
    if (pos.size() < want_pos) {
        want_neg += want_pos - pos.size();
        want_pos = pos.size();
    }
    if (neg.size() < want_neg) {
        want_pos += want_neg - neg.size();
        want_neg = neg.size();
        if (pos.size() < want_pos) want_pos = pos.size();
    }
    if (want_pos == 0 || want_neg == 0)
        throw std::runtime_error(
            "labeled set would be single-class; need gold labels of both classes");
    if (want_pos + want_neg < n_labeled)
        throw std::runtime_error("not enough gold-labeled train samples for n_labeled");

    PoolState st;
    for (std::size_t i = 0; i < want_pos; ++i)
        st.pool(LabelState::LabeledPositive).insert(pos[i]);
    for (std::size_t i = 0; i < want_neg; ++i)
        st.pool(LabelState::LabeledNegative).insert(neg[i]);
    for (const auto& id : train_ids)
        if (!st.pool(LabelState::LabeledPositive).count(id) &&
            !st.pool(LabelState::LabeledNegative).count(id))
            st.pool(LabelState::Unlabeled).insert(id);
    return st;
}

inline bool transition_allowed(LabelState from, LabelState to) {
    if (from == LabelState::Unlabeled)
        return to == LabelState::AgreedUnknownPositive ||
               to == LabelState::AgreedUnknownNegative ||
               to == LabelState::DisagreedUnknown;
    if (from == LabelState::AgreedUnknownPositive ||
        from == LabelState::AgreedUnknownNegative ||
        from == LabelState::DisagreedUnknown)
        return to == LabelState::Discarded;
    return false;
}

inline void transition(PoolState& st, const std::string& id, LabelState to) {
    LabelState from = st.state_of(id);
    if (from == LabelState::LabeledPositive || from == LabelState::LabeledNegative)
        throw std::runtime_error("cannot move labeled sample " + id);
    if (!transition_allowed(from, to))
        throw std::runtime_error(std::string("illegal transition for ") + id + ": " +
                                 label_state_name(from) + " -> " + label_state_name(to));
    st.pool(from).erase(id);
    st.pool(to).insert(id);
    st.log.push_back({st.round_number, id, from, to});
}

}  // namespace pnu
