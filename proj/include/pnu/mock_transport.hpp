#pragma once

#include <cstdint>
#include <mutex>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>

#include "pnu/adjudicator.hpp"
#include "pnu/featurizer.hpp"
#include "pnu/sample.hpp"

namespace pnu {

enum class MockMode {
    Oracle,       // answer the gold label, with a per-agent flip probability
    Fixed,        // scripted decision per sample id
    Adversarial,  // agents contradict each other, so nothing is ever agreed
};

inline MockMode mock_mode_from_string(const std::string& s) {
    if (s == "oracle") return MockMode::Oracle;
    if (s == "fixed") return MockMode::Fixed;
    if (s == "adversarial") return MockMode::Adversarial;
    throw FatalConfigError("unknown mock mode: " + s);
}

struct MockScript {
    MockMode mode = MockMode::Oracle;
    double flip_prob = 0.0;
    std::uint64_t seed = 0;
    std::unordered_map<std::string, int> gold;  // oracle mode
    // fixed mode: id -> {moderator decision, user decision}, 1 = positive
    std::unordered_map<std::string, std::pair<int, int>> fixed;
    std::set<std::string> fail_ids;  // these ids always fail with TransportError
    // ids that fail N times, then succeed (exercises the retry path)
    std::unordered_map<std::string, int> transient_failures;
};

// Deterministic in-process agent stand-in. Decisions are a pure function of
// (seed, sample id, agent name), so batch results are independent of call
// order and thread interleaving. Identifies the agent by the "moderator"
// substring in the system prompt and the sample by its "Sample ID:" line.
class MockTransport : public Transport {
public:
    explicit MockTransport(MockScript script)
        : script_(std::move(script)), transients_(script_.transient_failures) {}

    std::string complete(const ChatRequest& request) override {
        std::string sample_id = extract_sample_id(request);
        bool is_moderator = system_prompt_of(request).find("moderator") != std::string::npos;

        if (script_.fail_ids.count(sample_id))
            throw TransportError("mock: configured failure for " + sample_id);
        maybe_transient_failure(sample_id);

        int decision;
        switch (script_.mode) {
            case MockMode::Oracle: {
                auto it = script_.gold.find(sample_id);
                if (it == script_.gold.end())
                    throw FatalConfigError("mock oracle: no gold label for " + sample_id);
                decision = it->second;
                if (flip_roll(sample_id, is_moderator) < script_.flip_prob)
                    decision = 1 - decision;
                break;
            }
            case MockMode::Fixed: {
                auto it = script_.fixed.find(sample_id);
                if (it == script_.fixed.end())
                    throw FatalConfigError("mock fixed script: no entry for " + sample_id);
                decision = is_moderator ? it->second.first : it->second.second;
                break;
            }
            case MockMode::Adversarial:
                decision = is_moderator ? 1 : 0;
                break;
        }

        std::ostringstream out;
        out << "Scripted rationale from the " << (is_moderator ? "moderator" : "user")
            << " agent for sample " << sample_id << ".\n";
        out << "DECISION: " << (decision == 1 ? "POSITIVE" : "NEGATIVE");
        return out.str();
    }

private:
    static std::string system_prompt_of(const ChatRequest& request) {
        for (const auto& m : request.messages)
            if (m.role == "system") return m.content;
        return {};
    }

    static std::string extract_sample_id(const ChatRequest& request) {
        static const std::string marker = "Sample ID: ";
        for (const auto& m : request.messages) {
            auto pos = m.content.find(marker);
            if (pos == std::string::npos) continue;
            auto start = pos + marker.size();
            auto end = m.content.find('\n', start);
            return m.content.substr(start, end - start);
        }
        throw FatalConfigError("mock: prompt carries no Sample ID line");
    }

    double flip_roll(const std::string& sample_id, bool is_moderator) const {
        std::uint64_t h = fnv1a64(sample_id);
        h = fnv1a64(std::string(is_moderator ? "moderator" : "user"), h);
        h ^= script_.seed + 0x9e3779b97f4a7c15ull;
        h *= 0xbf58476d1ce4e5b9ull;
        h ^= h >> 31;
        return static_cast<double>(h >> 11) / static_cast<double>(1ull << 53);
    }

    void maybe_transient_failure(const std::string& sample_id) {
        std::lock_guard<std::mutex> lock(mutex_);
        auto it = transients_.find(sample_id);
        if (it != transients_.end() && it->second > 0) {
            --it->second;
            throw TransportError("mock: transient failure for " + sample_id);
        }
    }

    MockScript script_;
    std::mutex mutex_;
    std::unordered_map<std::string, int> transients_;
};

}  // namespace pnu
