#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include <json.hpp>

#include "pnu/featurizer.hpp"
#include "pnu/sample.hpp"

namespace pnu {

struct ChatMessage {
    std::string role;  // "system" | "user" | "assistant"
    std::string content;
};

struct ChatRequest {
    std::string model;
    std::vector<ChatMessage> messages;
    double temperature = 0.0;  // deterministic decoding by default
    int max_tokens = 512;
};

inline nlohmann::json chat_request_to_json(const ChatRequest& req) {
    nlohmann::json msgs = nlohmann::json::array();
    for (const auto& m : req.messages) msgs.push_back({{"role", m.role}, {"content", m.content}});
    return {{"model", req.model},
            {"messages", msgs},
            {"temperature", req.temperature},
            {"max_tokens", req.max_tokens}};
}

// Transient failure; negotiate retries these.
struct TransportError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Misconfiguration (bad endpoint, missing script entry); always fatal.
struct FatalConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Transport {
    virtual ~Transport() = default;
    virtual std::string complete(const ChatRequest& request) = 0;
};

struct AgentPersona {
    std::string name;           // "moderator" | "user"
    std::string system_prompt;
};

inline AgentPersona moderator_persona() {
    return {"moderator",
            "You are a strict content moderator for a social media platform. Your top "
            "priority is user safety: you err on the side of flagging content that could "
            "be hateful, harassing, or otherwise offensive, including implicit or coded "
            "harm."};
}

inline AgentPersona user_persona() {
    return {"user",
            "You are an everyday social media user who values free expression. You are "
            "lenient toward edgy humor and provocative speech, and you only consider "
            "content offensive when it clearly attacks or demeans people."};
}

inline std::string default_task_description() {
    return "Decide whether the following content is offensive (POSITIVE) or not "
           "offensive (NEGATIVE).";
}

inline const char* kDecisionFormatInstruction =
    "First give a short rationale. Then end your reply with a final line formatted "
    "exactly as either:\nDECISION: POSITIVE\nor\nDECISION: NEGATIVE";

enum class Decision { Positive, Negative, Unparseable };

inline const char* decision_name(Decision d) {
    switch (d) {
        case Decision::Positive: return "positive";
        case Decision::Negative: return "negative";
        case Decision::Unparseable: return "unparseable";
    }
    return "?";
}

// Scans for the last line of the form "DECISION: POSITIVE|NEGATIVE",
// case-insensitively. Anything else is Unparseable.
inline Decision parse_decision(const std::string& response_text) {
    std::istringstream in(response_text);
    std::string line;
    Decision result = Decision::Unparseable;
    auto is_space = [](char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; };
    while (std::getline(in, line)) {
        std::size_t begin = 0, end = line.size();
        while (begin < end && is_space(line[begin])) ++begin;
        while (end > begin && is_space(line[end - 1])) --end;
        std::string upper;
        upper.reserve(end - begin);
        for (std::size_t i = begin; i < end; ++i)
            upper.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(line[i]))));
        const std::string prefix = "DECISION:";
        if (upper.compare(0, prefix.size(), prefix) != 0) continue;
        std::size_t v = prefix.size();
        while (v < upper.size() && upper[v] == ' ') ++v;
        if (upper.compare(v, std::string::npos, "POSITIVE") == 0)
            result = Decision::Positive;
        else if (upper.compare(v, std::string::npos, "NEGATIVE") == 0)
            result = Decision::Negative;
    }
    return result;
}

struct AdjudicatorConfig {
    AgentPersona moderator = moderator_persona();
    AgentPersona user = user_persona();
    std::string task_description = default_task_description();
    std::string model = "default";
    double temperature = 0.0;
    int max_tokens = 512;
    int max_retries = 3;
    std::chrono::milliseconds retry_backoff{0};  // doubled per attempt
    bool reveal_classifier_label = false;        // agents see the peer only, by default
};

inline std::string render_sample_block(const Sample& sample) {
    std::ostringstream out;
    out << "Sample ID: " << sample.id << "\n";
    out << "Content:\n" << sample.text << "\n";
    if (!sample.image_ref.empty()) out << "[Attached image: " << sample.image_ref << "]\n";
    return out.str();
}

inline std::vector<ChatMessage> build_initial_prompt(const AgentPersona& persona,
                                                     const Sample& sample,
                                                     const AdjudicatorConfig& cfg) {
    std::ostringstream user_msg;
    user_msg << cfg.task_description << "\n\n" << render_sample_block(sample);
    user_msg << "\n" << kDecisionFormatInstruction;
    return {{"system", persona.system_prompt}, {"user", user_msg.str()}};
}

inline std::vector<ChatMessage> build_initial_prompt_with_label(
    const AgentPersona& persona, const Sample& sample, const AdjudicatorConfig& cfg,
    std::optional<int> classifier_label) {
    std::ostringstream user_msg;
    user_msg << cfg.task_description << "\n\n" << render_sample_block(sample);
    if (classifier_label)
        user_msg << "\nA preliminary classifier labeled this content "
                 << (*classifier_label == 1 ? "POSITIVE" : "NEGATIVE") << ".\n";
    user_msg << "\n" << kDecisionFormatInstruction;
    return {{"system", persona.system_prompt}, {"user", user_msg.str()}};
}

inline std::vector<ChatMessage> build_review_prompt(
    const AgentPersona& persona, const Sample& sample, const AdjudicatorConfig& cfg,
    const std::string& own_initial_response, const std::string& peer_name,
    const std::string& peer_initial_response, bool peer_unparseable) {
    std::ostringstream user_msg;
    user_msg << cfg.task_description << "\n\n" << render_sample_block(sample);
    user_msg << "\nYour earlier judgment of this content was:\n---\n"
             << own_initial_response << "\n---\n";
    user_msg << "\nThe " << peer_name << " judged the same content as follows";
    if (peer_unparseable) user_msg << " (note: their reply did not contain a parseable decision)";
    user_msg << ":\n---\n" << peer_initial_response << "\n---\n";
    user_msg << "\nReview their reasoning, then issue your final decision.\n\n"
             << kDecisionFormatInstruction;
    return {{"system", persona.system_prompt}, {"user", user_msg.str()}};
}

enum class Outcome { AgreedPositive, AgreedNegative, Disagreed };

inline const char* outcome_name(Outcome o) {
    switch (o) {
        case Outcome::AgreedPositive: return "agreed_positive";
        case Outcome::AgreedNegative: return "agreed_negative";
        case Outcome::Disagreed: return "disagreed";
    }
    return "?";
}

// Three-way unanimity: agreed only when both agents match the classifier.
inline Outcome combine_outcome(int classifier_label, Decision moderator_final,
                               Decision user_final) {
    if (classifier_label == 1 && moderator_final == Decision::Positive &&
        user_final == Decision::Positive)
        return Outcome::AgreedPositive;
    if (classifier_label == 0 && moderator_final == Decision::Negative &&
        user_final == Decision::Negative)
        return Outcome::AgreedNegative;
    return Outcome::Disagreed;
}

struct AgentRecord {
    std::string name;
    Decision initial_decision = Decision::Unparseable;
    std::string initial_response;
    Decision final_decision = Decision::Unparseable;
    std::string final_response;
};

struct AdjudicationTranscript {
    std::string sample_id;
    int classifier_label = 0;
    AgentRecord moderator;
    AgentRecord user;
    Outcome outcome = Outcome::Disagreed;
    std::string failure_note;             // non-empty when transport was exhausted
    nlohmann::json raw = nlohmann::json::array();  // request/response audit trail
};

inline nlohmann::json transcript_to_json(const AdjudicationTranscript& t) {
    auto agent = [](const AgentRecord& a) {
        return nlohmann::json{{"name", a.name},
                              {"initial_decision", decision_name(a.initial_decision)},
                              {"initial_response", a.initial_response},
                              {"final_decision", decision_name(a.final_decision)},
                              {"final_response", a.final_response}};
    };
    return {{"sample_id", t.sample_id},
            {"classifier_label", t.classifier_label},
            {"moderator", agent(t.moderator)},
            {"user", agent(t.user)},
            {"outcome", outcome_name(t.outcome)},
            {"failure_note", t.failure_note},
            {"raw", t.raw}};
}

namespace detail {

inline std::string call_with_retry(Transport& transport, const ChatRequest& req,
                                   const AdjudicatorConfig& cfg) {
    auto backoff = cfg.retry_backoff;
    for (int attempt = 0;; ++attempt) {
        try {
            return transport.complete(req);
        } catch (const TransportError& e) {
            if (attempt >= cfg.max_retries) throw;
            if (backoff.count() > 0) std::this_thread::sleep_for(backoff);
            backoff *= 2;
        }
    }
}

}  // namespace detail

// Two-phase negotiation: independent initial decisions, one review round,
// unanimity with the classifier decides the outcome. Transport exhaustion on
// any call yields Disagreed with a failure note.
inline AdjudicationTranscript negotiate(const Sample& sample, int classifier_label,
                                        const AdjudicatorConfig& cfg, Transport& transport) {
    AdjudicationTranscript t;
    t.sample_id = sample.id;
    t.classifier_label = classifier_label;
    t.moderator.name = cfg.moderator.name;
    t.user.name = cfg.user.name;

    auto call = [&](const AgentPersona& persona, const std::vector<ChatMessage>& messages,
                    const char* phase) -> std::string {
        ChatRequest req{cfg.model, messages, cfg.temperature, cfg.max_tokens};
        std::string response = detail::call_with_retry(transport, req, cfg);
        t.raw.push_back({{"agent", persona.name},
                         {"phase", phase},
                         {"request", chat_request_to_json(req)},
                         {"response", response}});
        return response;
    };

    try {
        auto initial_messages = [&](const AgentPersona& p) {
            return cfg.reveal_classifier_label
                       ? build_initial_prompt_with_label(p, sample, cfg, classifier_label)
                       : build_initial_prompt_with_label(p, sample, cfg, std::nullopt);
        };
        t.moderator.initial_response = call(cfg.moderator, initial_messages(cfg.moderator), "initial");
        t.moderator.initial_decision = parse_decision(t.moderator.initial_response);
        t.user.initial_response = call(cfg.user, initial_messages(cfg.user), "initial");
        t.user.initial_decision = parse_decision(t.user.initial_response);

        t.moderator.final_response =
            call(cfg.moderator,
                 build_review_prompt(cfg.moderator, sample, cfg, t.moderator.initial_response,
                                     cfg.user.name, t.user.initial_response,
                                     t.user.initial_decision == Decision::Unparseable),
                 "review");
        t.moderator.final_decision = parse_decision(t.moderator.final_response);
        t.user.final_response =
            call(cfg.user,
                 build_review_prompt(cfg.user, sample, cfg, t.user.initial_response,
                                     cfg.moderator.name, t.moderator.initial_response,
                                     t.moderator.initial_decision == Decision::Unparseable),
                 "review");
        t.user.final_decision = parse_decision(t.user.final_response);

        t.outcome = combine_outcome(classifier_label, t.moderator.final_decision,
                                    t.user.final_decision);
    } catch (const TransportError& e) {
        t.outcome = Outcome::Disagreed;
        t.failure_note = std::string("transport exhausted: ") + e.what();
    }
    return t;
}

struct AdjudicationItem {
    const Sample* sample = nullptr;
    int classifier_label = 0;
};

// Bounded-parallelism batch run. Per-sample isolation; transcripts are
// returned sorted by sample id regardless of completion order.
inline std::vector<AdjudicationTranscript> adjudicate_batch(
    const std::vector<AdjudicationItem>& items, const AdjudicatorConfig& cfg,
    Transport& transport, int parallelism) {
    if (parallelism < 1) throw std::runtime_error("parallelism must be >= 1");
    std::vector<AdjudicationTranscript> transcripts(items.size());
    std::atomic<std::size_t> next{0};
    std::exception_ptr fatal;
    std::mutex fatal_mutex;

    auto worker = [&] {
        for (;;) {
            std::size_t i = next.fetch_add(1);
            if (i >= items.size()) return;
            try {
                transcripts[i] =
                    negotiate(*items[i].sample, items[i].classifier_label, cfg, transport);
            } catch (...) {
                std::lock_guard<std::mutex> lock(fatal_mutex);
                if (!fatal) fatal = std::current_exception();
            }
        }
    };

    std::vector<std::thread> threads;
    int n_threads = std::min<std::size_t>(parallelism, std::max<std::size_t>(items.size(), 1));
    for (int i = 0; i < n_threads; ++i) threads.emplace_back(worker);
    for (auto& th : threads) th.join();
    if (fatal) std::rethrow_exception(fatal);

    std::sort(transcripts.begin(), transcripts.end(),
              [](const auto& a, const auto& b) { return a.sample_id < b.sample_id; });
    return transcripts;
}

}  // namespace pnu
