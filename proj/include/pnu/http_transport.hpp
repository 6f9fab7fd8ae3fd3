#pragma once

#if __has_include(<openssl/ssl.h>) && !defined(CPPHTTPLIB_OPENSSL_SUPPORT)
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif

#include <cstdlib>
#include <string>

#include <httplib.h>
#include <json.hpp>

#include "pnu/adjudicator.hpp"

namespace pnu {

inline const char* kAgentTokenEnvVar = "PNU_AGENT_TOKEN";

// Chat-completion client. endpoint is scheme://host[:port]; the request is
// POSTed to /v1/chat/completions with an optional bearer token taken from
// the PNU_AGENT_TOKEN environment variable.
class HttpTransport : public Transport {
public:
    explicit HttpTransport(std::string endpoint, std::string path = "/v1/chat/completions")
        : endpoint_(std::move(endpoint)), path_(std::move(path)) {
        if (endpoint_.find("http://") != 0 && endpoint_.find("https://") != 0)
            throw FatalConfigError("endpoint must start with http:// or https://: " + endpoint_);
        if (const char* tok = std::getenv(kAgentTokenEnvVar)) token_ = tok;
    }

    std::string complete(const ChatRequest& request) override {
        httplib::Client client(endpoint_);
        client.set_connection_timeout(10);
        client.set_read_timeout(120);
        httplib::Headers headers;
        if (!token_.empty()) headers.emplace("Authorization", "Bearer " + token_);

        auto res = client.Post(path_, headers, chat_request_to_json(request).dump(),
                               "application/json");
        if (!res)
            throw TransportError("request to " + endpoint_ + " failed: " +
                                 httplib::to_string(res.error()));
        if (res->status >= 500)
            throw TransportError("server error " + std::to_string(res->status));
        if (res->status != 200)
            throw FatalConfigError("endpoint rejected request with status " +
                                   std::to_string(res->status) + ": " + res->body);
        try {
            auto body = nlohmann::json::parse(res->body);
            return body.at("choices").at(0).at("message").at("content").get<std::string>();
        } catch (const std::exception& e) {
            throw TransportError(std::string("malformed completion response: ") + e.what());
        }
    }

private:
    std::string endpoint_;
    std::string path_;
    std::string token_;
};

}  // namespace pnu
