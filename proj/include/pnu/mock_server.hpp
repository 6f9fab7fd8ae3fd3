#pragma once

#if __has_include(<openssl/ssl.h>) && !defined(CPPHTTPLIB_OPENSSL_SUPPORT)
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif

#include <memory>
#include <string>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "pnu/mock_transport.hpp"

namespace pnu {

// Standalone mock endpoint speaking the chat-completion wire protocol,
// backed by the same deterministic script as the in-process mock.
class MockServer {
public:
    explicit MockServer(MockScript script) : transport_(std::move(script)) {
        server_.Post("/v1/chat/completions", [this](const httplib::Request& req,
                                                    httplib::Response& res) {
            try {
                auto body = nlohmann::json::parse(req.body);
                ChatRequest creq;
                creq.model = body.value("model", std::string{});
                creq.temperature = body.value("temperature", 0.0);
                creq.max_tokens = body.value("max_tokens", 512);
                for (const auto& m : body.at("messages"))
                    creq.messages.push_back({m.at("role").get<std::string>(),
                                             m.at("content").get<std::string>()});
                std::string content = transport_.complete(creq);
                nlohmann::json out = {
                    {"choices",
                     {{{"message", {{"role", "assistant"}, {"content", content}}}}}}};
                res.set_content(out.dump(), "application/json");
            } catch (const TransportError& e) {
                res.status = 503;
                res.set_content(e.what(), "text/plain");
            } catch (const std::exception& e) {
                res.status = 400;
                res.set_content(e.what(), "text/plain");
            }
        });
    }

    // Binds an OS-assigned port and serves on a background thread.
    int start() {
        int port = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
        return port;
    }

    void listen(const std::string& host, int port) { server_.listen(host, port); }

    void stop() {
        server_.stop();
        if (thread_.joinable()) thread_.join();
    }

    ~MockServer() { stop(); }

private:
    MockTransport transport_;
    httplib::Server server_;
    std::thread thread_;
};

}  // namespace pnu
