// Standalone mock chat-completion endpoint for integration testing.
// Serves the same deterministic scripted agents as the in-process mock.

#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "pnu/mock_server.hpp"
#include "pnu/sample.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Deterministic mock chat-completion server"};
    std::string host = "127.0.0.1";
    int port = 8080;
    std::string mode = "oracle";
    double flip_prob = 0.0;
    std::uint64_t seed = 0;
    std::string gold_dataset;
    app.add_option("--host", host, "bind address");
    app.add_option("--port", port, "listen port");
    app.add_option("--mode", mode, "oracle | fixed | adversarial");
    app.add_option("--flip-prob", flip_prob, "oracle flip probability");
    app.add_option("--seed", seed, "flip seed");
    app.add_option("--gold-dataset", gold_dataset,
                   "JSONL dataset supplying gold labels for oracle mode");
    CLI11_PARSE(app, argc, argv);

    try {
        pnu::MockScript script;
        script.mode = pnu::mock_mode_from_string(mode);
        script.flip_prob = flip_prob;
        script.seed = seed;
        if (!gold_dataset.empty()) {
            auto dataset = pnu::load_dataset(gold_dataset);
            for (const auto& s : dataset.samples)
                if (s.gold_label) script.gold[s.id] = *s.gold_label;
        }
        pnu::MockServer server(std::move(script));
        std::cout << "mock server listening on " << host << ":" << port << "\n";
        server.listen(host, port);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
