#pragma once

#include <filesystem>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "mdkeychunker/llm_client.hpp"
#include "mdkeychunker/mock_provider.hpp"
#include "mdkeychunker/model.hpp"

namespace mdkc_test {

inline std::filesystem::path data_dir() { return MDKC_TEST_DATA; }

inline void no_sleep(double) {}

inline mdkeychunker::LlmClient offline_client(std::shared_ptr<mdkeychunker::Transport> transport) {
    return mdkeychunker::LlmClient(std::move(transport), {}, no_sleep);
}

/// Synthetic enrichment, except that prompts at the listed 1-based positions
/// get HTTP 500 on every attempt.
inline std::shared_ptr<mdkeychunker::MockTransport> failing_at(std::set<std::size_t> positions) {
    using namespace mdkeychunker;
    return std::make_shared<MockTransport>(
        [positions](const nlohmann::json& req) -> TransportResponse {
            auto view = parse_prompt(last_message(req));
            if (positions.count(view.position)) return {500, "{}", {}};
            return chat_response(synthetic_enrichment(view).dump());
        },
        [](const nlohmann::json& req) {
            std::vector<std::vector<double>> out;
            for (const auto& t : req.at("input")) out.push_back(hashed_embedding(t.get<std::string>(), 64));
            return embeddings_response(out);
        });
}

inline bool fences_balanced(const std::string& text) {
    int backticks = 0, tildes = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        auto end = text.find('\n', pos);
        std::string line = text.substr(pos, end == std::string::npos ? std::string::npos : end - pos);
        auto first = line.find_first_not_of(" ");
        if (first != std::string::npos) {
            std::string body = line.substr(first);
            if (body.rfind("```", 0) == 0 && tildes % 2 == 0) ++backticks;
            else if (body.rfind("~~~", 0) == 0 && backticks % 2 == 0) ++tildes;
        }
        if (end == std::string::npos) break;
        pos = end + 1;
    }
    return backticks % 2 == 0 && tildes % 2 == 0;
}

}  // namespace mdkc_test
