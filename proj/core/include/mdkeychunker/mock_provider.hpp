#pragma once

#include <atomic>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "mdkeychunker/llm_client.hpp"

namespace mdkeychunker {

/// In-process stand-in for an OpenAI-compatible endpoint. Handlers receive
/// the parsed request body and return a raw transport response, so the
/// client's response parsing and retry logic run unchanged.
class MockTransport final : public Transport {
public:
    using Handler = std::function<TransportResponse(const nlohmann::json& request)>;

    MockTransport(Handler chat, Handler embeddings);

    TransportResponse post_json(std::string_view path, const std::string& body) override;

    std::size_t chat_calls() const noexcept { return chat_calls_.load(); }
    std::size_t embedding_calls() const noexcept { return embedding_calls_.load(); }

private:
    Handler chat_;
    Handler embeddings_;
    std::atomic<std::size_t> chat_calls_{0};
    std::atomic<std::size_t> embedding_calls_{0};
};

/// OpenAI chat-completion body carrying `content` as the assistant message.
TransportResponse chat_response(const std::string& content);
TransportResponse embeddings_response(const std::vector<std::vector<double>>& vectors);

/// Content of the last message in a chat request body.
std::string last_message(const nlohmann::json& request);

/// Pieces of a formatted enrichment prompt, recovered from the user message.
struct PromptView {
    std::string section_path;
    std::size_t position = 0;
    std::size_t total = 0;
    std::string chunk_text;
    std::vector<std::string> rolling_keys;
};

PromptView parse_prompt(std::string_view prompt);

/// Deterministic, always-valid enrichment reply derived from the prompt:
/// the key comes from the last section path segment, related_keys from the
/// rolling keys on offer.
nlohmann::json synthetic_enrichment(const PromptView& prompt);

/// Feature-hashed bag of words (not normalized).
std::vector<double> hashed_embedding(std::string_view text, std::size_t dimensions);

/// Synthetic enrichment for chat and hashed embeddings.
std::shared_ptr<MockTransport> make_synthetic_transport(std::size_t dimensions = 256);

/// Builds a mock from a JSON script file:
///   {"chat": {"responses": [{"status": 200, "content": "..."} | {"status": 500}
///                           | {"transport_error": "..."}],
///             "fail_positions": [3], "fail_status": 500,
///             "fallback": "synthetic" | "error"},
///    "embeddings": {"dimensions": 256}}
/// Scripted responses are served in order, one per request, before the
/// fallback takes over. An empty path yields the synthetic mock.
std::shared_ptr<MockTransport> load_mock_transport(const std::filesystem::path& script);

}  // namespace mdkeychunker
