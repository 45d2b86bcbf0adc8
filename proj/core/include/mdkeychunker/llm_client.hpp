#pragma once

#include <chrono>
#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "mdkeychunker/model.hpp"

namespace mdkeychunker {

struct ChatMessage {
    std::string role;  // "system" or "user"
    std::string content;
};

struct ChatRequest {
    std::string model;
    std::vector<ChatMessage> messages;
    double temperature = 0.0;

    nlohmann::json to_json() const;
};

struct RetryPolicy {
    int max_attempts = 3;
    double base_delay_seconds = 1.0;
    double factor = 2.0;

    static RetryPolicy from(const RetrySettings& s) {
        return {s.max_attempts, s.base_delay_seconds, s.factor};
    }

    /// Delay before the attempt that follows failed attempt `failed_attempt` (1-based).
    double delay_after(int failed_attempt) const;
};

/// Outcome of one POST. `error` is non-empty for transport-level failures
/// (connection refused, timeout), in which case `status` is 0.
struct TransportResponse {
    int status = 0;
    std::string body;
    std::string error;
};

class Transport {
public:
    virtual ~Transport() = default;

    /// POST a JSON body to `path` (relative to the endpoint base URL).
    virtual TransportResponse post_json(std::string_view path, const std::string& body) = 0;
};

/// OpenAI-compatible HTTP(S) endpoint. A fresh connection is opened per
/// request, so one instance may serve concurrent callers.
class HttpTransport final : public Transport {
public:
    HttpTransport(std::string base_url, std::string api_key,
                  std::chrono::seconds read_timeout = std::chrono::seconds(300));

    TransportResponse post_json(std::string_view path, const std::string& body) override;

    const std::string& origin() const noexcept { return origin_; }
    const std::string& path_prefix() const noexcept { return prefix_; }

private:
    std::string origin_;  // scheme://host[:port]
    std::string prefix_;  // e.g. "/v1"
    std::string api_key_;
    std::chrono::seconds read_timeout_;
};

class UnparseableResponse : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class EmbeddingError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Pulls a JSON object out of a model reply: surrounding code fences are
/// dropped, then the text from the first '{' to the last '}' is parsed.
/// Throws UnparseableResponse.
nlohmann::json extract_json(std::string_view raw);

struct ChatOutcome {
    std::optional<std::string> content;  // nullopt = degraded
    int attempts = 0;
    double slept_seconds = 0.0;
    std::string failure;  // last failure description when degraded

    bool degraded() const noexcept { return !content.has_value(); }
};

using SleepFn = std::function<void(double seconds)>;

void real_sleep(double seconds);

class LlmClient {
public:
    explicit LlmClient(std::shared_ptr<Transport> transport, RetryPolicy policy = {},
                       SleepFn sleep = real_sleep);

    /// Never throws for endpoint failures: after the retry budget (or on a
    /// non-retryable 4xx) the outcome is degraded.
    ChatOutcome complete_chat(const ChatRequest& request, const RetryPolicy& policy) const;
    ChatOutcome complete_chat(const ChatRequest& request) const { return complete_chat(request, policy_); }

    /// One unit-norm vector per input, in input order. Throws
    /// std::invalid_argument on empty input and EmbeddingError on endpoint
    /// failure after retries.
    std::vector<std::vector<double>> embed_texts(const std::vector<std::string>& texts,
                                                 const std::string& model) const;

    const RetryPolicy& policy() const noexcept { return policy_; }

private:
    std::shared_ptr<Transport> transport_;
    RetryPolicy policy_;
    SleepFn sleep_;
};

/// Scales `v` to unit L2 norm in place. Throws EmbeddingError on a zero vector.
void l2_normalize(std::vector<double>& v);

}  // namespace mdkeychunker
