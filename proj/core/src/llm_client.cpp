#include <httplib.h>

#include "mdkeychunker/llm_client.hpp"

#include <cmath>
#include <thread>

#include <spdlog/spdlog.h>

#include "mdkeychunker/text.hpp"

namespace mdkeychunker {
namespace {

constexpr std::size_t kEmbeddingBatch = 64;

bool retryable(const TransportResponse& r) {
    return !r.error.empty() || r.status == 429 || r.status >= 500;
}

std::string describe(const TransportResponse& r) {
    if (!r.error.empty()) return "transport error: " + r.error;
    return "HTTP " + std::to_string(r.status);
}

std::string strip_code_fences(std::string_view raw) {
    auto body = text::trim(raw);
    if (body.substr(0, 3) != "```" && body.substr(0, 3) != "~~~") return std::string(body);
    const auto fence = body.substr(0, 3);
    auto first_nl = body.find('\n');
    if (first_nl == std::string_view::npos) return {};
    body.remove_prefix(first_nl + 1);
    body = text::trim(body);
    if (body.size() >= 3 && body.substr(body.size() - 3) == fence) body.remove_suffix(3);
    return std::string(body);
}

}  // namespace

nlohmann::json ChatRequest::to_json() const {
    nlohmann::json messages_json = nlohmann::json::array();
    for (const auto& m : messages) messages_json.push_back({{"role", m.role}, {"content", m.content}});
    return {{"model", model}, {"messages", std::move(messages_json)}, {"temperature", temperature}};
}

double RetryPolicy::delay_after(int failed_attempt) const {
    return base_delay_seconds * std::pow(factor, failed_attempt - 1);
}

HttpTransport::HttpTransport(std::string base_url, std::string api_key, std::chrono::seconds read_timeout)
    : api_key_(std::move(api_key)), read_timeout_(read_timeout) {
    while (!base_url.empty() && base_url.back() == '/') base_url.pop_back();
    auto scheme_end = base_url.find("://");
    if (scheme_end == std::string::npos) {
        throw std::invalid_argument("LLM_BASE_URL must include a scheme: " + base_url);
    }
    auto path_start = base_url.find('/', scheme_end + 3);
    if (path_start == std::string::npos) {
        origin_ = base_url;
    } else {
        origin_ = base_url.substr(0, path_start);
        prefix_ = base_url.substr(path_start);
    }
}

TransportResponse HttpTransport::post_json(std::string_view path, const std::string& body) {
    httplib::Client client(origin_);
    client.set_connection_timeout(std::chrono::seconds(10));
    client.set_read_timeout(read_timeout_);
    httplib::Headers headers;
    if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);

    const std::string full_path = prefix_ + std::string(path);
    auto result = client.Post(full_path, headers, body, "application/json");
    if (!result) return {0, {}, httplib::to_string(result.error())};
    return {result->status, result->body, {}};
}

nlohmann::json extract_json(std::string_view raw) {
    const std::string body = strip_code_fences(raw);
    const auto open = body.find('{');
    const auto close = body.rfind('}');
    if (open == std::string::npos || close == std::string::npos || close < open) {
        throw UnparseableResponse("no JSON object in model response");
    }
    auto parsed = nlohmann::json::parse(body.substr(open, close - open + 1), nullptr, false);
    if (parsed.is_discarded() || !parsed.is_object()) {
        throw UnparseableResponse("model response is not a valid JSON object");
    }
    return parsed;
}

void real_sleep(double seconds) {
    if (seconds > 0) std::this_thread::sleep_for(std::chrono::duration<double>(seconds));
}

LlmClient::LlmClient(std::shared_ptr<Transport> transport, RetryPolicy policy, SleepFn sleep)
    : transport_(std::move(transport)), policy_(policy), sleep_(std::move(sleep)) {
    if (!transport_) throw std::invalid_argument("LlmClient requires a transport");
    if (policy_.max_attempts < 1) throw std::invalid_argument("max_attempts must be >= 1");
}

ChatOutcome LlmClient::complete_chat(const ChatRequest& request, const RetryPolicy& policy) const {
    if (request.messages.empty()) throw std::invalid_argument("chat request needs at least one message");
    const std::string body = request.to_json().dump();
    ChatOutcome outcome;

    for (int attempt = 1; attempt <= policy.max_attempts; ++attempt) {
        outcome.attempts = attempt;
        TransportResponse response = transport_->post_json("/chat/completions", body);

        if (response.error.empty() && response.status >= 200 && response.status < 300) {
            auto parsed = nlohmann::json::parse(response.body, nullptr, false);
            const nlohmann::json* content = nullptr;
            if (!parsed.is_discarded() && parsed.contains("choices") && parsed["choices"].is_array() &&
                !parsed["choices"].empty()) {
                const auto& choice = parsed["choices"][0];
                if (choice.contains("message") && choice["message"].contains("content") &&
                    choice["message"]["content"].is_string()) {
                    content = &choice["message"]["content"];
                }
            }
            if (content) {
                outcome.content = content->get<std::string>();
                return outcome;
            }
            outcome.failure = "malformed chat completion body";
        } else if (!retryable(response)) {
            outcome.failure = describe(response);
            spdlog::warn("chat completion failed with non-retryable {}", outcome.failure);
            return outcome;
        } else {
            outcome.failure = describe(response);
        }

        spdlog::debug("chat attempt {}/{} failed: {}", attempt, policy.max_attempts, outcome.failure);
        if (attempt < policy.max_attempts) {
            double delay = policy.delay_after(attempt);
            sleep_(delay);
            outcome.slept_seconds += delay;
        }
    }
    spdlog::warn("chat completion degraded after {} attempts: {}", outcome.attempts, outcome.failure);
    return outcome;
}

void l2_normalize(std::vector<double>& v) {
    double norm = 0.0;
    for (double x : v) norm += x * x;
    norm = std::sqrt(norm);
    if (!(norm > 0.0) || !std::isfinite(norm)) throw EmbeddingError("embedding vector has zero or invalid norm");
    for (double& x : v) x /= norm;
}

std::vector<std::vector<double>> LlmClient::embed_texts(const std::vector<std::string>& texts,
                                                        const std::string& model) const {
    if (texts.empty()) throw std::invalid_argument("embed_texts requires at least one input");
    std::vector<std::vector<double>> out;
    out.reserve(texts.size());

    for (std::size_t begin = 0; begin < texts.size(); begin += kEmbeddingBatch) {
        const std::size_t end = std::min(texts.size(), begin + kEmbeddingBatch);
        nlohmann::json request = {{"model", model},
                                  {"input", std::vector<std::string>(texts.begin() + static_cast<std::ptrdiff_t>(begin),
                                                                     texts.begin() + static_cast<std::ptrdiff_t>(end))}};
        const std::string body = request.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace);

        std::string failure;
        std::optional<std::vector<std::vector<double>>> batch;
        for (int attempt = 1; attempt <= policy_.max_attempts && !batch; ++attempt) {
            TransportResponse response = transport_->post_json("/embeddings", body);
            if (response.error.empty() && response.status >= 200 && response.status < 300) {
                auto parsed = nlohmann::json::parse(response.body, nullptr, false);
                try {
                    const auto& data = parsed.at("data");
                    if (!data.is_array() || data.size() != end - begin) {
                        throw EmbeddingError("embedding count mismatch");
                    }
                    std::vector<std::vector<double>> vectors(data.size());
                    for (std::size_t i = 0; i < data.size(); ++i) {
                        std::size_t slot = data[i].contains("index") ? data[i]["index"].get<std::size_t>() : i;
                        if (slot >= vectors.size()) throw EmbeddingError("embedding index out of range");
                        vectors[slot] = data[i].at("embedding").get<std::vector<double>>();
                    }
                    batch = std::move(vectors);
                    break;
                } catch (const std::exception& e) {
                    failure = std::string("malformed embeddings body: ") + e.what();
                }
            } else if (!retryable(response)) {
                throw EmbeddingError("embeddings request failed: " + describe(response));
            } else {
                failure = describe(response);
            }
            if (attempt < policy_.max_attempts) sleep_(policy_.delay_after(attempt));
        }
        if (!batch) throw EmbeddingError("embeddings request failed after retries: " + failure);
        for (auto& v : *batch) {
            l2_normalize(v);
            out.push_back(std::move(v));
        }
    }
    return out;
}

}  // namespace mdkeychunker
