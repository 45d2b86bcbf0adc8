#include "mdkeychunker/mock_provider.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>

#include "mdkeychunker/text.hpp"

namespace mdkeychunker {
namespace {

constexpr std::string_view kTextMarker = "\n\nChunk Text:\n";
constexpr std::string_view kKeysMarker = "\nRolling Keys (specific subtopics seen in previous chunks):\n";
constexpr std::string_view kExtractMarker = "\n\nExtract the following";

const std::set<std::string>& stopwords() {
    static const std::set<std::string> words{
        "about", "after", "also",  "because", "been",  "before", "being", "between", "both",  "code",
        "does",  "each",  "from",  "have",    "into",  "more",   "most",  "must",    "only",  "other",
        "over",  "same",  "should", "some",   "such",  "than",   "that",  "their",   "them",  "then",
        "there", "these", "they",  "this",    "those", "through", "under", "used",   "uses",  "using",
        "very",  "were",  "what",  "when",    "where", "which",  "while", "will",    "with",  "would",
        "your",  "true",  "false", "null",    "none",  "here",   "just",  "like",    "make",  "many",
    };
    return words;
}

std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 1469598103934665603ULL;
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ULL;
    }
    return h;
}

// Markdown punctuation replaced by spaces, whitespace collapsed.
std::string plain_words(std::string_view s) {
    std::string cleaned;
    cleaned.reserve(s.size());
    for (char c : s) {
        bool markup = c == '#' || c == '*' || c == '`' || c == '|' || c == '>' || c == '_' || c == '~' ||
                      c == '[' || c == ']' || c == '\n' || c == '\t' || c == '\r';
        cleaned.push_back(markup ? ' ' : c);
    }
    std::string out;
    bool space = false;
    for (char c : text::trim(cleaned)) {
        if (c == ' ') {
            space = true;
            continue;
        }
        if (space) out.push_back(' ');
        space = false;
        out.push_back(c);
    }
    return out;
}

std::vector<std::string> first_words(std::string_view s, std::size_t n) {
    std::vector<std::string> words;
    std::istringstream in{std::string(s)};
    std::string w;
    while (words.size() < n && in >> w) words.push_back(w);
    return words;
}

std::string last_segment(std::string_view path) {
    auto pos = path.rfind(" > ");
    if (pos == std::string_view::npos) return std::string(path);
    return std::string(path.substr(pos + 3));
}

std::vector<std::string> top_keywords(std::string_view chunk_text, std::size_t n) {
    std::map<std::string, std::pair<std::size_t, std::size_t>> freq;  // token -> (count, first seen)
    std::size_t order = 0;
    for (auto& tok : text::tokenize(chunk_text)) {
        if (tok.size() < 4 || stopwords().contains(tok)) continue;
        if (std::all_of(tok.begin(), tok.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); })) {
            continue;
        }
        auto [it, inserted] = freq.try_emplace(tok, 0, order++);
        it->second.first += 1;
    }
    std::vector<std::pair<std::string, std::pair<std::size_t, std::size_t>>> ranked(freq.begin(), freq.end());
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
        if (a.second.first != b.second.first) return a.second.first > b.second.first;
        return a.second.second < b.second.second;
    });
    std::vector<std::string> out;
    for (std::size_t i = 0; i < ranked.size() && out.size() < n; ++i) out.push_back(ranked[i].first);
    return out;
}

TransportResponse status_only(int status) {
    return {status, R"({"error":{"message":"mock failure"}})", {}};
}

}  // namespace

MockTransport::MockTransport(Handler chat, Handler embeddings)
    : chat_(std::move(chat)), embeddings_(std::move(embeddings)) {}

TransportResponse MockTransport::post_json(std::string_view path, const std::string& body) {
    auto request = nlohmann::json::parse(body, nullptr, false);
    if (request.is_discarded()) return status_only(400);
    if (path == "/chat/completions") {
        chat_calls_ += 1;
        return chat_ ? chat_(request) : status_only(404);
    }
    if (path == "/embeddings") {
        embedding_calls_ += 1;
        return embeddings_ ? embeddings_(request) : status_only(404);
    }
    return status_only(404);
}

TransportResponse chat_response(const std::string& content) {
    nlohmann::json body = {
        {"object", "chat.completion"},
        {"choices", {{{"index", 0}, {"message", {{"role", "assistant"}, {"content", content}}}}}},
    };
    return {200, body.dump(-1, ' ', false, nlohmann::json::error_handler_t::replace), {}};
}

TransportResponse embeddings_response(const std::vector<std::vector<double>>& vectors) {
    nlohmann::json data = nlohmann::json::array();
    for (std::size_t i = 0; i < vectors.size(); ++i) {
        data.push_back({{"object", "embedding"}, {"index", i}, {"embedding", vectors[i]}});
    }
    return {200, nlohmann::json{{"object", "list"}, {"data", std::move(data)}}.dump(), {}};
}

std::string last_message(const nlohmann::json& request) {
    if (!request.contains("messages") || request["messages"].empty()) return {};
    const auto& msg = request["messages"].back();
    return msg.value("content", std::string{});
}

PromptView parse_prompt(std::string_view prompt) {
    PromptView view;
    auto line_after = [&](std::string_view label) -> std::string_view {
        auto pos = prompt.find(label);
        if (pos == std::string_view::npos) return {};
        auto start = pos + label.size();
        auto end = prompt.find('\n', start);
        return prompt.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start);
    };
    view.section_path = std::string(line_after("Section Path: "));
    auto position = line_after("Chunk Position: ");
    std::istringstream pos_in{std::string(position)};
    std::string of;
    pos_in >> view.position >> of >> view.total;

    auto text_start = prompt.find(kTextMarker);
    auto keys_start = prompt.rfind(kKeysMarker);
    if (text_start != std::string_view::npos && keys_start != std::string_view::npos && keys_start >= text_start) {
        auto begin = text_start + kTextMarker.size();
        view.chunk_text = std::string(prompt.substr(begin, keys_start - begin));
        auto keys_begin = keys_start + kKeysMarker.size();
        auto keys_end = prompt.find(kExtractMarker, keys_begin);
        for (auto line : text::split_lines(prompt.substr(keys_begin, keys_end - keys_begin))) {
            if (line.substr(0, 2) != "- ") continue;
            auto name_end = line.rfind(" (chunks ");
            view.rolling_keys.emplace_back(line.substr(2, name_end == std::string_view::npos ? line.npos : name_end - 2));
        }
    }
    return view;
}

nlohmann::json synthetic_enrichment(const PromptView& prompt) {
    const std::string plain = plain_words(prompt.chunk_text);
    const std::string section = last_segment(prompt.section_path);
    auto keywords = top_keywords(prompt.chunk_text, 5);

    std::string title = plain_words(section);
    if (title.empty()) title = text::join(first_words(plain, 6), " ");
    if (title.empty()) title = "Untitled chunk";

    auto key_words = text::tokenize(section);
    if (key_words.size() > 5) key_words.resize(5);
    if (key_words.empty()) {
        key_words.assign(keywords.begin(), keywords.begin() + static_cast<std::ptrdiff_t>(std::min<std::size_t>(2, keywords.size())));
    }
    if (key_words.empty()) key_words.push_back("general");
    if (key_words.size() == 1) key_words.push_back("overview");
    const std::string key = text::join(key_words, " ");

    if (keywords.empty()) keywords = text::tokenize(title);
    if (keywords.empty()) keywords.push_back("content");

    auto summary_words = first_words(plain, 30);
    std::string summary = summary_words.empty() ? "Empty chunk." : text::join(summary_words, " ") + ".";

    nlohmann::json entities = nlohmann::json::array();
    std::set<std::string> seen;
    std::istringstream words_in{plain};
    std::string word;
    while (entities.size() < 3 && words_in >> word) {
        while (!word.empty() && !std::isalnum(static_cast<unsigned char>(word.back()))) word.pop_back();
        while (!word.empty() && !std::isalnum(static_cast<unsigned char>(word.front()))) word.erase(0, 1);
        if (word.size() < 3 || !std::isupper(static_cast<unsigned char>(word[0])) || !seen.insert(word).second) continue;
        bool all_caps = std::all_of(word.begin(), word.end(), [](char c) {
            return std::isupper(static_cast<unsigned char>(c)) || std::isdigit(static_cast<unsigned char>(c));
        });
        entities.push_back({{"name", word}, {"type", all_caps ? "TECH" : "CONCEPT"}});
    }
    if (entities.empty()) entities.push_back({{"name", title}, {"type", "CONCEPT"}});

    std::vector<std::string> related;
    for (auto it = prompt.rolling_keys.rbegin(); it != prompt.rolling_keys.rend() && related.size() < 3; ++it) {
        if (*it != key) related.push_back(*it);
    }
    if (related.empty() && !prompt.rolling_keys.empty()) related.push_back(prompt.rolling_keys.back());

    nlohmann::json questions = nlohmann::json::array();
    questions.push_back("What does the " + title + " section explain?");
    questions.push_back("How does " + keywords.front() + " relate to " + title + "?");

    return {
        {"title", title},
        {"summary", summary},
        {"keywords", keywords},
        {"entities", entities},
        {"questions", questions},
        {"key", key},
        {"related_keys", related},
    };
}

std::vector<double> hashed_embedding(std::string_view chunk_text, std::size_t dimensions) {
    std::vector<double> v(dimensions, 0.0);
    auto tokens = text::tokenize(chunk_text);
    if (tokens.empty()) tokens.emplace_back("<empty>");
    for (const auto& tok : tokens) {
        std::uint64_t h = fnv1a(tok);
        v[h % dimensions] += 1.0;
    }
    return v;
}

std::shared_ptr<MockTransport> make_synthetic_transport(std::size_t dimensions) {
    auto chat = [](const nlohmann::json& request) {
        return chat_response(synthetic_enrichment(parse_prompt(last_message(request))).dump());
    };
    auto embed = [dimensions](const nlohmann::json& request) {
        std::vector<std::vector<double>> vectors;
        for (const auto& input : request.at("input")) vectors.push_back(hashed_embedding(input.get<std::string>(), dimensions));
        return embeddings_response(vectors);
    };
    return std::make_shared<MockTransport>(chat, embed);
}

std::shared_ptr<MockTransport> load_mock_transport(const std::filesystem::path& script) {
    if (script.empty()) return make_synthetic_transport();
    std::ifstream in(script);
    if (!in) throw std::runtime_error("cannot read mock script " + script.string());
    nlohmann::json doc = nlohmann::json::parse(in);

    const nlohmann::json chat_script = doc.value("chat", nlohmann::json::object());
    const std::size_t dims = doc.value("embeddings", nlohmann::json::object()).value("dimensions", std::size_t{256});

    struct ChatScript {
        std::mutex mutex;
        std::vector<nlohmann::json> responses;
        std::size_t next = 0;
        std::set<std::size_t> fail_positions;
        int fail_status = 500;
        bool synthetic_fallback = true;
    };
    auto state = std::make_shared<ChatScript>();
    for (const auto& r : chat_script.value("responses", nlohmann::json::array())) state->responses.push_back(r);
    for (const auto& p : chat_script.value("fail_positions", nlohmann::json::array())) {
        state->fail_positions.insert(p.get<std::size_t>());
    }
    state->fail_status = chat_script.value("fail_status", 500);
    state->synthetic_fallback = chat_script.value("fallback", std::string("synthetic")) == "synthetic";

    auto chat = [state](const nlohmann::json& request) -> TransportResponse {
        PromptView prompt = parse_prompt(last_message(request));
        {
            std::lock_guard lock(state->mutex);
            if (state->next < state->responses.size()) {
                const auto& r = state->responses[state->next++];
                if (r.contains("transport_error")) return {0, {}, r["transport_error"].get<std::string>()};
                int status = r.value("status", 200);
                if (status >= 200 && status < 300 && r.contains("content")) {
                    return chat_response(r["content"].get<std::string>());
                }
                return status_only(status);
            }
        }
        if (state->fail_positions.contains(prompt.position)) return status_only(state->fail_status);
        if (!state->synthetic_fallback) return status_only(500);
        return chat_response(synthetic_enrichment(prompt).dump());
    };
    auto embed = [dims](const nlohmann::json& request) {
        std::vector<std::vector<double>> vectors;
        for (const auto& input : request.at("input")) vectors.push_back(hashed_embedding(input.get<std::string>(), dims));
        return embeddings_response(vectors);
    };
    return std::make_shared<MockTransport>(chat, embed);
}

}  // namespace mdkeychunker
