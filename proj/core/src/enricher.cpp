#include "mdkeychunker/enricher.hpp"

#include <algorithm>
#include <cctype>

#include <spdlog/spdlog.h>

#include "mdkeychunker/text.hpp"

namespace mdkeychunker {
namespace {

constexpr std::string_view kPreamble =
    "You are a document analysis expert. Analyze this text chunk\n"
    "from a Markdown document and extract structured metadata\n"
    "for a RAG system.\n";

constexpr std::string_view kInstructions =
    "Extract the following in a single JSON response:\n"
    "{\n"
    "  \"title\": \"short descriptive title (3-8 words)\",\n"
    "  \"summary\": \"1-2 sentence summary (30-60 words). Focus on\n"
    "              what makes this chunk UNIQUE.\",\n"
    "  \"keywords\": [\"5-8 salient domain-specific terms\"],\n"
    "  \"entities\": [{\"name\": \"...\",\n"
    "                \"type\": \"PERSON|ORG|LOC|TECH|CONCEPT|EVENT|METRIC\"}],\n"
    "  \"questions\": [\"2-3 specific questions this chunk answers\"],\n"
    "  \"key\": \"specific subtopic, 2-5 words, lowercase\",\n"
    "  \"related_keys\": [\"0-3 keys from rolling keys referenced here\"]\n"
    "}\n"
    "Rules:\n"
    "- key must DISTINGUISH this chunk (never a single word or\n"
    "  broad document topic)\n"
    "- related_keys must be a SUBSET of the rolling keys provided\n"
    "- Return ONLY valid JSON, no extra text";

std::string string_field(const nlohmann::json& raw, const char* name) {
    auto it = raw.find(name);
    if (it == raw.end() || !it->is_string()) return {};
    return std::string(text::trim(it->get<std::string>()));
}

std::vector<std::string> string_list(const nlohmann::json& raw, const char* name) {
    std::vector<std::string> out;
    auto it = raw.find(name);
    if (it == raw.end() || !it->is_array()) return out;
    for (const auto& item : *it) {
        if (!item.is_string()) continue;
        auto value = text::trim(item.get_ref<const std::string&>());
        if (!value.empty()) out.emplace_back(value);
    }
    return out;
}

std::vector<Entity> entity_list(const nlohmann::json& raw) {
    std::vector<Entity> out;
    auto it = raw.find("entities");
    if (it == raw.end() || !it->is_array()) return out;
    for (const auto& item : *it) {
        if (!item.is_object()) continue;
        std::string name = string_field(item, "name");
        if (name.empty()) continue;
        std::string type_name = string_field(item, "type");
        std::string upper = type_name;
        for (char& c : upper) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
        auto type = entity_type_from_string(upper);
        if (!type) {
            spdlog::warn("entity '{}' has unknown type '{}', using CONCEPT", name, type_name);
            type = EntityType::CONCEPT;
        }
        out.push_back({std::move(name), *type});
    }
    return out;
}

}  // namespace

std::string format_prompt(const Chunk& chunk, std::size_t index, std::size_t total,
                          std::string_view prev_summary, const RollingKeyDict& keys,
                          bool rolling_keys_enabled) {
    std::string rolling;
    if (!rolling_keys_enabled || keys.empty()) {
        rolling = "(none yet)";
    } else {
        for (const auto& [name, entry] : keys.entries()) {
            if (!rolling.empty()) rolling.push_back('\n');
            rolling += "- " + name + " (chunks " + std::to_string(entry.first_chunk) + "–" +
                       std::to_string(entry.last_chunk) + ", seen " + std::to_string(entry.count) + "×)";
        }
    }

    std::string prompt;
    prompt.reserve(chunk.text.size() + rolling.size() + 1500);
    prompt.append(kPreamble);
    prompt.append("\nSection Path: ").append(chunk.section_title);
    prompt.append("\nChunk Position: ")
        .append(std::to_string(index))
        .append(" of ")
        .append(std::to_string(total))
        .append(" chunks");
    prompt.append("\nPrevious Chunk Summary: ").append(prev_summary.empty() ? "(none)" : prev_summary);
    prompt.append("\n\nChunk Text:\n").append(chunk.text);
    prompt.append("\nRolling Keys (specific subtopics seen in previous chunks):\n").append(rolling);
    prompt.append("\n\n").append(kInstructions);
    return prompt;
}

ChatRequest make_enrichment_request(const std::string& prompt, const std::string& model) {
    ChatRequest request;
    request.model = model;
    auto split = prompt.find("\n\n");
    if (split == std::string::npos) {
        request.messages.push_back({"user", prompt});
    } else {
        request.messages.push_back({"system", prompt.substr(0, split)});
        request.messages.push_back({"user", prompt.substr(split + 2)});
    }
    return request;
}

EnrichmentResult parse_enrichment(const nlohmann::json& raw, const std::set<std::string>& allowed_keys) {
    EnrichmentResult result;
    if (!raw.is_object()) return result;
    result.title = string_field(raw, "title");
    result.summary = string_field(raw, "summary");
    result.keywords = string_list(raw, "keywords");
    result.entities = entity_list(raw);
    result.questions = string_list(raw, "questions");

    const std::string raw_key = string_field(raw, "key");
    result.key = normalize_key(raw_key);
    if (result.key.empty() && !raw_key.empty()) {
        spdlog::debug("rejected single-word key '{}'", raw_key);
    } else if (word_count(result.key) > 5) {
        spdlog::warn("key '{}' has more than five words", result.key);
    }

    for (const auto& related : string_list(raw, "related_keys")) {
        std::string normalized = text::collapse_whitespace_lower(related);
        if (!allowed_keys.contains(normalized)) continue;
        if (std::find(result.related_keys.begin(), result.related_keys.end(), normalized) !=
            result.related_keys.end()) {
            continue;
        }
        result.related_keys.push_back(std::move(normalized));
    }
    return result;
}

std::optional<std::string> update_rolling_keys(RollingKeyDict& dict, const std::string& key,
                                               std::size_t index) {
    return dict.update(key, index);
}

EnrichedDocument enrich_document(std::vector<Chunk> chunks, const PipelineConfig& config,
                                 const LlmClient& client) {
    EnrichedDocument doc;
    doc.stats.chunks = chunks.size();
    RollingKeyDict keys(config.rolling_key_capacity);
    const RetryPolicy policy = RetryPolicy::from(config.retry);
    std::string prev_summary;

    for (std::size_t i = 0; i < chunks.size(); ++i) {
        Chunk& chunk = chunks[i];
        const std::size_t position = i + 1;
        const std::string prompt =
            format_prompt(chunk, position, chunks.size(), prev_summary, keys, config.rolling_keys_enabled);

        std::set<std::string> allowed;
        if (config.rolling_keys_enabled) {
            auto names = keys.key_names();
            allowed.insert(names.begin(), names.end());
            doc.stats.prompt_keys.push_back(std::move(names));
        } else {
            doc.stats.prompt_keys.emplace_back();
        }

        ChatOutcome outcome = client.complete_chat(make_enrichment_request(prompt, config.llm.model), policy);
        doc.stats.llm_calls += 1;

        std::optional<EnrichmentResult> result;
        if (outcome.content) {
            try {
                result = parse_enrichment(extract_json(*outcome.content), allowed);
            } catch (const UnparseableResponse& e) {
                spdlog::warn("chunk {}/{}: {}", position, chunks.size(), e.what());
            }
        }

        if (!result) {
            doc.stats.degraded += 1;
            doc.stats.degraded_positions.push_back(position);
            prev_summary.clear();
            continue;
        }

        chunk.apply(*result);
        prev_summary = chunk.summary;
        if (config.rolling_keys_enabled && !chunk.key.empty()) {
            if (update_rolling_keys(keys, chunk.key, position)) doc.stats.evictions += 1;
        }
    }
    doc.chunks = std::move(chunks);
    return doc;
}

}  // namespace mdkeychunker
