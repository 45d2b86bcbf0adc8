#include "mdkeychunker/chunk_json.hpp"

#include <stdexcept>

namespace mdkeychunker {
namespace {

nlohmann::ordered_json nullable(const std::optional<std::string>& v) {
    if (v) return *v;
    return nullptr;
}

std::optional<std::string> nullable_from(const nlohmann::json& j) {
    if (j.is_null()) return std::nullopt;
    return j.get<std::string>();
}

}  // namespace

nlohmann::ordered_json chunk_to_json(const Chunk& chunk) {
    nlohmann::ordered_json j;
    j["chunk_id"] = chunk.chunk_id;
    j["text"] = chunk.text;
    j["section_title"] = chunk.section_title;
    j["title"] = chunk.title;
    j["summary"] = chunk.summary;
    j["keywords"] = chunk.keywords;
    auto entities = nlohmann::ordered_json::array();
    for (const auto& e : chunk.entities) {
        entities.push_back({{"name", e.name}, {"type", std::string(to_string(e.type))}});
    }
    j["entities"] = std::move(entities);
    j["questions"] = chunk.questions;
    j["key"] = chunk.key;
    j["related_keys"] = chunk.related_keys;
    auto types = nlohmann::ordered_json::array();
    for (BlockType t : chunk.content_types) types.push_back(std::string(to_string(t)));
    j["content_types"] = std::move(types);
    j["position_index"] = chunk.position_index;
    j["previous_chunk_id"] = nullable(chunk.previous_chunk_id);
    j["next_chunk_id"] = nullable(chunk.next_chunk_id);
    j["token_count"] = chunk.token_count;
    j["start_line"] = chunk.start_line;
    j["end_line"] = chunk.end_line;
    j["source_document"] = chunk.source_document;
    return j;
}

Chunk chunk_from_json(const nlohmann::json& j) {
    Chunk c;
    c.chunk_id = j.at("chunk_id").get<std::string>();
    c.text = j.at("text").get<std::string>();
    c.section_title = j.at("section_title").get<std::string>();
    c.title = j.at("title").get<std::string>();
    c.summary = j.at("summary").get<std::string>();
    c.keywords = j.at("keywords").get<std::vector<std::string>>();
    for (const auto& e : j.at("entities")) {
        auto type = entity_type_from_string(e.at("type").get<std::string>());
        if (!type) throw std::invalid_argument("unknown entity type: " + e.at("type").dump());
        c.entities.push_back({e.at("name").get<std::string>(), *type});
    }
    c.questions = j.at("questions").get<std::vector<std::string>>();
    c.key = j.at("key").get<std::string>();
    c.related_keys = j.at("related_keys").get<std::vector<std::string>>();
    for (const auto& t : j.at("content_types")) {
        auto type = block_type_from_string(t.get<std::string>());
        if (!type) throw std::invalid_argument("unknown content type: " + t.dump());
        c.content_types.insert(*type);
    }
    c.position_index = j.at("position_index").get<std::size_t>();
    c.previous_chunk_id = nullable_from(j.at("previous_chunk_id"));
    c.next_chunk_id = nullable_from(j.at("next_chunk_id"));
    c.token_count = j.at("token_count").get<std::size_t>();
    c.start_line = j.at("start_line").get<int>();
    c.end_line = j.at("end_line").get<int>();
    c.source_document = j.value("source_document", std::string{});
    return c;
}

std::string serialize_chunks(const std::vector<Chunk>& chunks) {
    auto arr = nlohmann::ordered_json::array();
    for (const auto& c : chunks) arr.push_back(chunk_to_json(c));
    return arr.dump(2, ' ', false, nlohmann::json::error_handler_t::replace) + "\n";
}

std::vector<Chunk> parse_chunks(std::string_view json_text) {
    auto j = nlohmann::json::parse(json_text);
    if (!j.is_array()) throw std::invalid_argument("chunk document must be a JSON array");
    std::vector<Chunk> out;
    out.reserve(j.size());
    for (const auto& item : j) out.push_back(chunk_from_json(item));
    return out;
}

}  // namespace mdkeychunker
