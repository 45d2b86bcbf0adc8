#include "mdkeychunker/model.hpp"

#include <algorithm>
#include <array>

#include "mdkeychunker/text.hpp"

namespace mdkeychunker {
namespace {

constexpr std::array<std::pair<BlockType, std::string_view>, 6> kBlockNames{{
    {BlockType::header, "header"},
    {BlockType::code, "code"},
    {BlockType::table, "table"},
    {BlockType::list, "list"},
    {BlockType::blockquote, "blockquote"},
    {BlockType::paragraph, "paragraph"},
}};

constexpr std::array<std::pair<EntityType, std::string_view>, 7> kEntityNames{{
    {EntityType::PERSON, "PERSON"},
    {EntityType::ORG, "ORG"},
    {EntityType::LOC, "LOC"},
    {EntityType::TECH, "TECH"},
    {EntityType::CONCEPT, "CONCEPT"},
    {EntityType::EVENT, "EVENT"},
    {EntityType::METRIC, "METRIC"},
}};

}  // namespace

std::string_view to_string(BlockType type) noexcept {
    for (const auto& [t, name] : kBlockNames) {
        if (t == type) return name;
    }
    return "paragraph";
}

std::optional<BlockType> block_type_from_string(std::string_view name) noexcept {
    for (const auto& [t, n] : kBlockNames) {
        if (n == name) return t;
    }
    return std::nullopt;
}

std::string_view to_string(EntityType type) noexcept {
    for (const auto& [t, name] : kEntityNames) {
        if (t == type) return name;
    }
    return "CONCEPT";
}

std::optional<EntityType> entity_type_from_string(std::string_view name) noexcept {
    for (const auto& [t, n] : kEntityNames) {
        if (n == name) return t;
    }
    return std::nullopt;
}

void Chunk::apply(const EnrichmentResult& result) {
    title = result.title;
    summary = result.summary;
    keywords = result.keywords;
    entities = result.entities;
    questions = result.questions;
    key = result.key;
    related_keys = result.related_keys;
}

RollingKeyDict::RollingKeyDict(std::size_t capacity) : capacity_(capacity) {
    if (capacity_ == 0) throw std::invalid_argument("rolling key capacity must be >= 1");
}

std::optional<std::string> RollingKeyDict::update(const std::string& key, std::size_t chunk_index) {
    for (auto& [name, entry] : entries_) {
        if (name == key) {
            entry.count += 1;
            entry.last_chunk = chunk_index;
            return std::nullopt;
        }
    }
    entries_.emplace_back(key, RollingKeyEntry{chunk_index, chunk_index, 1});
    if (entries_.size() <= capacity_) return std::nullopt;

    auto victim = std::min_element(entries_.begin(), entries_.end(), [](const Item& a, const Item& b) {
        if (a.second.last_chunk != b.second.last_chunk) return a.second.last_chunk < b.second.last_chunk;
        return a.second.first_chunk < b.second.first_chunk;
    });
    std::string evicted = std::move(victim->first);
    entries_.erase(victim);
    return evicted;
}

const RollingKeyEntry* RollingKeyDict::find(std::string_view key) const noexcept {
    for (const auto& [name, entry] : entries_) {
        if (name == key) return &entry;
    }
    return nullptr;
}

std::vector<std::string> RollingKeyDict::key_names() const {
    std::vector<std::string> names;
    names.reserve(entries_.size());
    for (const auto& item : entries_) names.push_back(item.first);
    return names;
}

void PipelineConfig::validate() const {
    if (min_chunk_size >= max_chunk_size) {
        throw std::invalid_argument("MIN_CHUNK_SIZE must be smaller than MAX_CHUNK_SIZE");
    }
    if (max_chunk_size >= max_merged_size) {
        throw std::invalid_argument("MAX_MERGED_SIZE must be larger than MAX_CHUNK_SIZE");
    }
    if (min_orphan_size == 0) throw std::invalid_argument("MIN_ORPHAN_SIZE must be positive");
    if (rolling_key_capacity == 0) throw std::invalid_argument("rolling key capacity must be >= 1");
    if (retry.max_attempts < 1) throw std::invalid_argument("retry max_attempts must be >= 1");
    if (retry.base_delay_seconds < 0.0 || retry.factor < 0.0) {
        throw std::invalid_argument("retry delays must be nonnegative");
    }
}

std::size_t word_count(std::string_view normalized) {
    std::size_t words = 0;
    bool in_word = false;
    for (char c : normalized) {
        bool space = c == ' ' || c == '\t' || c == '\n' || c == '\r';
        if (!space && !in_word) ++words;
        in_word = !space;
    }
    return words;
}

std::string normalize_key(std::string_view raw) {
    std::string key = text::collapse_whitespace_lower(raw);
    if (word_count(key) < 2) return {};
    return key;
}

}  // namespace mdkeychunker
