#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace mdkeychunker {

enum class BlockType { header, code, table, list, blockquote, paragraph };

std::string_view to_string(BlockType type) noexcept;
std::optional<BlockType> block_type_from_string(std::string_view name) noexcept;

struct Block {
    BlockType type = BlockType::paragraph;
    std::string content;  // raw source lines, newline-joined
    int start_line = 0;   // 1-based, inclusive
    int end_line = 0;
    std::optional<int> heading_level;  // set iff type == header

    bool operator==(const Block&) const = default;
};

enum class EntityType { PERSON, ORG, LOC, TECH, CONCEPT, EVENT, METRIC };

std::string_view to_string(EntityType type) noexcept;
std::optional<EntityType> entity_type_from_string(std::string_view name) noexcept;

struct Entity {
    std::string name;
    EntityType type = EntityType::CONCEPT;

    bool operator==(const Entity&) const = default;
};

/// The seven metadata fields produced by one enrichment call.
struct EnrichmentResult {
    std::string title;
    std::string summary;
    std::vector<std::string> keywords;
    std::vector<Entity> entities;
    std::vector<std::string> questions;
    std::string key;  // normalized; empty when absent or rejected
    std::vector<std::string> related_keys;

    bool operator==(const EnrichmentResult&) const = default;
};

struct Chunk {
    std::string chunk_id;  // 16 lowercase hex chars once finalized
    std::string text;
    std::string section_title;

    std::string title;
    std::string summary;
    std::vector<std::string> keywords;
    std::vector<Entity> entities;
    std::vector<std::string> questions;
    std::string key;
    std::vector<std::string> related_keys;

    std::set<BlockType> content_types;
    std::size_t position_index = 0;
    std::optional<std::string> previous_chunk_id;
    std::optional<std::string> next_chunk_id;
    std::size_t token_count = 0;
    int start_line = 0;
    int end_line = 0;
    std::string source_document;

    void apply(const EnrichmentResult& result);

    bool operator==(const Chunk&) const = default;
};

struct RollingKeyEntry {
    std::size_t first_chunk = 0;
    std::size_t last_chunk = 0;
    std::size_t count = 1;

    bool operator==(const RollingKeyEntry&) const = default;
};

inline constexpr std::size_t kDefaultRollingKeyCapacity = 40;

/// Capacity-bounded map of semantic keys seen so far in a document, kept in
/// insertion order. When an insert pushes the size past capacity, the entry
/// with the smallest last_chunk is evicted (ties: smallest first_chunk).
class RollingKeyDict {
public:
    using Item = std::pair<std::string, RollingKeyEntry>;

    explicit RollingKeyDict(std::size_t capacity = kDefaultRollingKeyCapacity);

    /// Records `key` as seen at `chunk_index`. Returns the evicted key, if any.
    std::optional<std::string> update(const std::string& key, std::size_t chunk_index);

    const RollingKeyEntry* find(std::string_view key) const noexcept;
    bool contains(std::string_view key) const noexcept { return find(key) != nullptr; }

    const std::vector<Item>& entries() const noexcept { return entries_; }
    std::vector<std::string> key_names() const;
    std::size_t size() const noexcept { return entries_.size(); }
    bool empty() const noexcept { return entries_.empty(); }
    std::size_t capacity() const noexcept { return capacity_; }
    void clear() noexcept { entries_.clear(); }

private:
    std::size_t capacity_;
    std::vector<Item> entries_;
};

struct LlmSettings {
    std::string provider = "openai";
    std::string base_url;
    std::string api_key;
    std::string model = "gpt-4o-mini";
    std::string mock_script;  // only read when provider == "mock"
};

struct RetrySettings {
    int max_attempts = 3;
    double base_delay_seconds = 1.0;
    double factor = 2.0;
};

struct PipelineConfig {
    std::size_t min_chunk_size = 100;     // tau_min
    std::size_t max_chunk_size = 1500;    // tau_max (soft)
    bool merge_by_keys = true;
    std::size_t max_merged_size = 3000;   // tau_merge
    std::size_t min_orphan_size = 200;    // tau_orphan
    std::size_t rolling_key_capacity = kDefaultRollingKeyCapacity;
    bool rolling_keys_enabled = true;
    LlmSettings llm;
    RetrySettings retry;
    std::string log_level = "INFO";

    /// Throws std::invalid_argument naming the first violated constraint.
    void validate() const;
};

/// Lowercases, trims and collapses whitespace. Returns "" for keys with
/// fewer than two words.
std::string normalize_key(std::string_view raw);

std::size_t word_count(std::string_view normalized);

}  // namespace mdkeychunker
