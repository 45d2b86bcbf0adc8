#pragma once

#include <cstddef>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "mdkeychunker/llm_client.hpp"
#include "mdkeychunker/model.hpp"

namespace mdkeychunker {

/// Fills the enrichment prompt template. `index` is 1-based. Rolling keys
/// are listed in insertion order, or "(none yet)" when the dictionary is
/// empty or rolling keys are disabled.
std::string format_prompt(const Chunk& chunk, std::size_t index, std::size_t total,
                          std::string_view prev_summary, const RollingKeyDict& keys,
                          bool rolling_keys_enabled = true);

/// Splits a formatted prompt into the system preamble (first paragraph) and
/// the user message (everything after it).
ChatRequest make_enrichment_request(const std::string& prompt, const std::string& model);

/// Maps a model reply onto the seven fields. Total: missing or mistyped
/// fields become empty, single-word keys are dropped, related_keys outside
/// `allowed_keys` are filtered out and unknown entity types become CONCEPT.
EnrichmentResult parse_enrichment(const nlohmann::json& raw, const std::set<std::string>& allowed_keys);

/// Insert-or-touch followed by least-recently-seen eviction. Returns the
/// evicted key, if any.
std::optional<std::string> update_rolling_keys(RollingKeyDict& dict, const std::string& key,
                                               std::size_t index);

struct EnrichStats {
    std::size_t chunks = 0;
    std::size_t llm_calls = 0;
    std::size_t degraded = 0;
    std::size_t evictions = 0;
    std::vector<std::size_t> degraded_positions;        // 1-based
    std::vector<std::vector<std::string>> prompt_keys;  // rolling keys offered to each chunk
};

struct EnrichedDocument {
    std::vector<Chunk> chunks;
    EnrichStats stats;
};

/// Sequential single-call enrichment of one document. The rolling key
/// dictionary starts empty for every call.
EnrichedDocument enrich_document(std::vector<Chunk> chunks, const PipelineConfig& config,
                                 const LlmClient& client);

}  // namespace mdkeychunker
