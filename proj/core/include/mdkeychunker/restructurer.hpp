#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "mdkeychunker/model.hpp"

namespace mdkeychunker {

struct KeyGroup {
    std::string key;
    std::vector<std::size_t> indices;  // document order
};

struct KeyGrouping {
    std::vector<KeyGroup> groups;  // ordered by first occurrence
    std::vector<std::size_t> orphans;
};

KeyGrouping group_by_key(const std::vector<Chunk>& chunks);

/// First-fit packing in document order: an item joins the open bin iff
/// bin_size + item_size + 2 <= max_merged_size, otherwise it opens a new
/// bin. `sizes[i]` is the character count of `indices[i]`.
std::vector<std::vector<std::size_t>> bin_pack(const std::vector<std::size_t>& indices,
                                               const std::vector<std::size_t>& sizes,
                                               std::size_t max_merged_size);

inline constexpr std::string_view kMergeSeparator = "\n\n";

/// Concatenates member texts with a blank line and unions their metadata.
Chunk merge_bin(const std::vector<Chunk>& members);

/// Prepends "[Context: ...]" built from the section path and the neighbour
/// summaries when the orphan is shorter than `min_orphan_size`.
Chunk augment_orphan(Chunk chunk, std::string_view prev_summary, std::string_view next_summary,
                     std::size_t min_orphan_size);

/// First 16 hex chars of SHA-256("section|key|position|first 100 chars").
std::string compute_chunk_id(std::string_view section_title, std::string_view key, std::size_t position_index,
                             std::string_view text);

/// Exact token counter hook. Unset means floor(chars / 4).
using TokenCounter = std::function<std::size_t(std::string_view)>;

std::size_t estimate_tokens(std::string_view text, const TokenCounter& exact = {});

/// Assigns position indices, ids, navigation links and token counts.
/// Throws std::runtime_error on a duplicate chunk id.
void finalize(std::vector<Chunk>& chunks, const TokenCounter& counter = {});

struct RestructureStats {
    std::size_t chunks_before = 0;
    std::size_t chunks_after = 0;
    std::size_t key_groups = 0;
    std::size_t merged_groups = 0;            // groups with more than one member
    std::size_t chunks_in_merged_groups = 0;
    std::size_t bins = 0;
    std::size_t removed = 0;                  // sum over groups of (members - bins)
    std::size_t orphans = 0;
    std::size_t augmented_orphans = 0;
};

struct RestructuredDocument {
    std::vector<Chunk> chunks;
    RestructureStats stats;
};

/// Key grouping, bin packing, merging, orphan augmentation, ordering by
/// start_line and finalization. With merge_by_keys off every keyed chunk
/// stays a singleton.
RestructuredDocument restructure(const std::vector<Chunk>& chunks, const PipelineConfig& config,
                                 const TokenCounter& counter = {});

}  // namespace mdkeychunker
