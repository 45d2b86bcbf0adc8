#include "mdkeychunker/restructurer.hpp"

#include <algorithm>
#include <array>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

#include <openssl/evp.h>

#include "mdkeychunker/text.hpp"

namespace mdkeychunker {
namespace {

void append_unique_ci(std::vector<std::string>& into, std::vector<std::string>& seen_lower,
                      const std::vector<std::string>& values) {
    for (const auto& v : values) {
        std::string lower = text::to_lower_ascii(v);
        if (std::find(seen_lower.begin(), seen_lower.end(), lower) != seen_lower.end()) continue;
        seen_lower.push_back(std::move(lower));
        into.push_back(v);
    }
}

std::string sha256_hex(std::string_view data) {
    std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
    unsigned int len = 0;
    if (EVP_Digest(data.data(), data.size(), digest.data(), &len, EVP_sha256(), nullptr) != 1) {
        throw std::runtime_error("SHA-256 digest failed");
    }
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out;
    out.reserve(len * 2);
    for (unsigned int i = 0; i < len; ++i) {
        out.push_back(kHex[digest[i] >> 4]);
        out.push_back(kHex[digest[i] & 0x0F]);
    }
    return out;
}

}  // namespace

KeyGrouping group_by_key(const std::vector<Chunk>& chunks) {
    KeyGrouping grouping;
    std::unordered_map<std::string, std::size_t> slot;
    for (std::size_t i = 0; i < chunks.size(); ++i) {
        const auto& key = chunks[i].key;
        if (key.empty()) {
            grouping.orphans.push_back(i);
            continue;
        }
        auto [it, inserted] = slot.try_emplace(key, grouping.groups.size());
        if (inserted) grouping.groups.push_back({key, {}});
        grouping.groups[it->second].indices.push_back(i);
    }
    return grouping;
}

std::vector<std::vector<std::size_t>> bin_pack(const std::vector<std::size_t>& indices,
                                               const std::vector<std::size_t>& sizes,
                                               std::size_t max_merged_size) {
    if (indices.size() != sizes.size()) throw std::invalid_argument("bin_pack: sizes must align with indices");
    std::vector<std::vector<std::size_t>> bins;
    if (indices.empty()) return bins;
    bins.push_back({indices[0]});
    std::size_t size = sizes[0];
    for (std::size_t j = 1; j < indices.size(); ++j) {
        if (size + sizes[j] + kMergeSeparator.size() <= max_merged_size) {
            bins.back().push_back(indices[j]);
            size += sizes[j] + kMergeSeparator.size();
        } else {
            bins.push_back({indices[j]});
            size = sizes[j];
        }
    }
    return bins;
}

Chunk merge_bin(const std::vector<Chunk>& members) {
    if (members.empty()) throw std::invalid_argument("merge_bin requires at least one chunk");
    if (members.size() == 1) return members.front();

    Chunk merged = members.front();
    std::vector<std::string> kw_seen, q_seen, rk_seen;
    merged.keywords.clear();
    merged.questions.clear();
    merged.related_keys.clear();
    merged.entities.clear();
    std::vector<std::pair<std::string, EntityType>> entity_seen;

    for (std::size_t m = 0; m < members.size(); ++m) {
        const Chunk& c = members[m];
        if (m > 0) {
            merged.text.append(kMergeSeparator);
            merged.text.append(c.text);
        }
        append_unique_ci(merged.keywords, kw_seen, c.keywords);
        append_unique_ci(merged.questions, q_seen, c.questions);
        append_unique_ci(merged.related_keys, rk_seen, c.related_keys);
        for (const auto& e : c.entities) {
            auto id = std::make_pair(text::to_lower_ascii(e.name), e.type);
            if (std::find(entity_seen.begin(), entity_seen.end(), id) != entity_seen.end()) continue;
            entity_seen.push_back(std::move(id));
            merged.entities.push_back(e);
        }
        merged.content_types.insert(c.content_types.begin(), c.content_types.end());
        merged.start_line = std::min(merged.start_line, c.start_line);
        merged.end_line = std::max(merged.end_line, c.end_line);
    }
    return merged;
}

Chunk augment_orphan(Chunk chunk, std::string_view prev_summary, std::string_view next_summary,
                     std::size_t min_orphan_size) {
    if (text::char_count(chunk.text) >= min_orphan_size) return chunk;

    std::vector<std::string> parts;
    if (!chunk.section_title.empty()) parts.push_back(chunk.section_title + ".");
    if (auto p = text::trim(prev_summary); !p.empty()) parts.emplace_back(p);
    if (auto n = text::trim(next_summary); !n.empty()) parts.emplace_back(n);
    if (parts.empty()) return chunk;

    chunk.text = "[Context: " + text::join(parts, " ") + "]\n\n" + chunk.text;
    return chunk;
}

std::string compute_chunk_id(std::string_view section_title, std::string_view key, std::size_t position_index,
                             std::string_view chunk_text) {
    std::string material;
    material.reserve(section_title.size() + key.size() + 512);
    material.append(section_title).push_back('|');
    material.append(key).push_back('|');
    material.append(std::to_string(position_index)).push_back('|');
    material.append(text::prefix_chars(chunk_text, 100));
    return sha256_hex(material).substr(0, 16);
}

std::size_t estimate_tokens(std::string_view chunk_text, const TokenCounter& exact) {
    if (exact) return exact(chunk_text);
    return text::char_count(chunk_text) / 4;
}

void finalize(std::vector<Chunk>& chunks, const TokenCounter& counter) {
    std::unordered_set<std::string> ids;
    for (std::size_t i = 0; i < chunks.size(); ++i) {
        Chunk& c = chunks[i];
        c.position_index = i;
        c.chunk_id = compute_chunk_id(c.section_title, c.key, i, c.text);
        c.token_count = estimate_tokens(c.text, counter);
        if (!ids.insert(c.chunk_id).second) {
            throw std::runtime_error("duplicate chunk id " + c.chunk_id + " at position " + std::to_string(i));
        }
    }
    for (std::size_t i = 0; i < chunks.size(); ++i) {
        chunks[i].previous_chunk_id = i > 0 ? std::optional(chunks[i - 1].chunk_id) : std::nullopt;
        chunks[i].next_chunk_id = i + 1 < chunks.size() ? std::optional(chunks[i + 1].chunk_id) : std::nullopt;
    }
}

RestructuredDocument restructure(const std::vector<Chunk>& chunks, const PipelineConfig& config,
                                 const TokenCounter& counter) {
    RestructuredDocument out;
    auto& stats = out.stats;
    stats.chunks_before = chunks.size();

    const KeyGrouping grouping = group_by_key(chunks);
    stats.key_groups = grouping.groups.size();
    stats.orphans = grouping.orphans.size();

    for (const auto& group : grouping.groups) {
        std::vector<std::vector<std::size_t>> bins;
        if (config.merge_by_keys) {
            std::vector<std::size_t> sizes;
            sizes.reserve(group.indices.size());
            for (std::size_t idx : group.indices) sizes.push_back(text::char_count(chunks[idx].text));
            bins = bin_pack(group.indices, sizes, config.max_merged_size);
        } else {
            for (std::size_t idx : group.indices) bins.push_back({idx});
        }

        if (group.indices.size() > 1) {
            stats.merged_groups += 1;
            stats.chunks_in_merged_groups += group.indices.size();
        }
        stats.bins += bins.size();
        stats.removed += group.indices.size() - bins.size();

        for (const auto& bin : bins) {
            std::vector<Chunk> members;
            members.reserve(bin.size());
            for (std::size_t idx : bin) members.push_back(chunks[idx]);
            out.chunks.push_back(merge_bin(members));
        }
    }

    for (std::size_t idx : grouping.orphans) {
        std::string_view prev = idx > 0 ? std::string_view(chunks[idx - 1].summary) : std::string_view{};
        std::string_view next = idx + 1 < chunks.size() ? std::string_view(chunks[idx + 1].summary) : std::string_view{};
        Chunk orphan = augment_orphan(chunks[idx], prev, next, config.min_orphan_size);
        if (orphan.text.size() != chunks[idx].text.size()) stats.augmented_orphans += 1;
        out.chunks.push_back(std::move(orphan));
    }

    std::stable_sort(out.chunks.begin(), out.chunks.end(),
                     [](const Chunk& a, const Chunk& b) { return a.start_line < b.start_line; });
    finalize(out.chunks, counter);
    stats.chunks_after = out.chunks.size();
    return out;
}

}  // namespace mdkeychunker
