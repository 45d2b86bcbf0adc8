#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "mdkeychunker/model.hpp"

namespace mdkeychunker {

/// Current section hierarchy. Levels strictly increase from bottom to top.
class HeaderStack {
public:
    struct Entry {
        int level = 1;
        std::string text;

        bool operator==(const Entry&) const = default;
    };

    HeaderStack() = default;
    explicit HeaderStack(std::vector<Entry> entries);

    /// Pops every entry with level >= `level`, then pushes.
    void push(int level, std::string text);

    /// Entry texts joined with " > ".
    std::string path() const;

    const std::vector<Entry>& entries() const noexcept { return entries_; }
    bool empty() const noexcept { return entries_.empty(); }

    bool operator==(const HeaderStack&) const = default;

private:
    std::vector<Entry> entries_;
};

/// Heading text of an ATX header line: markers, closing hashes and
/// surrounding whitespace removed.
std::string heading_text(std::string_view header_line);

HeaderStack section_path(HeaderStack stack, const Block& header);

/// Splits a Markdown document into typed blocks. Total: malformed constructs
/// fall back to paragraphs, and an unterminated fence runs to end of input.
std::vector<Block> parse_blocks(std::string_view document);

/// Groups blocks into size-managed chunks. Only text, section_title,
/// content_types and the line range are filled in.
std::vector<Chunk> chunk_document(const std::vector<Block>& blocks, const PipelineConfig& config);

}  // namespace mdkeychunker
