#include "mdkeychunker/md_parser.hpp"

#include <optional>
#include <stdexcept>

#include "mdkeychunker/text.hpp"

namespace mdkeychunker {
namespace {

using Lines = std::vector<std::string_view>;

int indent_width(std::string_view line) {
    int width = 0;
    for (char c : line) {
        if (c == ' ') {
            ++width;
        } else if (c == '\t') {
            width += 4 - (width % 4);
        } else {
            break;
        }
    }
    return width;
}

std::string_view strip_leading_ws(std::string_view line) {
    std::size_t i = 0;
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    return line.substr(i);
}

// Up to three spaces of indentation are allowed before block markers.
std::optional<std::string_view> marker_body(std::string_view line) {
    if (indent_width(line) > 3) return std::nullopt;
    return strip_leading_ws(line);
}

struct Fence {
    char ch = '`';
    std::size_t len = 3;
};

std::optional<Fence> fence_open_at(std::string_view body) {
    if (body.empty() || (body[0] != '`' && body[0] != '~')) return std::nullopt;
    char ch = body[0];
    std::size_t len = 0;
    while (len < body.size() && body[len] == ch) ++len;
    if (len < 3) return std::nullopt;
    if (ch == '`' && body.substr(len).find('`') != std::string_view::npos) return std::nullopt;
    return Fence{ch, len};
}

std::optional<Fence> fence_open(std::string_view line) {
    auto body = marker_body(line);
    if (!body) return std::nullopt;
    return fence_open_at(*body);
}

bool fence_closes(std::string_view body, const Fence& fence) {
    std::size_t len = 0;
    while (len < body.size() && body[len] == fence.ch) ++len;
    return len >= fence.len && text::is_blank(body.substr(len));
}

std::optional<int> atx_level(std::string_view line) {
    auto body = marker_body(line);
    if (!body) return std::nullopt;
    int level = 0;
    while (level < static_cast<int>(body->size()) && (*body)[level] == '#') ++level;
    if (level < 1 || level > 6) return std::nullopt;
    if (static_cast<std::size_t>(level) == body->size()) return level;
    char next = (*body)[level];
    if (next != ' ' && next != '\t') return std::nullopt;
    return level;
}

bool is_blockquote_start(std::string_view line) {
    auto body = marker_body(line);
    return body && !body->empty() && (*body)[0] == '>';
}

bool is_thematic_break(std::string_view line) {
    auto body = text::trim(line);
    if (body.empty()) return false;
    char ch = body[0];
    if (ch != '-' && ch != '*' && ch != '_') return false;
    std::size_t count = 0;
    for (char c : body) {
        if (c == ch) {
            ++count;
        } else if (c != ' ' && c != '\t') {
            return false;
        }
    }
    return count >= 3;
}

struct ListMarker {
    bool ordered = false;
    bool starts_at_one = false;
};

std::optional<ListMarker> list_marker(std::string_view line) {
    if (is_thematic_break(line)) return std::nullopt;
    auto body = strip_leading_ws(line);
    if (body.empty()) return std::nullopt;
    auto followed_by_space = [&](std::size_t pos) {
        return pos == body.size() || body[pos] == ' ' || body[pos] == '\t';
    };
    if (body[0] == '-' || body[0] == '*' || body[0] == '+') {
        if (followed_by_space(1)) return ListMarker{false, false};
        return std::nullopt;
    }
    std::size_t digits = 0;
    while (digits < body.size() && digits < 10 && body[digits] >= '0' && body[digits] <= '9') ++digits;
    if (digits == 0 || digits > 9 || digits >= body.size()) return std::nullopt;
    if (body[digits] != '.' && body[digits] != ')') return std::nullopt;
    if (!followed_by_space(digits + 1)) return std::nullopt;
    return ListMarker{true, body.substr(0, digits) == "1"};
}

bool is_list_start(std::string_view line) {
    return indent_width(line) <= 3 && list_marker(line).has_value();
}

bool is_table_separator(std::string_view line) {
    auto body = text::trim(line);
    if (body.find('|') == std::string_view::npos) return false;
    if (!body.empty() && body.front() == '|') body.remove_prefix(1);
    if (!body.empty() && body.back() == '|') body.remove_suffix(1);
    if (text::trim(body).empty()) return false;
    std::size_t start = 0;
    while (start <= body.size()) {
        std::size_t end = body.find('|', start);
        if (end == std::string_view::npos) end = body.size();
        auto cell = text::trim(body.substr(start, end - start));
        if (!cell.empty() && cell.front() == ':') cell.remove_prefix(1);
        if (!cell.empty() && cell.back() == ':') cell.remove_suffix(1);
        if (cell.empty()) return false;
        for (char c : cell) {
            if (c != '-') return false;
        }
        start = end + 1;
    }
    return true;
}

bool is_table_row(std::string_view line) {
    return line.find('|') != std::string_view::npos;
}

bool is_table_start(const Lines& lines, std::size_t i) {
    return indent_width(lines[i]) <= 3 && is_table_row(lines[i]) && i + 1 < lines.size() &&
           is_table_separator(lines[i + 1]);
}

// Lines that end a paragraph (or a lazy continuation) without a blank line.
bool interrupts(const Lines& lines, std::size_t i) {
    const auto line = lines[i];
    if (fence_open(line) || atx_level(line) || is_blockquote_start(line)) return true;
    if (is_table_start(lines, i)) return true;
    if (is_list_start(line)) {
        auto marker = list_marker(line);
        return !marker->ordered || marker->starts_at_one;
    }
    return false;
}

std::size_t next_nonblank(const Lines& lines, std::size_t i) {
    while (i < lines.size() && text::is_blank(lines[i])) ++i;
    return i;
}

// Consumes a fence opened at `open`; returns the index of its closing line, or
// the last line when unterminated.
std::size_t consume_fence(const Lines& lines, std::size_t open, const Fence& fence) {
    for (std::size_t j = open + 1; j < lines.size(); ++j) {
        if (fence_closes(strip_leading_ws(lines[j]), fence)) return j;
    }
    return lines.size() - 1;
}

std::size_t consume_list(const Lines& lines, std::size_t first) {
    std::size_t last = first;
    std::size_t j = first + 1;
    while (j < lines.size()) {
        const auto line = lines[j];
        if (text::is_blank(line)) {
            std::size_t k = next_nonblank(lines, j);
            if (k < lines.size() && (indent_width(lines[k]) >= 2 || is_list_start(lines[k]))) {
                j = k;
                continue;
            }
            break;
        }
        if (indent_width(line) >= 2) {
            if (auto fence = fence_open_at(strip_leading_ws(line))) {
                last = consume_fence(lines, j, *fence);
            } else {
                last = j;
            }
            j = last + 1;
            continue;
        }
        if (is_list_start(line)) {
            last = j++;
            continue;
        }
        if (interrupts(lines, j)) break;
        last = j++;  // lazy continuation
    }
    return last;
}

std::string join_lines(const Lines& lines, std::size_t first, std::size_t last) {
    std::size_t bytes = 0;
    for (std::size_t i = first; i <= last; ++i) bytes += lines[i].size() + 1;
    std::string out;
    out.reserve(bytes);
    for (std::size_t i = first; i <= last; ++i) {
        if (i > first) out.push_back('\n');
        out.append(lines[i]);
    }
    return out;
}

}  // namespace

HeaderStack::HeaderStack(std::vector<Entry> entries) : entries_(std::move(entries)) {
    for (std::size_t i = 1; i < entries_.size(); ++i) {
        if (entries_[i].level <= entries_[i - 1].level) {
            throw std::invalid_argument("header stack levels must strictly increase");
        }
    }
}

void HeaderStack::push(int level, std::string text) {
    while (!entries_.empty() && entries_.back().level >= level) entries_.pop_back();
    entries_.push_back({level, std::move(text)});
}

std::string HeaderStack::path() const {
    std::string out;
    for (std::size_t i = 0; i < entries_.size(); ++i) {
        if (i > 0) out.append(" > ");
        out.append(entries_[i].text);
    }
    return out;
}

std::string heading_text(std::string_view header_line) {
    auto body = strip_leading_ws(header_line);
    while (!body.empty() && body.front() == '#') body.remove_prefix(1);
    body = text::trim(body);
    // Optional closing sequence: a run of '#' preceded by whitespace.
    std::size_t end = body.size();
    while (end > 0 && body[end - 1] == '#') --end;
    if (end == 0) return {};
    if (end < body.size() && (body[end - 1] == ' ' || body[end - 1] == '\t')) {
        body = text::trim(body.substr(0, end));
    }
    return std::string(body);
}

HeaderStack section_path(HeaderStack stack, const Block& header) {
    if (header.type != BlockType::header || !header.heading_level) {
        throw std::invalid_argument("section_path requires a header block");
    }
    stack.push(*header.heading_level, heading_text(header.content));
    return stack;
}

std::vector<Block> parse_blocks(std::string_view document) {
    const Lines lines = text::split_lines(document);
    std::vector<Block> blocks;

    auto emit = [&](BlockType type, std::size_t first, std::size_t last, std::optional<int> level = {}) {
        blocks.push_back(Block{type, join_lines(lines, first, last), static_cast<int>(first) + 1,
                               static_cast<int>(last) + 1, level});
    };

    std::size_t i = 0;
    while (i < lines.size()) {
        const auto line = lines[i];
        if (text::is_blank(line)) {
            ++i;
            continue;
        }

        if (auto fence = fence_open(line)) {
            std::size_t last = consume_fence(lines, i, *fence);
            emit(BlockType::code, i, last);
            i = last + 1;
        } else if (auto level = atx_level(line)) {
            emit(BlockType::header, i, i, *level);
            ++i;
        } else if (is_table_start(lines, i)) {
            std::size_t j = i + 2;
            while (j < lines.size() && !text::is_blank(lines[j]) && is_table_row(lines[j]) &&
                   !fence_open(lines[j]) && !atx_level(lines[j]) && !is_blockquote_start(lines[j])) {
                ++j;
            }
            emit(BlockType::table, i, j - 1);
            i = j;
        } else if (is_blockquote_start(line)) {
            std::size_t j = i + 1;
            while (j < lines.size() && !text::is_blank(lines[j]) &&
                   (is_blockquote_start(lines[j]) || !interrupts(lines, j))) {
                ++j;
            }
            emit(BlockType::blockquote, i, j - 1);
            i = j;
        } else if (is_list_start(line)) {
            std::size_t last = consume_list(lines, i);
            emit(BlockType::list, i, last);
            i = last + 1;
        } else if (indent_width(line) >= 4) {
            std::size_t last = i;
            std::size_t j = i + 1;
            while (j < lines.size()) {
                if (text::is_blank(lines[j])) {
                    ++j;
                } else if (indent_width(lines[j]) >= 4) {
                    last = j++;
                } else {
                    break;
                }
            }
            emit(BlockType::code, i, last);
            i = last + 1;
        } else {
            std::size_t j = i + 1;
            while (j < lines.size() && !text::is_blank(lines[j]) && !interrupts(lines, j)) ++j;
            emit(BlockType::paragraph, i, j - 1);
            i = j;
        }
    }
    return blocks;
}

namespace {

class ChunkAssembler {
public:
    explicit ChunkAssembler(const PipelineConfig& config) : config_(config) {}

    void add(const Block& block, const HeaderStack& stack) {
        const std::size_t size = text::char_count(block.content);
        if (!blocks_.empty() && size_ + 1 + size > config_.max_chunk_size) close();
        if (blocks_.empty()) {
            section_ = stack.path();
            size_ = size;
        } else {
            size_ += 1 + size;
        }
        blocks_.push_back(&block);
    }

    void close_if_at_least_min() {
        if (!blocks_.empty() && size_ >= config_.min_chunk_size) close();
    }

    std::vector<Chunk> finish() {
        if (!blocks_.empty()) {
            const bool can_merge = size_ < config_.min_chunk_size && !chunks_.empty() &&
                                   chunks_.back().section_title == section_ &&
                                   sizes_.back() + 1 + size_ <= config_.max_chunk_size;
            if (can_merge) {
                Chunk tail = build();
                Chunk& prev = chunks_.back();
                prev.text.push_back('\n');
                prev.text.append(tail.text);
                prev.content_types.insert(tail.content_types.begin(), tail.content_types.end());
                prev.end_line = tail.end_line;
                sizes_.back() += 1 + size_;
                blocks_.clear();
            } else {
                close();
            }
        }
        return std::move(chunks_);
    }

private:
    Chunk build() const {
        Chunk chunk;
        std::size_t bytes = 0;
        for (const Block* b : blocks_) bytes += b->content.size() + 1;
        chunk.text.reserve(bytes);
        for (std::size_t i = 0; i < blocks_.size(); ++i) {
            if (i > 0) chunk.text.push_back('\n');
            chunk.text.append(blocks_[i]->content);
            chunk.content_types.insert(blocks_[i]->type);
        }
        chunk.section_title = section_;
        chunk.start_line = blocks_.front()->start_line;
        chunk.end_line = blocks_.back()->end_line;
        return chunk;
    }

    void close() {
        chunks_.push_back(build());
        sizes_.push_back(size_);
        blocks_.clear();
        size_ = 0;
    }

    const PipelineConfig& config_;
    std::vector<const Block*> blocks_;
    std::size_t size_ = 0;
    std::string section_;
    std::vector<Chunk> chunks_;
    std::vector<std::size_t> sizes_;
};

}  // namespace

std::vector<Chunk> chunk_document(const std::vector<Block>& blocks, const PipelineConfig& config) {
    ChunkAssembler assembler(config);
    HeaderStack stack;
    for (const auto& block : blocks) {
        if (block.type == BlockType::header) {
            assembler.close_if_at_least_min();
            stack = section_path(std::move(stack), block);
        }
        assembler.add(block, stack);
    }
    return assembler.finish();
}

}  // namespace mdkeychunker
