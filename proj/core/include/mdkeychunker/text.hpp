#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

// UTF-8 helpers. All size thresholds in the pipeline count Unicode code
// points, not bytes.
namespace mdkeychunker::text {

/// Number of code points in a UTF-8 string (continuation bytes are skipped).
std::size_t char_count(std::string_view s) noexcept;

/// Byte offset of the code point with index `n`, or s.size() past the end.
std::size_t byte_offset_of_char(std::string_view s, std::size_t n) noexcept;

/// The first `n` code points of `s`.
std::string_view prefix_chars(std::string_view s, std::size_t n) noexcept;

std::string to_lower_ascii(std::string_view s);

std::string_view trim(std::string_view s) noexcept;

/// Lowercase, trim and collapse internal whitespace runs to one space.
std::string collapse_whitespace_lower(std::string_view s);

std::vector<std::string_view> split_lines(std::string_view s);

bool is_blank(std::string_view line) noexcept;

bool contains_ci(std::string_view haystack, std::string_view needle);

/// Lowercased alphanumeric runs. Bytes >= 0x80 count as word characters so
/// non-ASCII words survive as tokens.
std::vector<std::string> tokenize(std::string_view s);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

}  // namespace mdkeychunker::text
