#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "mdkeychunker/model.hpp"

namespace mdkeychunker {

/// Output field order. Table-of-record fields first, then the location and
/// provenance fields.
nlohmann::ordered_json chunk_to_json(const Chunk& chunk);

/// Throws nlohmann::json::exception or std::invalid_argument on schema errors.
Chunk chunk_from_json(const nlohmann::json& j);

/// A JSON array of chunk objects, two-space indented, UTF-8, trailing newline.
std::string serialize_chunks(const std::vector<Chunk>& chunks);

std::vector<Chunk> parse_chunks(std::string_view json_text);

}  // namespace mdkeychunker
