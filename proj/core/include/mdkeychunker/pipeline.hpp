#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "mdkeychunker/enricher.hpp"
#include "mdkeychunker/llm_client.hpp"
#include "mdkeychunker/model.hpp"
#include "mdkeychunker/restructurer.hpp"

namespace mdkeychunker {

/// Counters for one or more pipeline runs. Field fill counts are taken over
/// the enriched chunks (one per LLM call); token totals over the output.
struct RunStats {
    std::size_t documents = 0;
    std::size_t chunks_before = 0;
    std::size_t chunks_after = 0;
    std::size_t llm_calls = 0;
    std::size_t degraded_calls = 0;

    std::size_t filled_title = 0;
    std::size_t filled_summary = 0;
    std::size_t filled_keywords = 0;
    std::size_t filled_entities = 0;
    std::size_t filled_questions = 0;
    std::size_t filled_key = 0;
    std::size_t filled_related_keys = 0;
    /// Six content fields set, and related_keys set whenever the prompt
    /// offered at least one rolling key.
    std::size_t fully_enriched = 0;

    std::size_t unique_keys = 0;  // summed per document
    std::size_t merged_groups = 0;
    std::size_t chunks_in_merged_groups = 0;
    std::size_t removed_by_merge = 0;
    std::size_t augmented_orphans = 0;
    std::size_t chunks_referencing_prior_keys = 0;
    std::size_t related_key_references = 0;
    std::size_t entities = 0;
    std::size_t keywords = 0;
    std::size_t questions = 0;
    std::size_t summary_words = 0;
    std::size_t output_tokens = 0;

    double parse_seconds = 0.0;
    double enrich_seconds = 0.0;
    double restructure_seconds = 0.0;

    void add(const RunStats& other);
    nlohmann::ordered_json to_json() const;
};

struct PipelineResult {
    std::vector<Chunk> chunks;
    RunStats stats;
};

/// Stage 1 only, finalized (ids, links, token counts); used for the
/// structure-only retrieval baselines.
std::vector<Chunk> structural_chunks(std::string_view markdown, const std::string& source_document,
                                     const PipelineConfig& config);

/// Parse, enrich, restructure. LLM failures degrade individual chunks and
/// never abort the run.
PipelineResult run_pipeline_text(std::string_view markdown, const std::string& source_document,
                                 const PipelineConfig& config, const LlmClient& client);

/// Reads a UTF-8 Markdown file (throws std::runtime_error when unreadable).
/// source_document is the file name.
PipelineResult run_pipeline(const std::filesystem::path& document, const PipelineConfig& config,
                            const LlmClient& client);

/// Every *.md file directly or recursively under `dir`, sorted by path.
std::vector<std::filesystem::path> list_markdown_files(const std::filesystem::path& dir);

/// Processes a file or every Markdown file of a directory. Documents may run
/// on up to `jobs` threads; output order follows the sorted file list and
/// source_document is the path relative to `input`.
PipelineResult run_input(const std::filesystem::path& input, const PipelineConfig& config, const LlmClient& client,
                         std::size_t jobs = 1);

std::string read_file(const std::filesystem::path& path);

}  // namespace mdkeychunker
