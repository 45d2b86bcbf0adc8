#include "mdkeychunker/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <future>
#include <set>
#include <sstream>
#include <stdexcept>

#include <spdlog/spdlog.h>

#include "mdkeychunker/md_parser.hpp"
#include "mdkeychunker/model.hpp"

namespace mdkeychunker {
namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

double rate(std::size_t part, std::size_t whole) {
    return whole == 0 ? 0.0 : static_cast<double>(part) / static_cast<double>(whole);
}

double mean(std::size_t total, std::size_t n) {
    return n == 0 ? 0.0 : static_cast<double>(total) / static_cast<double>(n);
}

void count_enrichment(const EnrichedDocument& doc, RunStats& stats) {
    std::set<std::string> keys;
    for (std::size_t i = 0; i < doc.chunks.size(); ++i) {
        const Chunk& c = doc.chunks[i];
        const bool keys_offered = !doc.stats.prompt_keys[i].empty();
        stats.filled_title += !c.title.empty();
        stats.filled_summary += !c.summary.empty();
        stats.filled_keywords += !c.keywords.empty();
        stats.filled_entities += !c.entities.empty();
        stats.filled_questions += !c.questions.empty();
        stats.filled_key += !c.key.empty();
        stats.filled_related_keys += !c.related_keys.empty();
        const bool content_fields = !c.title.empty() && !c.summary.empty() && !c.keywords.empty() &&
                                    !c.entities.empty() && !c.questions.empty() && !c.key.empty();
        stats.fully_enriched += content_fields && (!c.related_keys.empty() || !keys_offered);
        stats.chunks_referencing_prior_keys += !c.related_keys.empty();
        stats.related_key_references += c.related_keys.size();
        stats.entities += c.entities.size();
        stats.keywords += c.keywords.size();
        stats.questions += c.questions.size();
        stats.summary_words += word_count(c.summary);
        if (!c.key.empty()) keys.insert(c.key);
    }
    stats.unique_keys += keys.size();
}

}  // namespace

void RunStats::add(const RunStats& o) {
    documents += o.documents;
    chunks_before += o.chunks_before;
    chunks_after += o.chunks_after;
    llm_calls += o.llm_calls;
    degraded_calls += o.degraded_calls;
    filled_title += o.filled_title;
    filled_summary += o.filled_summary;
    filled_keywords += o.filled_keywords;
    filled_entities += o.filled_entities;
    filled_questions += o.filled_questions;
    filled_key += o.filled_key;
    filled_related_keys += o.filled_related_keys;
    fully_enriched += o.fully_enriched;
    unique_keys += o.unique_keys;
    merged_groups += o.merged_groups;
    chunks_in_merged_groups += o.chunks_in_merged_groups;
    removed_by_merge += o.removed_by_merge;
    augmented_orphans += o.augmented_orphans;
    chunks_referencing_prior_keys += o.chunks_referencing_prior_keys;
    related_key_references += o.related_key_references;
    entities += o.entities;
    keywords += o.keywords;
    questions += o.questions;
    summary_words += o.summary_words;
    output_tokens += o.output_tokens;
    parse_seconds += o.parse_seconds;
    enrich_seconds += o.enrich_seconds;
    restructure_seconds += o.restructure_seconds;
}

nlohmann::ordered_json RunStats::to_json() const {
    nlohmann::ordered_json j;
    j["documents"] = documents;
    j["chunks_before"] = chunks_before;
    j["chunks_after"] = chunks_after;
    j["chunk_reduction"] = chunks_before == 0 ? 0.0 : rate(chunks_before - chunks_after, chunks_before);
    j["llm_calls"] = llm_calls;
    j["llm_calls_per_chunk"] = rate(llm_calls, chunks_before);
    j["degraded_calls"] = degraded_calls;
    j["fill_rate"] = {
        {"title", rate(filled_title, chunks_before)},
        {"summary", rate(filled_summary, chunks_before)},
        {"keywords", rate(filled_keywords, chunks_before)},
        {"entities", rate(filled_entities, chunks_before)},
        {"questions", rate(filled_questions, chunks_before)},
        {"key", rate(filled_key, chunks_before)},
        {"related_keys", rate(filled_related_keys, chunks_before)},
        {"fully_enriched", rate(fully_enriched, chunks_before)},
    };
    j["unique_keys"] = unique_keys;
    j["merged_key_groups"] = merged_groups;
    j["chunks_in_merged_groups"] = chunks_in_merged_groups;
    j["removed_by_merge"] = removed_by_merge;
    j["augmented_orphans"] = augmented_orphans;
    j["chunks_referencing_prior_keys"] = chunks_referencing_prior_keys;
    j["avg_cross_references"] = mean(related_key_references, chunks_before);
    j["avg_entities"] = mean(entities, chunks_before);
    j["avg_keywords"] = mean(keywords, chunks_before);
    j["avg_questions"] = mean(questions, chunks_before);
    j["avg_summary_words"] = mean(summary_words, chunks_before);
    j["avg_tokens_after_merge"] = mean(output_tokens, chunks_after);
    j["seconds"] = {{"parse", parse_seconds}, {"enrich", enrich_seconds}, {"restructure", restructure_seconds}};
    return j;
}

std::vector<Chunk> structural_chunks(std::string_view markdown, const std::string& source_document,
                                     const PipelineConfig& config) {
    auto chunks = chunk_document(parse_blocks(markdown), config);
    for (auto& c : chunks) c.source_document = source_document;
    finalize(chunks);
    return chunks;
}

PipelineResult run_pipeline_text(std::string_view markdown, const std::string& source_document,
                                 const PipelineConfig& config, const LlmClient& client) {
    PipelineResult result;
    RunStats& stats = result.stats;
    stats.documents = 1;

    auto t0 = Clock::now();
    auto chunks = chunk_document(parse_blocks(markdown), config);
    for (auto& c : chunks) c.source_document = source_document;
    stats.parse_seconds = seconds_since(t0);
    stats.chunks_before = chunks.size();

    t0 = Clock::now();
    EnrichedDocument enriched = enrich_document(std::move(chunks), config, client);
    stats.enrich_seconds = seconds_since(t0);
    stats.llm_calls = enriched.stats.llm_calls;
    stats.degraded_calls = enriched.stats.degraded;
    count_enrichment(enriched, stats);

    t0 = Clock::now();
    RestructuredDocument restructured = restructure(enriched.chunks, config);
    stats.restructure_seconds = seconds_since(t0);
    stats.chunks_after = restructured.chunks.size();
    stats.merged_groups = restructured.stats.merged_groups;
    stats.chunks_in_merged_groups = restructured.stats.chunks_in_merged_groups;
    stats.removed_by_merge = restructured.stats.removed;
    stats.augmented_orphans = restructured.stats.augmented_orphans;
    for (const auto& c : restructured.chunks) stats.output_tokens += c.token_count;

    spdlog::info("{}: {} chunks -> {} after restructuring ({} LLM calls, {} degraded)", source_document,
                 stats.chunks_before, stats.chunks_after, stats.llm_calls, stats.degraded_calls);
    result.chunks = std::move(restructured.chunks);
    return result;
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw std::runtime_error("error reading " + path.string());
    return buf.str();
}

PipelineResult run_pipeline(const std::filesystem::path& document, const PipelineConfig& config,
                            const LlmClient& client) {
    return run_pipeline_text(read_file(document), document.filename().string(), config, client);
}

std::vector<std::filesystem::path> list_markdown_files(const std::filesystem::path& dir) {
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::recursive_directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".md") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    return files;
}

PipelineResult run_input(const std::filesystem::path& input, const PipelineConfig& config, const LlmClient& client,
                         std::size_t jobs) {
    if (!std::filesystem::is_directory(input)) return run_pipeline(input, config, client);

    const auto files = list_markdown_files(input);
    std::vector<PipelineResult> results(files.size());
    auto process = [&](std::size_t i) {
        const std::string source = std::filesystem::relative(files[i], input).generic_string();
        results[i] = run_pipeline_text(read_file(files[i]), source, config, client);
    };

    jobs = std::max<std::size_t>(1, jobs);
    for (std::size_t begin = 0; begin < files.size(); begin += jobs) {
        std::vector<std::future<void>> batch;
        for (std::size_t i = begin; i < std::min(files.size(), begin + jobs); ++i) {
            batch.push_back(std::async(jobs == 1 ? std::launch::deferred : std::launch::async, process, i));
        }
        for (auto& f : batch) f.get();
    }

    PipelineResult merged;
    for (auto& r : results) {
        merged.stats.add(r.stats);
        std::move(r.chunks.begin(), r.chunks.end(), std::back_inserter(merged.chunks));
    }
    return merged;
}

}  // namespace mdkeychunker
