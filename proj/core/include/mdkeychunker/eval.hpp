#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "mdkeychunker/llm_client.hpp"
#include "mdkeychunker/model.hpp"

namespace mdkeychunker::eval {

struct Query {
    std::string id;
    std::string query;
    std::string gold_document;
    std::string gold_substring;
};

/// JSON Lines, one {id, query, gold_document, gold_substring} per line.
/// Blank lines are skipped. Throws std::runtime_error with the line number.
std::vector<Query> load_queries(const std::filesystem::path& path);

struct ScoredChunk {
    std::size_t corpus_index = 0;
    std::string chunk_id;
    double score = 0.0;
};

/// Ranked by descending score; ties by ascending corpus position.
struct RetrievalResult {
    std::string query_id;
    std::vector<ScoredChunk> ranked;
};

/// Consecutive windows of `size` characters; the last one may be shorter.
/// No metadata beyond the line range.
std::vector<Chunk> fixed_size_chunk(std::string_view document, std::size_t size = 512);

struct Bm25Params {
    double k1 = 1.5;
    double b = 0.75;
};

/// Okapi BM25 over an in-memory corpus with
/// idf(t) = ln((N - n_t + 0.5) / (n_t + 0.5) + 1).
class Bm25Index {
public:
    explicit Bm25Index(const std::vector<std::string>& documents, Bm25Params params = {});

    std::vector<double> scores(std::string_view query) const;
    std::vector<std::pair<std::size_t, double>> top_k(std::string_view query, std::size_t k) const;

    std::size_t size() const noexcept { return doc_len_.size(); }
    double average_length() const noexcept { return avgdl_; }

private:
    Bm25Params params_;
    std::vector<std::size_t> doc_len_;
    double avgdl_ = 0.0;
    std::unordered_map<std::string, std::vector<std::pair<std::size_t, std::size_t>>> postings_;  // doc, tf
};

/// Throws std::invalid_argument on an empty corpus.
RetrievalResult bm25_retrieve(std::string_view query, const std::vector<Chunk>& corpus, std::size_t k);

enum class IndexMode { raw, augmented };

/// raw: the chunk text. augmented: title, summary, questions and text,
/// newline-joined, skipping empty parts.
std::string index_text(const Chunk& chunk, IndexMode mode);

/// Exhaustive inner-product search over unit-norm embeddings.
class DenseIndex {
public:
    DenseIndex(const std::vector<Chunk>& corpus, IndexMode mode, const LlmClient& client, std::string model);

    RetrievalResult search(std::string_view query, std::size_t k) const;
    RetrievalResult search_vector(const std::vector<double>& query, std::size_t k) const;

private:
    const std::vector<Chunk>* corpus_;
    const LlmClient* client_;
    std::string model_;
    std::vector<std::vector<double>> vectors_;
};

RetrievalResult dense_retrieve(std::string_view query, const std::vector<Chunk>& corpus, std::size_t k,
                               IndexMode mode, const LlmClient& client, const std::string& model);

/// Same document and case-insensitive containment of the gold substring.
bool is_relevant(const Chunk& chunk, const Query& query);

/// 1-based rank of the first relevant chunk among the first `depth` results.
std::optional<std::size_t> first_relevant_rank(const RetrievalResult& result, const std::vector<Chunk>& corpus,
                                               const Query& query, std::size_t depth);

using FirstRanks = std::vector<std::optional<std::size_t>>;

double recall_at_k(const FirstRanks& first_relevant_ranks, std::size_t k);
double mean_reciprocal_rank(const FirstRanks& first_relevant_ranks);

struct EvalRow {
    std::string config;
    std::string label;
    std::size_t chunks = 0;
    std::map<std::size_t, double> recall;
    double mrr = 0.0;
};

struct EvalOptions {
    std::vector<std::string> configs{"A", "B", "C", "D"};
    std::vector<std::size_t> k_values{3, 5, 10};
    std::size_t fixed_window = 512;
    IndexMode config_c_mode = IndexMode::augmented;
    std::string embedding_model = "mxbai-embed-large";
};

struct EvalReport {
    std::size_t queries = 0;
    std::vector<std::size_t> k_values;
    std::vector<EvalRow> rows;

    nlohmann::ordered_json to_json() const;
    std::string to_table() const;
};

/// A: fixed 512-char windows + dense raw. B: structural chunks + dense raw.
/// C: full pipeline + dense (augmented by default). D: structural chunks + BM25.
/// MRR counts ranks up to the largest k.
EvalReport run_eval(const std::filesystem::path& corpus_dir, const std::vector<Query>& queries,
                    const PipelineConfig& config, const LlmClient& chat_client, const LlmClient& embedding_client,
                    const EvalOptions& options = {});

}  // namespace mdkeychunker::eval
