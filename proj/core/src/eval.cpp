#include "mdkeychunker/eval.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include <spdlog/spdlog.h>

#include "mdkeychunker/pipeline.hpp"
#include "mdkeychunker/restructurer.hpp"
#include "mdkeychunker/text.hpp"

namespace mdkeychunker::eval {
namespace {

RetrievalResult rank(const std::vector<double>& scores, const std::vector<Chunk>& corpus, std::size_t k) {
    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), 0);
    const std::size_t n = std::min(k, order.size());
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n), order.end(),
                      [&](std::size_t a, std::size_t b) {
                          if (scores[a] != scores[b]) return scores[a] > scores[b];
                          return a < b;
                      });
    RetrievalResult result;
    result.ranked.reserve(n);
    for (std::size_t i = 0; i < n; ++i) result.ranked.push_back({order[i], corpus[order[i]].chunk_id, scores[order[i]]});
    return result;
}

std::vector<std::string> texts_of(const std::vector<Chunk>& corpus, IndexMode mode) {
    std::vector<std::string> texts;
    texts.reserve(corpus.size());
    for (const auto& c : corpus) texts.push_back(index_text(c, mode));
    return texts;
}

std::string label_for(const std::string& config, std::size_t window) {
    if (config == "A") return "Fixed-size (" + std::to_string(window) + " char)";
    if (config == "B") return "Structure-only (dense)";
    if (config == "C") return "Full pipeline (dense)";
    if (config == "D") return "Structure-only (BM25)";
    throw std::invalid_argument("unknown configuration '" + config + "' (expected A, B, C or D)");
}

}  // namespace

std::vector<Query> load_queries(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read queries file " + path.string());
    std::vector<Query> queries;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (text::is_blank(line)) continue;
        try {
            auto j = nlohmann::json::parse(line);
            Query q{j.at("id").is_string() ? j.at("id").get<std::string>() : j.at("id").dump(),
                    j.at("query").get<std::string>(), j.at("gold_document").get<std::string>(),
                    j.at("gold_substring").get<std::string>()};
            if (q.gold_substring.empty()) throw std::invalid_argument("gold_substring must not be empty");
            queries.push_back(std::move(q));
        } catch (const std::exception& e) {
            throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return queries;
}

std::vector<Chunk> fixed_size_chunk(std::string_view document, std::size_t size) {
    if (size == 0) throw std::invalid_argument("fixed_size_chunk: size must be positive");
    std::vector<Chunk> chunks;
    std::size_t pos = 0;
    int line = 1;
    while (pos < document.size()) {
        std::string_view rest = document.substr(pos);
        std::size_t len = text::byte_offset_of_char(rest, size);
        std::string_view window = rest.substr(0, len);
        Chunk c;
        c.text = std::string(window);
        c.start_line = line;
        // The window's last character decides its end line.
        auto newlines = static_cast<int>(std::count(window.begin(), window.end(), '\n'));
        c.end_line = line + newlines - (window.back() == '\n' ? 1 : 0);
        line += newlines;
        chunks.push_back(std::move(c));
        pos += len;
    }
    return chunks;
}

Bm25Index::Bm25Index(const std::vector<std::string>& documents, Bm25Params params) : params_(params) {
    if (documents.empty()) throw std::invalid_argument("BM25 corpus is empty");
    std::size_t total = 0;
    doc_len_.reserve(documents.size());
    for (std::size_t d = 0; d < documents.size(); ++d) {
        auto tokens = text::tokenize(documents[d]);
        doc_len_.push_back(tokens.size());
        total += tokens.size();
        std::sort(tokens.begin(), tokens.end());
        for (std::size_t i = 0; i < tokens.size();) {
            std::size_t j = i;
            while (j < tokens.size() && tokens[j] == tokens[i]) ++j;
            postings_[tokens[i]].emplace_back(d, j - i);
            i = j;
        }
    }
    avgdl_ = static_cast<double>(total) / static_cast<double>(documents.size());
}

std::vector<double> Bm25Index::scores(std::string_view query) const {
    std::vector<double> out(doc_len_.size(), 0.0);
    const double n_docs = static_cast<double>(doc_len_.size());
    for (const auto& term : text::tokenize(query)) {
        auto it = postings_.find(term);
        if (it == postings_.end()) continue;
        const double n_t = static_cast<double>(it->second.size());
        const double idf = std::log((n_docs - n_t + 0.5) / (n_t + 0.5) + 1.0);
        for (const auto& [doc, tf_count] : it->second) {
            const double tf = static_cast<double>(tf_count);
            const double norm = 1.0 - params_.b + params_.b * static_cast<double>(doc_len_[doc]) / avgdl_;
            out[doc] += idf * tf * (params_.k1 + 1.0) / (tf + params_.k1 * norm);
        }
    }
    return out;
}

std::vector<std::pair<std::size_t, double>> Bm25Index::top_k(std::string_view query, std::size_t k) const {
    auto s = scores(query);
    std::vector<std::size_t> order(s.size());
    std::iota(order.begin(), order.end(), 0);
    const std::size_t n = std::min(k, order.size());
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n), order.end(),
                      [&](std::size_t a, std::size_t b) { return s[a] != s[b] ? s[a] > s[b] : a < b; });
    std::vector<std::pair<std::size_t, double>> out;
    for (std::size_t i = 0; i < n; ++i) out.emplace_back(order[i], s[order[i]]);
    return out;
}

RetrievalResult bm25_retrieve(std::string_view query, const std::vector<Chunk>& corpus, std::size_t k) {
    Bm25Index index(texts_of(corpus, IndexMode::raw));
    return rank(index.scores(query), corpus, k);
}

std::string index_text(const Chunk& chunk, IndexMode mode) {
    if (mode == IndexMode::raw) return chunk.text;
    std::vector<std::string> parts;
    if (!chunk.title.empty()) parts.push_back(chunk.title);
    if (!chunk.summary.empty()) parts.push_back(chunk.summary);
    for (const auto& q : chunk.questions) parts.push_back(q);
    parts.push_back(chunk.text);
    return text::join(parts, "\n");
}

DenseIndex::DenseIndex(const std::vector<Chunk>& corpus, IndexMode mode, const LlmClient& client, std::string model)
    : corpus_(&corpus), client_(&client), model_(std::move(model)) {
    if (corpus.empty()) throw std::invalid_argument("dense corpus is empty");
    vectors_ = client.embed_texts(texts_of(corpus, mode), model_);
}

RetrievalResult DenseIndex::search_vector(const std::vector<double>& query, std::size_t k) const {
    std::vector<double> scores(vectors_.size(), 0.0);
    for (std::size_t i = 0; i < vectors_.size(); ++i) {
        const auto& v = vectors_[i];
        if (v.size() != query.size()) throw EmbeddingError("embedding dimension mismatch");
        double dot = 0.0;
        for (std::size_t d = 0; d < v.size(); ++d) dot += v[d] * query[d];
        scores[i] = dot;
    }
    return rank(scores, *corpus_, k);
}

RetrievalResult DenseIndex::search(std::string_view query, std::size_t k) const {
    auto vec = client_->embed_texts({std::string(query)}, model_);
    return search_vector(vec.front(), k);
}

RetrievalResult dense_retrieve(std::string_view query, const std::vector<Chunk>& corpus, std::size_t k,
                               IndexMode mode, const LlmClient& client, const std::string& model) {
    return DenseIndex(corpus, mode, client, model).search(query, k);
}

bool is_relevant(const Chunk& chunk, const Query& query) {
    return chunk.source_document == query.gold_document && text::contains_ci(chunk.text, query.gold_substring);
}

std::optional<std::size_t> first_relevant_rank(const RetrievalResult& result, const std::vector<Chunk>& corpus,
                                               const Query& query, std::size_t depth) {
    const std::size_t n = std::min(depth, result.ranked.size());
    for (std::size_t i = 0; i < n; ++i) {
        if (is_relevant(corpus.at(result.ranked[i].corpus_index), query)) return i + 1;
    }
    return std::nullopt;
}

double recall_at_k(const FirstRanks& ranks, std::size_t k) {
    if (ranks.empty()) return 0.0;
    std::size_t hits = 0;
    for (const auto& r : ranks) hits += r && *r <= k;
    return static_cast<double>(hits) / static_cast<double>(ranks.size());
}

double mean_reciprocal_rank(const FirstRanks& ranks) {
    if (ranks.empty()) return 0.0;
    double sum = 0.0;
    for (const auto& r : ranks) {
        if (r) sum += 1.0 / static_cast<double>(*r);
    }
    return sum / static_cast<double>(ranks.size());
}

nlohmann::ordered_json EvalReport::to_json() const {
    nlohmann::ordered_json j;
    j["queries"] = queries;
    j["k_values"] = k_values;
    auto rows_json = nlohmann::ordered_json::array();
    for (const auto& row : rows) {
        nlohmann::ordered_json r;
        r["config"] = row.config;
        r["label"] = row.label;
        r["chunks"] = row.chunks;
        for (const auto& [k, value] : row.recall) r["recall@" + std::to_string(k)] = value;
        r["mrr"] = row.mrr;
        rows_json.push_back(std::move(r));
    }
    j["results"] = std::move(rows_json);
    return j;
}

std::string EvalReport::to_table() const {
    std::ostringstream out;
    out << std::left << std::setw(30) << "Config" << std::right << std::setw(8) << "Chunks";
    for (auto k : k_values) out << std::setw(8) << ("R@" + std::to_string(k));
    out << std::setw(8) << "MRR" << "\n";
    out << std::fixed << std::setprecision(3);
    for (const auto& row : rows) {
        out << std::left << std::setw(30) << (row.config + ": " + row.label) << std::right << std::setw(8) << row.chunks;
        for (auto k : k_values) out << std::setw(8) << row.recall.at(k);
        out << std::setw(8) << row.mrr << "\n";
    }
    return out.str();
}

EvalReport run_eval(const std::filesystem::path& corpus_dir, const std::vector<Query>& queries,
                    const PipelineConfig& config, const LlmClient& chat_client, const LlmClient& embedding_client,
                    const EvalOptions& options) {
    if (queries.empty()) throw std::invalid_argument("no queries to evaluate");
    if (options.k_values.empty()) throw std::invalid_argument("no k values requested");
    if (!std::filesystem::is_directory(corpus_dir)) {
        throw std::runtime_error("corpus directory not found: " + corpus_dir.string());
    }
    const auto files = list_markdown_files(corpus_dir);
    if (files.empty()) throw std::runtime_error("no Markdown files under " + corpus_dir.string());

    std::vector<std::pair<std::string, std::string>> documents;  // source id, text
    for (const auto& f : files) {
        documents.emplace_back(std::filesystem::relative(f, corpus_dir).generic_string(), read_file(f));
    }
    const std::size_t depth = *std::max_element(options.k_values.begin(), options.k_values.end());

    EvalReport report;
    report.queries = queries.size();
    report.k_values = options.k_values;
    std::sort(report.k_values.begin(), report.k_values.end());

    std::vector<Chunk> structural;
    auto structural_corpus = [&]() -> const std::vector<Chunk>& {
        if (structural.empty()) {
            for (const auto& [source, body] : documents) {
                auto chunks = structural_chunks(body, source, config);
                std::move(chunks.begin(), chunks.end(), std::back_inserter(structural));
            }
        }
        return structural;
    };

    for (const auto& name : options.configs) {
        EvalRow row;
        row.config = name;
        row.label = label_for(name, options.fixed_window);

        std::vector<Chunk> owned;
        const std::vector<Chunk>* corpus = nullptr;
        if (name == "A") {
            for (const auto& [source, body] : documents) {
                auto chunks = fixed_size_chunk(body, options.fixed_window);
                for (auto& c : chunks) c.source_document = source;
                finalize(chunks);
                std::move(chunks.begin(), chunks.end(), std::back_inserter(owned));
            }
            corpus = &owned;
        } else if (name == "C") {
            for (const auto& [source, body] : documents) {
                auto result = run_pipeline_text(body, source, config, chat_client);
                std::move(result.chunks.begin(), result.chunks.end(), std::back_inserter(owned));
            }
            corpus = &owned;
        } else {
            corpus = &structural_corpus();
        }
        row.chunks = corpus->size();
        if (corpus->empty()) throw std::runtime_error("configuration " + name + " produced no chunks");

        FirstRanks ranks;
        ranks.reserve(queries.size());
        if (name == "D") {
            Bm25Index index(texts_of(*corpus, IndexMode::raw));
            for (const auto& q : queries) {
                auto result = rank(index.scores(q.query), *corpus, depth);
                result.query_id = q.id;
                ranks.push_back(first_relevant_rank(result, *corpus, q, depth));
            }
        } else {
            const IndexMode mode = name == "C" ? options.config_c_mode : IndexMode::raw;
            DenseIndex index(*corpus, mode, embedding_client, options.embedding_model);
            std::vector<std::string> query_texts;
            for (const auto& q : queries) query_texts.push_back(q.query);
            auto query_vectors = embedding_client.embed_texts(query_texts, options.embedding_model);
            for (std::size_t i = 0; i < queries.size(); ++i) {
                auto result = index.search_vector(query_vectors[i], depth);
                result.query_id = queries[i].id;
                ranks.push_back(first_relevant_rank(result, *corpus, queries[i], depth));
            }
        }

        for (auto k : report.k_values) row.recall[k] = recall_at_k(ranks, k);
        row.mrr = mean_reciprocal_rank(ranks);
        spdlog::info("config {}: {} chunks, MRR {:.3f}", name, row.chunks, row.mrr);
        report.rows.push_back(std::move(row));
    }
    return report;
}

}  // namespace mdkeychunker::eval
