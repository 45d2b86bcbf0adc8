#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "mdkeychunker/chunk_json.hpp"
#include "mdkeychunker/config.hpp"
#include "mdkeychunker/eval.hpp"
#include "mdkeychunker/pipeline.hpp"

namespace mk = mdkeychunker;

namespace {

struct CommonFlags {
    std::optional<std::size_t> min_chunk_size, max_chunk_size, max_merged_size, min_orphan_size;
    std::optional<std::string> provider, base_url, model, mock_script, log_level;
    bool no_merge = false;
    bool no_rolling_keys = false;

    mk::ConfigOverrides overrides() const {
        mk::ConfigOverrides o;
        o.min_chunk_size = min_chunk_size;
        o.max_chunk_size = max_chunk_size;
        o.max_merged_size = max_merged_size;
        o.min_orphan_size = min_orphan_size;
        o.provider = provider;
        o.base_url = base_url;
        o.model = model;
        o.mock_script = mock_script;
        o.log_level = log_level;
        if (no_merge) o.merge_by_keys = false;
        if (no_rolling_keys) o.rolling_keys_enabled = false;
        return o;
    }
};

void add_common(CLI::App* cmd, CommonFlags& f) {
    cmd->add_option("--min-chunk-size", f.min_chunk_size, "Minimum chunk size in characters");
    cmd->add_option("--max-chunk-size", f.max_chunk_size, "Soft maximum chunk size in characters");
    cmd->add_option("--max-merged-size", f.max_merged_size, "Size cap for key-based merges");
    cmd->add_option("--min-orphan-size", f.min_orphan_size, "Orphans below this size get context");
    cmd->add_flag("--no-merge", f.no_merge, "Skip key-based merging");
    cmd->add_flag("--no-rolling-keys", f.no_rolling_keys, "Do not pass earlier keys to the model");
    cmd->add_option("--provider", f.provider, "openai, openai_compatible or mock");
    cmd->add_option("--base-url", f.base_url, "Endpoint base URL, e.g. http://localhost:11434/v1");
    cmd->add_option("--model", f.model, "Chat model name");
    cmd->add_option("--mock-script", f.mock_script, "JSON script for the mock provider");
    cmd->add_option("--log-level", f.log_level, "DEBUG, INFO, WARNING, ERROR or CRITICAL");
}

void write_text(const std::string& path, const std::string& content) {
    if (path == "-") {
        std::cout << content;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << content;
    if (!out) throw std::runtime_error("error writing " + path);
}

std::vector<std::string> split_csv(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Structure-aware Markdown chunking with LLM enrichment and key-based restructuring"};
    app.require_subcommand(1);

    CommonFlags process_flags;
    std::string input, out_path = "-", stats_path;
    std::size_t jobs = 1;
    auto* process = app.add_subcommand("process", "Chunk, enrich and restructure Markdown files");
    process->add_option("input", input, "Markdown file or directory")->required();
    process->add_option("-o,--out", out_path, "Output JSON file ('-' for stdout)");
    process->add_option("-j,--jobs", jobs, "Documents processed in parallel")->check(CLI::PositiveNumber);
    process->add_option("--stats", stats_path, "Write run statistics as JSON");
    add_common(process, process_flags);

    CommonFlags eval_flags;
    std::string corpus, queries_path, configs = "A,B,C,D", eval_out = "-", c_mode = "augmented";
    std::string embedding_model = "mxbai-embed-large";
    std::optional<std::string> embedding_base_url;
    auto* eval = app.add_subcommand("eval", "Compare retrieval over four chunking configurations");
    eval->add_option("--corpus", corpus, "Directory of Markdown documents")->required();
    eval->add_option("--queries", queries_path, "JSONL queries with gold annotations")->required();
    eval->add_option("--configs", configs, "Comma-separated subset of A,B,C,D");
    eval->add_option("-o,--out", eval_out, "Results JSON file ('-' for stdout)");
    eval->add_option("--config-c-mode", c_mode, "Index text for C")->check(CLI::IsMember({"raw", "augmented"}));
    eval->add_option("--embedding-model", embedding_model, "Embedding model name");
    eval->add_option("--embedding-base-url", embedding_base_url, "Embedding endpoint (defaults to --base-url)");
    add_common(eval, eval_flags);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*process) {
            auto config = mk::load_config(mk::process_env(), process_flags.overrides());
            mk::configure_logging(config.log_level);
            mk::LlmClient client(mk::make_transport(config.llm), mk::RetryPolicy::from(config.retry));
            auto result = mk::run_input(input, config, client, jobs);
            write_text(out_path, mk::serialize_chunks(result.chunks));
            if (!stats_path.empty()) write_text(stats_path, result.stats.to_json().dump(2) + "\n");
            spdlog::info("wrote {} chunks from {} document(s)", result.chunks.size(), result.stats.documents);
            return EXIT_SUCCESS;
        }

        auto config = mk::load_config(mk::process_env(), eval_flags.overrides());
        mk::configure_logging(config.log_level);
        mk::LlmClient chat(mk::make_transport(config.llm), mk::RetryPolicy::from(config.retry));
        mk::LlmSettings embed_settings = config.llm;
        if (embedding_base_url) {
            embed_settings.base_url = *embedding_base_url;
            if (embed_settings.provider == "openai") embed_settings.provider = "openai_compatible";
        }
        mk::LlmClient embedder(mk::make_transport(embed_settings), mk::RetryPolicy::from(config.retry));

        mk::eval::EvalOptions options;
        options.configs = split_csv(configs);
        options.config_c_mode = c_mode == "raw" ? mk::eval::IndexMode::raw : mk::eval::IndexMode::augmented;
        options.embedding_model = embedding_model;
        auto report = mk::eval::run_eval(corpus, mk::eval::load_queries(queries_path), config, chat, embedder, options);
        write_text(eval_out, report.to_json().dump(2) + "\n");
        std::cerr << report.to_table();
        return EXIT_SUCCESS;
    } catch (const mk::ConfigError& e) {
        std::cerr << "configuration error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
