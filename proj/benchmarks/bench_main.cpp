#include <benchmark/benchmark.h>

#include <random>
#include <string>

#include "mdkeychunker/eval.hpp"
#include "mdkeychunker/md_parser.hpp"
#include "mdkeychunker/restructurer.hpp"

using namespace mdkeychunker;

namespace {

std::string markdown(std::size_t bytes) {
    std::mt19937 rng(9);
    const char* words[] = {"cache", "replica", "index", "shard", "token", "query", "fence", "table"};
    std::string out;
    int section = 0;
    while (out.size() < bytes) {
        switch (rng() % 5) {
            case 0:
                out += "## Section " + std::to_string(section++) + "\n\n";
                break;
            case 1:
                out += "```\nrun --flag " + std::to_string(rng() % 100) + "\n```\n\n";
                break;
            case 2:
                out += "| k | v |\n|---|---|\n| a | 1 |\n\n";
                break;
            default:
                for (int i = 0; i < 60; ++i) {
                    out += words[rng() % 8];
                    out += ' ';
                }
                out += "\n\n";
        }
    }
    return out;
}

std::vector<Chunk> keyed_chunks(std::size_t n) {
    std::mt19937 rng(3);
    std::vector<Chunk> chunks(n);
    for (std::size_t i = 0; i < n; ++i) {
        chunks[i].text = std::string(100 + rng() % 1400, 'x');
        chunks[i].key = "topic " + std::to_string(rng() % (n / 4 + 1));
        chunks[i].summary = "Summary.";
        chunks[i].section_title = "Doc > Part";
        chunks[i].start_line = static_cast<int>(i * 10 + 1);
        chunks[i].end_line = static_cast<int>(i * 10 + 8);
    }
    return chunks;
}

void BM_ParseAndChunk(benchmark::State& state) {
    const auto doc = markdown(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(chunk_document(parse_blocks(doc), PipelineConfig{}));
    }
    state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations()) * state.range(0));
}
BENCHMARK(BM_ParseAndChunk)->RangeMultiplier(4)->Range(64 << 10, 4 << 20)->Unit(benchmark::kMillisecond);

void BM_Restructure(benchmark::State& state) {
    const auto chunks = keyed_chunks(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) benchmark::DoNotOptimize(restructure(chunks, PipelineConfig{}));
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * state.range(0));
}
BENCHMARK(BM_Restructure)->RangeMultiplier(4)->Range(16, 4096)->Unit(benchmark::kMicrosecond);

void BM_Bm25Query(benchmark::State& state) {
    const auto doc = markdown(static_cast<std::size_t>(state.range(0)));
    std::vector<std::string> texts;
    for (const auto& c : eval::fixed_size_chunk(doc)) texts.push_back(c.text);
    const eval::Bm25Index index(texts);
    for (auto _ : state) benchmark::DoNotOptimize(index.top_k("replica shard query", 10));
    state.counters["chunks"] = static_cast<double>(texts.size());
}
BENCHMARK(BM_Bm25Query)->RangeMultiplier(4)->Range(64 << 10, 4 << 20)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
