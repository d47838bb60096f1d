// Compares the serial reference driver against the parallel one on a
// synthetic corpus, and measures raw matcher throughput. The mock backends
// sleep a little per call so the corpus comparison reflects scheduling, not
// hash speed.
#include <chrono>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "cotprune/matcher.hpp"
#include "cotprune/mock_backends.hpp"
#include "cotprune/pipeline.hpp"
#include "cotprune/prompts.hpp"
#include "cotprune/segmenter.hpp"
#include "cotprune/tokenizer.hpp"
#include "cotprune/types.hpp"

#ifndef COTPRUNE_ASSET_DIR
#define COTPRUNE_ASSET_DIR "assets/prompts"
#endif

namespace {

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point start) {
    return std::chrono::duration<double>(clock_type::now() - start).count();
}

std::vector<cotprune::Sample> make_corpus(std::size_t n) {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> step_count(6, 14);
    std::uniform_int_distribution<int> word(0, 999);

    std::vector<cotprune::Sample> samples;
    samples.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        cotprune::Sample s;
        s.id = "bench-" + std::to_string(i);
        s.question = "compute table " + std::to_string(i);
        s.answer = "def f():\n    return " + std::to_string(i);
        std::string cot;
        int steps = step_count(rng);
        for (int k = 0; k < steps; ++k) {
            if (k > 0) cot += "\n\n";
            cot += "Step " + std::to_string(k) + ": consider value " +
                   std::to_string(word(rng)) + " then value " +
                   std::to_string(word(rng));
        }
        s.cot_original = cot;
        samples.push_back(std::move(s));
    }
    return samples;
}

double run_driver(bool parallel, std::size_t n, int threads) {
    cotprune::MockConfig mcfg;
    mcfg.seed = 99;
    mcfg.artificial_delay_ms = 2;
    cotprune::GatewayConfig gcfg;
    gcfg.max_in_flight = threads;
    cotprune::Gateway gateway(std::make_unique<cotprune::MockGenerator>(mcfg),
                              std::make_unique<cotprune::MockScorer>(mcfg),
                              gcfg);
    cotprune::PromptTemplates prompts =
        cotprune::PromptTemplates::load(COTPRUNE_ASSET_DIR);
    cotprune::WhitespaceTokenizer tokenizer;

    cotprune::PipelineConfig cfg;
    cfg.threads = threads;
    std::vector<cotprune::Sample> samples = make_corpus(n);

    auto start = clock_type::now();
    if (parallel) {
        run_corpus_parallel(samples, cfg, gateway, prompts, tokenizer);
    } else {
        run_corpus_serial(samples, cfg, gateway, prompts, tokenizer);
    }
    return seconds_since(start);
}

void bench_matcher() {
    std::mt19937_64 rng(13);
    std::uniform_int_distribution<int> len(20, 64);
    std::uniform_int_distribution<int> ch('a', 'f');

    std::vector<std::pair<std::string, std::string>> pairs;
    pairs.reserve(20000);
    for (int i = 0; i < 20000; ++i) {
        std::string a, b;
        int la = len(rng), lb = len(rng);
        for (int k = 0; k < la; ++k) a.push_back(static_cast<char>(ch(rng)));
        for (int k = 0; k < lb; ++k) b.push_back(static_cast<char>(ch(rng)));
        pairs.emplace_back(std::move(a), std::move(b));
    }

    auto start = clock_type::now();
    double acc = 0.0;
    for (const auto& [a, b] : pairs) {
        acc += cotprune::gestalt_similarity(a, b);
    }
    double elapsed = seconds_since(start);
    std::printf("matcher      %zu pairs in %.3fs (%.0f pairs/s, checksum %.4f)\n",
                pairs.size(), elapsed, pairs.size() / elapsed, acc);
}

} // namespace

int main(int argc, char** argv) {
    std::size_t n = 64;
    int threads = 8;
    if (argc > 1) n = static_cast<std::size_t>(std::stoul(argv[1]));
    if (argc > 2) threads = std::stoi(argv[2]);

    double serial = run_driver(false, n, threads);
    std::printf("corpus serial    %zu samples in %.3fs\n", n, serial);
    double parallel = run_driver(true, n, threads);
    std::printf("corpus parallel  %zu samples in %.3fs (%d threads, %.2fx)\n",
                n, parallel, threads, serial / parallel);

    bench_matcher();
    return 0;
}
