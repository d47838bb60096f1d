#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "cotprune/anchor.hpp"
#include "cotprune/gateway.hpp"
#include "cotprune/prompts.hpp"
#include "cotprune/tokenizer.hpp"
#include "cotprune/types.hpp"

namespace cotprune {

enum class RunStage { full, stage1_only, stage2_only };

struct PipelineConfig {
    Stage1Config stage1;
    std::string score_model;
    std::size_t budget = 4096;
    RunStage stage = RunStage::full;
    int threads = 0;  // 0 = library default
};

/// Drives one sample through the configured stages, catching per-sample
/// errors into status=failed with the message preserved. Transport
/// exhaustion and auth failures propagate; they are run-level conditions.
void run_sample(Sample& sample, const PipelineConfig& cfg, Gateway& gateway,
                const PromptTemplates& prompts, const Tokenizer& tokenizer);

using SampleCallback = std::function<void(const Sample&)>;

/// Serial reference driver. Processes samples in order; `on_done` fires after
/// each sample completes, in input order.
void run_corpus_serial(std::vector<Sample>& samples, const PipelineConfig& cfg,
                       Gateway& gateway, const PromptTemplates& prompts,
                       const Tokenizer& tokenizer,
                       const SampleCallback& on_done = {});

/// Parallel driver over samples. Completion callbacks still fire in input
/// order, so downstream writers need no reordering buffer. Results are
/// byte-identical to the serial driver by construction; the test suite
/// asserts it.
void run_corpus_parallel(std::vector<Sample>& samples,
                         const PipelineConfig& cfg, Gateway& gateway,
                         const PromptTemplates& prompts,
                         const Tokenizer& tokenizer,
                         const SampleCallback& on_done = {});

struct ValidationReport {
    std::size_t samples_checked = 0;
    std::vector<std::pair<std::string, std::string>> violations;  // id, message
};

/// Audits a processed corpus: structural sample invariants for everything,
/// and for each refined sample (a) the final steps are an ordered exact
/// subsequence of the coarse steps, (b) the coarse CoT still pattern-matches
/// the original at tau, (c) the final text fits the budget unless flagged.
ValidationReport validate_corpus(const std::vector<Sample>& samples,
                                 double tau, std::size_t budget,
                                 const Tokenizer& tokenizer, int threads = 0);

} // namespace cotprune
