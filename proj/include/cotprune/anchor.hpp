#pragma once

#include <string>
#include <string_view>

#include "cotprune/gateway.hpp"
#include "cotprune/prompts.hpp"
#include "cotprune/types.hpp"

namespace cotprune {

struct Stage1Config {
    double tau = 0.6;
    int max_retries = 8;
    double anchor_temperature = 0.0;
    double prune_temperature = 2.0;
    double top_p = 1.0;
    int max_output_tokens = 16384;
    std::string model_name;
};

/// If the text is wrapped in a single Markdown code fence (first line opens
/// with ``` and the last non-empty line is exactly ```), returns the interior;
/// otherwise returns the input unchanged.
std::string strip_code_fence(std::string_view text);

/// Runs the anchor-guided coarse prune on one pending sample in place:
/// generates the anchor at the deterministic temperature, then asks for a
/// pruned variant at the high-diversity temperature until pattern matching
/// against the original accepts one, up to cfg.max_retries attempts. On
/// exhaustion the original text is kept byte-for-byte and the sample is
/// marked as a fallback. Single-step CoTs skip generation entirely; there is
/// nothing to prune at step granularity.
void coarse_prune(Sample& sample, const Stage1Config& cfg, Gateway& gateway,
                  const PromptTemplates& prompts);

} // namespace cotprune
