#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "cotprune/tokenizer.hpp"
#include "cotprune/types.hpp"

namespace cotprune {

struct PruneReport {
    std::size_t samples_total = 0;
    std::size_t stage1_ok = 0;
    std::size_t stage1_fallback = 0;
    std::size_t stage2_ok = 0;
    std::size_t failed = 0;
    std::size_t tokens_before = 0;
    std::size_t tokens_after_stage1 = 0;
    std::size_t tokens_after_stage2 = 0;
    double mean_tokens_before = 0.0;
    double mean_tokens_after = 0.0;
    double reduction_pct = 0.0;
    std::map<int, std::size_t> retries_histogram;
    std::size_t budget_violations = 0;
    std::size_t unclosed_fence_caveats = 0;
    std::size_t malformed_lines_skipped = 0;

    bool operator==(const PruneReport&) const = default;
};

/// Percentage reduction from `before` to `after`; 0 when before is 0.
double reduction_pct(std::size_t before, std::size_t after);

/// Recomputes every aggregate from the processed corpus, so re-running the
/// stats pass over an output file reproduces the report exactly. Per-stage
/// token sums cover only samples that hold that stage's artifact; samples
/// that failed earlier contribute to tokens_before alone. stage1_fallback
/// counts samples that fell back whether or not they went on to refinement.
PruneReport compute_report(const std::vector<Sample>& samples,
                           const Tokenizer& tokenizer,
                           std::size_t malformed_lines_skipped = 0);

std::string report_to_json(const PruneReport& report);
PruneReport report_from_json(const std::string& text);

} // namespace cotprune
