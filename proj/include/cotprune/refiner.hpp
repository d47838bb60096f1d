#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "cotprune/scorer.hpp"
#include "cotprune/tokenizer.hpp"
#include "cotprune/types.hpp"

namespace cotprune {

struct RefineResult {
    std::vector<ScoredStep> steps;           // survivors, original order
    std::vector<std::size_t> removed_indices;  // original indices, removal order
    bool budget_violation = false;
};

/// Iterative low-surprisal removal. If the joined text already fits the
/// budget nothing is removed. Otherwise steps leave in ascending
/// (surprisal, step_index) order, one at a time, with the joined token count
/// recomputed after each removal; the first removal that brings the text
/// within budget ends the loop. The final step is never removed: running out
/// of other steps while still over budget sets budget_violation instead.
RefineResult fine_prune(std::span<const ScoredStep> steps, std::size_t budget,
                        const Tokenizer& tokenizer);

/// Joins the surviving steps into cot_final and advances the sample to
/// stage2_ok; a budget violation carries over as a flag. Requires a sample
/// that finished the coarse stage, throws StateError otherwise.
void assemble_final(Sample& sample, const RefineResult& result);

} // namespace cotprune
