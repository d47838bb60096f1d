#include "cotprune/refiner.hpp"

#include <algorithm>
#include <numeric>

#include "cotprune/errors.hpp"
#include "cotprune/segmenter.hpp"

namespace cotprune {

namespace {

std::string join_texts(std::span<const ScoredStep> steps,
                       const std::vector<bool>& removed) {
    std::string out;
    bool first = true;
    for (std::size_t i = 0; i < steps.size(); ++i) {
        if (removed[i]) continue;
        if (!first) out.append(StepSequence::kDelimiter);
        out.append(steps[i].text);
        first = false;
    }
    return out;
}

} // namespace

RefineResult fine_prune(std::span<const ScoredStep> steps, std::size_t budget,
                        const Tokenizer& tokenizer) {
    if (steps.empty()) {
        throw DomainError("cannot refine an empty step list");
    }
    if (budget < 1) {
        throw DomainError("budget must be >= 1");
    }

    RefineResult result;
    std::vector<bool> removed(steps.size(), false);
    std::size_t count = tokenizer.count(join_texts(steps, removed));
    if (count > budget) {
        // Removal candidates in ascending (surprisal, original index) order;
        // scores stay frozen from the single scoring pass.
        std::vector<std::size_t> order(steps.size());
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) {
                      if (steps[a].surprisal != steps[b].surprisal) {
                          return steps[a].surprisal < steps[b].surprisal;
                      }
                      return steps[a].step_index < steps[b].step_index;
                  });

        std::size_t surviving = steps.size();
        for (std::size_t k : order) {
            if (surviving == 1) break;
            removed[k] = true;
            --surviving;
            result.removed_indices.push_back(steps[k].step_index);
            count = tokenizer.count(join_texts(steps, removed));
            if (count <= budget) break;
        }
        result.budget_violation = count > budget;
    }

    for (std::size_t i = 0; i < steps.size(); ++i) {
        if (!removed[i]) result.steps.push_back(steps[i]);
    }
    return result;
}

void assemble_final(Sample& sample, const RefineResult& result) {
    if (sample.status != Status::stage1_ok &&
        sample.status != Status::stage1_fallback) {
        throw StateError("assemble_final requires a coarse-pruned sample, got " +
                         std::string(to_string(sample.status)));
    }
    std::string final_text;
    for (std::size_t i = 0; i < result.steps.size(); ++i) {
        if (i > 0) final_text.append(StepSequence::kDelimiter);
        final_text.append(result.steps[i].text);
    }
    sample.cot_final = std::move(final_text);
    sample.status = Status::stage2_ok;
    if (result.budget_violation) {
        sample.add_flag(kFlagBudgetViolation);
    }
}

} // namespace cotprune
