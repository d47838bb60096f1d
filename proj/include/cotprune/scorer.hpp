#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cotprune/gateway.hpp"
#include "cotprune/segmenter.hpp"
#include "cotprune/types.hpp"

namespace cotprune {

struct ScoredStep {
    std::size_t step_index = 0;
    std::string text;
    TokenSpan first_token;
    double surprisal = 0.0;
    std::optional<double> entropy_topk;  // diagnostics only
    std::optional<double> step_ppl;      // diagnostics only
};

/// Surprisal in nats from a log probability.
double surprisal(double logprob);

/// Shannon entropy of the top-k alternative distribution after renormalizing
/// it to sum to one. Throws DomainError when empty.
double entropy_topk(const std::vector<std::pair<std::string, double>>& alts);

/// exp of the mean negative logprob over a step's tokens.
double step_perplexity(const std::vector<double>& logprobs);

/// The exact text sent for scoring: question, blank line, joined steps.
/// Step offsets inside this string locate each step's first token.
std::string scoring_context(std::string_view question, const StepSequence& steps);

/// Scores every step of `coarse` in a single pass over the full context.
/// A step's score is the surprisal of its first token under the scoring
/// model: the first returned span starting at or after the step's first
/// byte. Throws IntegrityError when the returned spans cannot be aligned
/// with the step boundaries.
std::vector<ScoredStep> score_steps(std::string_view question,
                                    const StepSequence& coarse,
                                    Gateway& gateway,
                                    const std::string& model_name);

} // namespace cotprune
