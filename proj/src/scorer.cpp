#include "cotprune/scorer.hpp"

#include <algorithm>
#include <cmath>

#include "cotprune/errors.hpp"

namespace cotprune {

double surprisal(double logprob) {
    if (logprob > 0.0) {
        throw DomainError("logprob must be <= 0");
    }
    // Normalizes -0.0 to 0.0.
    return 0.0 - logprob;
}

double entropy_topk(const std::vector<std::pair<std::string, double>>& alts) {
    if (alts.empty()) {
        throw DomainError("entropy needs at least one alternative");
    }
    double max_lp = alts[0].second;
    for (const auto& [token, lp] : alts) {
        if (lp > 0.0) throw DomainError("logprob must be <= 0");
        max_lp = std::max(max_lp, lp);
    }
    double z = 0.0;
    for (const auto& [token, lp] : alts) z += std::exp(lp - max_lp);
    double log_z = std::log(z) + max_lp;
    double h = 0.0;
    for (const auto& [token, lp] : alts) {
        double log_p = lp - log_z;
        h -= std::exp(log_p) * log_p;
    }
    return std::max(h, 0.0);
}

double step_perplexity(const std::vector<double>& logprobs) {
    if (logprobs.empty()) {
        throw DomainError("perplexity needs at least one token");
    }
    double sum = 0.0;
    for (double lp : logprobs) {
        if (lp > 0.0) throw DomainError("logprob must be <= 0");
        sum += -lp;
    }
    return std::exp(sum / static_cast<double>(logprobs.size()));
}

std::string scoring_context(std::string_view question,
                            const StepSequence& steps) {
    std::string out(question);
    out.append(StepSequence::kDelimiter);
    out.append(join_steps(steps));
    return out;
}

std::vector<ScoredStep> score_steps(std::string_view question,
                                    const StepSequence& coarse,
                                    Gateway& gateway,
                                    const std::string& model_name) {
    if (coarse.empty()) {
        throw DomainError("cannot score an empty step sequence");
    }
    std::string context = scoring_context(question, coarse);
    ScoredSequence seq = gateway.score_sequence(context, model_name);

    std::vector<ScoredStep> out;
    out.reserve(coarse.size());
    std::size_t offset = question.size() + StepSequence::kDelimiter.size();
    for (std::size_t i = 0; i < coarse.size(); ++i) {
        std::size_t start = offset;
        std::size_t end = start + coarse[i].size();
        offset = end + StepSequence::kDelimiter.size();

        auto it = std::lower_bound(
            seq.tokens.begin(), seq.tokens.end(), start,
            [](const TokenSpan& span, std::size_t s) {
                return span.byte_start < s;
            });
        if (it == seq.tokens.end() || it->byte_start >= end) {
            throw IntegrityError("no token starts inside step " +
                                 std::to_string(i));
        }

        ScoredStep scored;
        scored.step_index = i;
        scored.text = coarse[i];
        scored.first_token = *it;
        scored.surprisal = surprisal(*it->logprob);

        if (!seq.top_alternatives.empty() &&
            !seq.top_alternatives[it->index].empty()) {
            scored.entropy_topk =
                entropy_topk(seq.top_alternatives[it->index]);
        }

        std::vector<double> step_lps;
        for (auto jt = it; jt != seq.tokens.end() && jt->byte_start < end;
             ++jt) {
            step_lps.push_back(*jt->logprob);
        }
        scored.step_ppl = step_perplexity(step_lps);

        out.push_back(std::move(scored));
    }
    return out;
}

} // namespace cotprune
