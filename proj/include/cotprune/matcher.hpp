#pragma once

#include <cstddef>
#include <optional>
#include <string_view>
#include <vector>

#include "cotprune/segmenter.hpp"

namespace cotprune {

struct AlignedPair {
    std::size_t coarse_index = 0;
    std::size_t origin_index = 0;
    double score = 0.0;

    bool operator==(const AlignedPair&) const = default;
};

/// Result of validating a coarse CoT against its origin. When valid, the
/// alignment covers every coarse step exactly once with strictly increasing
/// origin indices, and every score is >= the tau used for the run.
struct MatchOutcome {
    bool valid = false;
    std::vector<AlignedPair> alignment;
    std::optional<std::size_t> first_failure;  // coarse index that found no match
};

/// Gestalt pattern matching (Ratcliff-Obershelp): 2M / (|a| + |b|) where M is
/// the total number of matched bytes from recursive longest-common-substring
/// decomposition. Ties in the longest common substring break toward the
/// smallest starting index in `a`, then in `b`. Operates on raw bytes with no
/// normalization. Both inputs empty -> 1.0, exactly one empty -> 0.0.
double gestalt_similarity(std::string_view a, std::string_view b);

/// Certifies `coarse` as an ordered substructure of `origin`: one forward
/// cursor over origin steps; each coarse step consumes origin steps until one
/// scores >= tau (that one is consumed too), else the whole match fails.
/// An origin step is never revisited. Empty coarse is trivially valid.
/// Throws DomainError unless tau is in [0, 1].
MatchOutcome pattern_match(const StepSequence& origin,
                           const StepSequence& coarse,
                           double tau);

} // namespace cotprune
