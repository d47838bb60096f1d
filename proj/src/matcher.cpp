#include "cotprune/matcher.hpp"

#include <algorithm>
#include <array>
#include <vector>

#include "cotprune/errors.hpp"

namespace cotprune {

namespace {

struct Block {
    std::size_t a_start;
    std::size_t b_start;
    std::size_t size;
};

// Positions of each byte value in b, ascending, for O(matches) inner loops.
struct PositionIndex {
    std::array<std::vector<std::size_t>, 256> pos;

    explicit PositionIndex(std::string_view b) {
        for (std::size_t j = 0; j < b.size(); ++j) {
            pos[static_cast<unsigned char>(b[j])].push_back(j);
        }
    }
};

// Longest common substring of a[alo,ahi) and b[blo,bhi). Ties break toward
// the smallest start in a, then in b; scanning i ascending with j ascending
// and a strict size comparison yields exactly that block first.
Block longest_match(std::string_view a, std::size_t alo, std::size_t ahi,
                    const PositionIndex& bindex, std::size_t blo,
                    std::size_t bhi) {
    Block best{alo, blo, 0};
    // j2len[j] = length of the common suffix ending at (i-1, j-1).
    std::vector<std::pair<std::size_t, std::size_t>> j2len, next;
    for (std::size_t i = alo; i < ahi; ++i) {
        next.clear();
        const auto& positions = bindex.pos[static_cast<unsigned char>(a[i])];
        auto it = std::lower_bound(positions.begin(), positions.end(), blo);
        auto prev = j2len.begin();
        for (; it != positions.end() && *it < bhi; ++it) {
            std::size_t j = *it;
            std::size_t k = 1;
            while (prev != j2len.end() && prev->first + 1 < j) ++prev;
            if (prev != j2len.end() && prev->first + 1 == j) {
                k = prev->second + 1;
            }
            next.emplace_back(j, k);
            if (k > best.size) {
                best = {i + 1 - k, j + 1 - k, k};
            }
        }
        std::swap(j2len, next);
    }
    return best;
}

std::size_t matched_total(std::string_view a, std::size_t alo, std::size_t ahi,
                          const PositionIndex& bindex, std::size_t blo,
                          std::size_t bhi) {
    if (alo >= ahi || blo >= bhi) return 0;
    Block m = longest_match(a, alo, ahi, bindex, blo, bhi);
    if (m.size == 0) return 0;
    return m.size + matched_total(a, alo, m.a_start, bindex, blo, m.b_start) +
           matched_total(a, m.a_start + m.size, ahi, bindex,
                         m.b_start + m.size, bhi);
}

} // namespace

double gestalt_similarity(std::string_view a, std::string_view b) {
    if (a.empty() && b.empty()) return 1.0;
    if (a.empty() || b.empty()) return 0.0;
    PositionIndex bindex(b);
    std::size_t m = matched_total(a, 0, a.size(), bindex, 0, b.size());
    return 2.0 * static_cast<double>(m) /
           static_cast<double>(a.size() + b.size());
}

MatchOutcome pattern_match(const StepSequence& origin,
                           const StepSequence& coarse, double tau) {
    if (!(tau >= 0.0 && tau <= 1.0)) {
        throw DomainError("tau must be in [0, 1]");
    }
    MatchOutcome out;
    std::size_t origin_idx = 0;
    for (std::size_t ci = 0; ci < coarse.size(); ++ci) {
        bool found = false;
        while (origin_idx < origin.size()) {
            double score = gestalt_similarity(coarse[ci], origin[origin_idx]);
            ++origin_idx;
            if (score >= tau) {
                out.alignment.push_back({ci, origin_idx - 1, score});
                found = true;
                break;
            }
        }
        if (!found) {
            out.valid = false;
            out.first_failure = ci;
            return out;
        }
    }
    out.valid = true;
    return out;
}

} // namespace cotprune
