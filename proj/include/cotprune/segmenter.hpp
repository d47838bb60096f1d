#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace cotprune {

/// An ordered list of reasoning steps. The delimiter between steps is fixed
/// at one blank line. Invariants: no step is empty or whitespace-only, and
/// no step contains a blank line internally (it would re-split).
class StepSequence {
public:
    static constexpr std::string_view kDelimiter = "\n\n";

    StepSequence() = default;

    /// Validates the invariants; throws DomainError on violation.
    explicit StepSequence(std::vector<std::string> steps);

    std::size_t size() const { return steps_.size(); }
    bool empty() const { return steps_.empty(); }
    const std::string& operator[](std::size_t i) const { return steps_[i]; }
    const std::vector<std::string>& steps() const { return steps_; }

    auto begin() const { return steps_.begin(); }
    auto end() const { return steps_.end(); }

    bool operator==(const StepSequence&) const = default;

private:
    friend StepSequence split_steps(std::string_view);
    struct Unchecked {};
    StepSequence(std::vector<std::string> steps, Unchecked)
        : steps_(std::move(steps)) {}

    std::vector<std::string> steps_;
};

/// Splits a CoT into steps on runs of blank lines. "\r\n" is normalized to
/// "\n" first; a line counts as blank when it holds only spaces and tabs.
/// Steps keep their internal single newlines, so code blocks stay intact.
/// Total function; empty input yields an empty sequence.
StepSequence split_steps(std::string_view cot);

/// Joins steps with exactly one blank line between consecutive steps and no
/// trailing delimiter. split_steps(join_steps(s)) == s for every valid s.
std::string join_steps(const StepSequence& seq);

/// True when the step holds an odd number of ``` fence markers, i.e. it
/// begins or ends inside an unclosed fenced block. Splitting does not protect
/// fences, so this is surfaced as a caveat rather than prevented.
bool step_has_unclosed_fence(std::string_view step);

} // namespace cotprune
