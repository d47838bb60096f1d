#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace cotprune {

/// Lifecycle of a sample through the two pruning stages.
/// Transitions form a DAG:
///   pending -> {stage1_ok, stage1_fallback, failed}
///   stage1_ok / stage1_fallback -> {stage2_ok, failed}
/// No transition skips stage 1.
enum class Status {
    pending,
    stage1_ok,
    stage1_fallback,
    stage2_ok,
    failed,
};

std::string_view to_string(Status s);
Status status_from_string(std::string_view s);

/// One token's position within a scored text: byte offsets into the source
/// plus the natural-log probability assigned by the scoring model.
/// Tokenizer spans carry no logprob.
struct TokenSpan {
    std::size_t index = 0;
    std::size_t byte_start = 0;
    std::size_t byte_end = 0;
    std::optional<double> logprob;

    bool operator==(const TokenSpan&) const = default;
};

/// Per-step audit record of the stage-2 decision.
struct StepScoreTrace {
    std::size_t step_index = 0;
    double surprisal = 0.0;
    bool kept = true;

    bool operator==(const StepScoreTrace&) const = default;
};

// Well-known flag names attached to samples as processing caveats.
inline constexpr std::string_view kFlagStage1Fallback = "stage1_fallback";
inline constexpr std::string_view kFlagBudgetViolation = "budget_violation";
inline constexpr std::string_view kFlagUnclosedFence = "unclosed_fence";
inline constexpr std::string_view kFlagSingleStepSkip = "single_step_skip";

/// One training triplet plus the per-stage artifacts accumulated while it
/// moves through the pipeline.
struct Sample {
    std::string id;
    std::string question;
    std::string cot_original;
    std::string answer;

    std::optional<std::string> cot_direct;  // anchor, retained for audit only
    std::optional<std::string> cot_coarse;
    std::optional<std::string> cot_final;

    Status status = Status::pending;
    int retries_used = 0;
    std::vector<std::string> flags;
    std::vector<StepScoreTrace> surprisal_trace;
    std::optional<std::string> error;

    bool has_flag(std::string_view name) const;
    void add_flag(std::string_view name);

    bool operator==(const Sample&) const = default;
};

/// A not-yet-validated corpus record, as parsed from one input line.
struct RawRecord {
    std::optional<std::string> id;
    std::optional<std::string> question;
    std::optional<std::string> cot;
    std::optional<std::string> answer;
};

/// Checks the record and produces a pending Sample. Trailing whitespace is
/// trimmed from every text field. Throws ValidationError naming the field
/// that is missing or empty.
Sample validate_sample(const RawRecord& raw);

/// Structural invariant check used by corpus audits. Returns human-readable
/// descriptions of every violated invariant, empty when the sample is sound.
std::vector<std::string> sample_invariant_violations(const Sample& s);

} // namespace cotprune
