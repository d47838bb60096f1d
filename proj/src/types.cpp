#include "cotprune/types.hpp"

#include <algorithm>
#include <array>
#include <utility>

#include "cotprune/errors.hpp"

namespace cotprune {

namespace {

constexpr std::array<std::pair<Status, std::string_view>, 5> kStatusNames{{
    {Status::pending, "pending"},
    {Status::stage1_ok, "stage1_ok"},
    {Status::stage1_fallback, "stage1_fallback"},
    {Status::stage2_ok, "stage2_ok"},
    {Status::failed, "failed"},
}};

std::string trim_trailing_ws(std::string_view text) {
    std::size_t end = text.size();
    while (end > 0) {
        char c = text[end - 1];
        if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' ||
            c == '\f') {
            --end;
        } else {
            break;
        }
    }
    return std::string(text.substr(0, end));
}

std::string require_field(const std::optional<std::string>& field,
                          std::string_view name) {
    if (!field.has_value()) {
        throw ValidationError("missing field: " + std::string(name));
    }
    std::string trimmed = trim_trailing_ws(*field);
    if (trimmed.empty()) {
        throw ValidationError("empty " + std::string(name));
    }
    return trimmed;
}

} // namespace

std::string_view to_string(Status s) {
    for (const auto& [value, name] : kStatusNames) {
        if (value == s) return name;
    }
    throw DomainError("unknown status value");
}

Status status_from_string(std::string_view s) {
    for (const auto& [value, name] : kStatusNames) {
        if (name == s) return value;
    }
    throw ValidationError("unknown status: " + std::string(s));
}

bool Sample::has_flag(std::string_view name) const {
    return std::find(flags.begin(), flags.end(), name) != flags.end();
}

void Sample::add_flag(std::string_view name) {
    if (!has_flag(name)) flags.emplace_back(name);
}

Sample validate_sample(const RawRecord& raw) {
    Sample s;
    s.question = require_field(raw.question, "question");
    s.cot_original = require_field(raw.cot, "cot");
    s.answer = require_field(raw.answer, "answer");
    if (raw.id.has_value()) {
        s.id = trim_trailing_ws(*raw.id);
        if (s.id.empty()) throw ValidationError("empty id");
    }
    s.status = Status::pending;
    return s;
}

std::vector<std::string> sample_invariant_violations(const Sample& s) {
    std::vector<std::string> out;
    auto require = [&](bool ok, std::string_view msg) {
        if (!ok) out.emplace_back(msg);
    };

    require(!s.id.empty(), "id is empty");
    require(!s.question.empty(), "question is empty");
    require(!s.cot_original.empty(), "cot_original is empty");
    require(!s.answer.empty(), "answer is empty");
    require(s.retries_used >= 0, "retries_used is negative");

    bool past_stage1 = s.status == Status::stage1_ok ||
                       s.status == Status::stage1_fallback ||
                       s.status == Status::stage2_ok;
    if (past_stage1) {
        require(s.cot_coarse.has_value(),
                "cot_coarse missing for a sample past stage 1");
    }
    if (s.status == Status::pending) {
        require(!s.cot_coarse.has_value(), "pending sample has cot_coarse");
        require(!s.cot_final.has_value(), "pending sample has cot_final");
    }
    if (s.status == Status::stage1_fallback ||
        s.has_flag(kFlagStage1Fallback)) {
        require(s.cot_coarse.has_value() && *s.cot_coarse == s.cot_original,
                "fallback sample's cot_coarse differs from cot_original");
    }
    if (s.cot_final.has_value()) {
        require(s.cot_coarse.has_value(), "cot_final present without cot_coarse");
        require(s.status == Status::stage2_ok,
                "cot_final present outside stage2_ok");
    }
    if (s.status == Status::stage2_ok) {
        require(s.cot_final.has_value(), "stage2_ok sample lacks cot_final");
    }
    if (s.status == Status::failed) {
        require(s.error.has_value() && !s.error->empty(),
                "failed sample lacks an error message");
    } else {
        require(!s.error.has_value(), "non-failed sample carries an error");
    }
    if (s.has_flag(kFlagBudgetViolation)) {
        require(s.status == Status::stage2_ok,
                "budget_violation flagged before refinement");
    }
    for (std::size_t i = 0; i < s.flags.size(); ++i) {
        for (std::size_t j = i + 1; j < s.flags.size(); ++j) {
            if (s.flags[i] == s.flags[j]) {
                out.push_back("duplicate flag: " + s.flags[i]);
            }
        }
    }
    if (!s.surprisal_trace.empty()) {
        for (std::size_t i = 0; i < s.surprisal_trace.size(); ++i) {
            if (s.surprisal_trace[i].step_index != i) {
                out.emplace_back("surprisal_trace indices not contiguous");
                break;
            }
        }
        require(s.status == Status::stage2_ok,
                "surprisal_trace present outside stage2_ok");
    }
    return out;
}

} // namespace cotprune
