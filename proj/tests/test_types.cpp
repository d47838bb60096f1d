#include <doctest.h>

#include "cotprune/errors.hpp"
#include "cotprune/types.hpp"

using namespace cotprune;

namespace {

RawRecord good_record() {
    RawRecord r;
    r.id = "s1";
    r.question = "What does f(3) return?";
    r.cot = "Step one.\n\nStep two.";
    r.answer = "def f(x):\n    return x + 1";
    return r;
}

Sample finished_sample() {
    Sample s = validate_sample(good_record());
    s.cot_direct = "anchor";
    s.cot_coarse = "Step one.";
    s.cot_final = "Step one.";
    s.status = Status::stage2_ok;
    s.retries_used = 1;
    s.surprisal_trace = {{0, 1.5, true}};
    return s;
}

} // namespace

TEST_CASE("status round-trips through its names") {
    for (Status s : {Status::pending, Status::stage1_ok,
                     Status::stage1_fallback, Status::stage2_ok,
                     Status::failed}) {
        CHECK(status_from_string(to_string(s)) == s);
    }
    CHECK_THROWS_AS(status_from_string("bogus"), ValidationError);
}

TEST_CASE("validate_sample trims trailing whitespace and keeps the rest") {
    RawRecord r = good_record();
    r.question = "What?  \n";
    r.cot = "  leading stays\n\nsecond step\t";
    Sample s = validate_sample(r);
    CHECK(s.question == "What?");
    CHECK(s.cot_original == "  leading stays\n\nsecond step");
    CHECK(s.status == Status::pending);
}

TEST_CASE("validate_sample names the offending field") {
    RawRecord r = good_record();
    r.answer.reset();
    CHECK_THROWS_WITH_AS(validate_sample(r), "missing field: answer",
                         ValidationError);

    r = good_record();
    r.cot = "   \n";
    CHECK_THROWS_WITH_AS(validate_sample(r), "empty cot", ValidationError);

    r = good_record();
    r.id = "  ";
    CHECK_THROWS_WITH_AS(validate_sample(r), "empty id", ValidationError);
}

TEST_CASE("flag helpers deduplicate") {
    Sample s;
    s.add_flag(kFlagBudgetViolation);
    s.add_flag(kFlagBudgetViolation);
    CHECK(s.flags.size() == 1);
    CHECK(s.has_flag(kFlagBudgetViolation));
    CHECK_FALSE(s.has_flag(kFlagUnclosedFence));
}

TEST_CASE("invariant check accepts a finished sample") {
    CHECK(sample_invariant_violations(finished_sample()).empty());
}

TEST_CASE("invariant check catches stage skips and contradictions") {
    Sample s = finished_sample();
    s.cot_coarse.reset();
    CHECK_FALSE(sample_invariant_violations(s).empty());

    s = finished_sample();
    s.status = Status::pending;
    CHECK_FALSE(sample_invariant_violations(s).empty());

    s = finished_sample();
    s.status = Status::failed;  // failed without an error message
    CHECK_FALSE(sample_invariant_violations(s).empty());

    s = finished_sample();
    s.status = Status::stage1_fallback;
    s.cot_final.reset();
    s.surprisal_trace.clear();
    // fallback must carry the original bytes as its coarse CoT
    CHECK_FALSE(sample_invariant_violations(s).empty());
    s.cot_coarse = s.cot_original;
    s.add_flag(kFlagStage1Fallback);
    CHECK(sample_invariant_violations(s).empty());
}

TEST_CASE("invariant check ties budget flag to stage2 completion") {
    Sample s = finished_sample();
    s.status = Status::stage1_ok;
    s.cot_final.reset();
    s.surprisal_trace.clear();
    s.add_flag(kFlagBudgetViolation);
    CHECK_FALSE(sample_invariant_violations(s).empty());
}
