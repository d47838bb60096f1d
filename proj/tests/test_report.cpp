#include <doctest.h>

#include <string>
#include <vector>

#include "cotprune/errors.hpp"
#include "cotprune/report.hpp"
#include "cotprune/tokenizer.hpp"

using namespace cotprune;

namespace {

// A step text with exactly n whitespace tokens.
std::string words(std::size_t n) {
    std::string out;
    for (std::size_t i = 0; i < n; ++i) {
        if (i > 0) out += " ";
        out += "w" + std::to_string(i % 10);
    }
    return out;
}

Sample counted_sample(const std::string& id, std::size_t before,
                      std::size_t after, int retries) {
    Sample s;
    s.id = id;
    s.question = "q";
    s.answer = "a";
    s.cot_original = words(before);
    s.cot_coarse = words(after);
    s.cot_final = words(after);
    s.status = Status::stage2_ok;
    s.retries_used = retries;
    return s;
}

} // namespace

TEST_CASE("reduction percentage arithmetic") {
    CHECK(reduction_pct(100, 25) == doctest::Approx(75.0));
    CHECK(reduction_pct(0, 0) == 0.0);
    CHECK(reduction_pct(10, 10) == doctest::Approx(0.0));
    // reported compression levels reproduce from their token sums
    CHECK(reduction_pct(13023, 3178) == doctest::Approx(75.6).epsilon(0.001));
    CHECK(reduction_pct(13023, 6722) == doctest::Approx(48.4).epsilon(0.001));
}

TEST_CASE("token sums and means come from the tokenizer") {
    WhitespaceTokenizer tok;
    std::vector<Sample> samples = {counted_sample("a", 100, 30, 1),
                                   counted_sample("b", 60, 10, 2)};
    PruneReport r = compute_report(samples, tok);

    CHECK(r.samples_total == 2);
    CHECK(r.stage2_ok == 2);
    CHECK(r.tokens_before == 160);
    CHECK(r.tokens_after_stage1 == 40);
    CHECK(r.tokens_after_stage2 == 40);
    CHECK(r.mean_tokens_before == doctest::Approx(80.0));
    CHECK(r.mean_tokens_after == doctest::Approx(20.0));
    CHECK(r.reduction_pct == doctest::Approx(75.0));
    CHECK(r.retries_histogram == std::map<int, std::size_t>{{1, 1}, {2, 1}});
}

TEST_CASE("status counters split by outcome") {
    WhitespaceTokenizer tok;
    std::vector<Sample> samples;
    samples.push_back(counted_sample("ok1", 50, 20, 1));

    Sample fb;
    fb.id = "fb1";
    fb.question = "q";
    fb.answer = "a";
    fb.cot_original = words(40);
    fb.cot_coarse = fb.cot_original;
    fb.status = Status::stage1_fallback;
    fb.retries_used = 8;
    fb.add_flag(kFlagStage1Fallback);
    samples.push_back(fb);

    Sample dead;
    dead.id = "dead1";
    dead.question = "q";
    dead.answer = "a";
    dead.cot_original = words(30);
    dead.status = Status::failed;
    dead.error = "scoring failed";
    samples.push_back(dead);

    // fell back in stage 1, then completed refinement: counted under both
    Sample fb2 = counted_sample("fb2", 20, 20, 8);
    fb2.add_flag(kFlagStage1Fallback);
    samples.push_back(fb2);

    PruneReport r = compute_report(samples, tok, 3);
    CHECK(r.samples_total == 4);
    CHECK(r.stage2_ok == 2);
    CHECK(r.stage1_fallback == 2);
    CHECK(r.failed == 1);
    CHECK(r.malformed_lines_skipped == 3);
    // the failed sample contributes to tokens_before only
    CHECK(r.tokens_before == 140);
    CHECK(r.tokens_after_stage1 == 80);
    CHECK(r.tokens_after_stage2 == 40);
    // means over the samples that actually hold the stage artifact
    CHECK(r.mean_tokens_before == doctest::Approx(35.0));
    CHECK(r.mean_tokens_after == doctest::Approx(20.0));
}

TEST_CASE("caveat flags are tallied") {
    WhitespaceTokenizer tok;
    Sample s = counted_sample("c1", 30, 30, 1);
    s.add_flag(kFlagBudgetViolation);
    s.add_flag(kFlagUnclosedFence);
    PruneReport r = compute_report({s}, tok);
    CHECK(r.budget_violations == 1);
    CHECK(r.unclosed_fence_caveats == 1);
}

TEST_CASE("empty corpus produces a zeroed report") {
    WhitespaceTokenizer tok;
    PruneReport r = compute_report({}, tok);
    CHECK(r.samples_total == 0);
    CHECK(r.mean_tokens_before == 0.0);
    CHECK(r.reduction_pct == 0.0);
}

TEST_CASE("report round-trips through JSON exactly") {
    WhitespaceTokenizer tok;
    std::vector<Sample> samples = {counted_sample("a", 100, 30, 1),
                                   counted_sample("b", 60, 10, 3)};
    PruneReport r = compute_report(samples, tok, 2);
    std::string text = report_to_json(r);
    PruneReport back = report_from_json(text);
    CHECK(back == r);
    CHECK(report_to_json(back) == text);

    CHECK_THROWS_AS(report_from_json("{}"), ValidationError);
    CHECK_THROWS_AS(report_from_json("nope"), ValidationError);
}
