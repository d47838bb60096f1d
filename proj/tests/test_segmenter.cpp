#include <doctest.h>

#include <random>
#include <string>
#include <vector>

#include "cotprune/errors.hpp"
#include "cotprune/segmenter.hpp"

using namespace cotprune;

TEST_CASE("steps split on blank lines and keep internal newlines") {
    StepSequence s = split_steps("first step\n\nsecond\nstill second\n\nthird");
    REQUIRE(s.size() == 3);
    CHECK(s[0] == "first step");
    CHECK(s[1] == "second\nstill second");
    CHECK(s[2] == "third");
}

TEST_CASE("runs of blank lines and whitespace-only lines act as one break") {
    StepSequence s = split_steps("a\n\n\n\nb\n \t \nc");
    REQUIRE(s.size() == 3);
    CHECK(s[1] == "b");
}

TEST_CASE("crlf input normalizes to plain newlines") {
    StepSequence s = split_steps("one\r\n\r\ntwo\r\nmore");
    REQUIRE(s.size() == 2);
    CHECK(s[1] == "two\nmore");
}

TEST_CASE("edge inputs") {
    CHECK(split_steps("").empty());
    CHECK(split_steps("\n\n\n").empty());
    CHECK(split_steps("only").size() == 1);
    CHECK(split_steps("\n\nwrapped\n\n").size() == 1);
}

TEST_CASE("join inverts split without a trailing delimiter") {
    std::string cot = "alpha\n\nbeta\ngamma\n\ndelta";
    CHECK(join_steps(split_steps(cot)) == cot);
    CHECK(join_steps(StepSequence{}) == "");
}

TEST_CASE("round trip holds for randomized sequences") {
    std::mt19937_64 rng(4242);
    std::uniform_int_distribution<int> n_steps(1, 12);
    std::uniform_int_distribution<int> n_lines(1, 4);
    std::uniform_int_distribution<int> n_words(1, 6);
    std::uniform_int_distribution<int> word(0, 99);

    for (int iter = 0; iter < 200; ++iter) {
        std::vector<std::string> steps;
        int count = n_steps(rng);
        for (int i = 0; i < count; ++i) {
            std::string step;
            int lines = n_lines(rng);
            for (int l = 0; l < lines; ++l) {
                if (l > 0) step += "\n";
                int words = n_words(rng);
                for (int w = 0; w < words; ++w) {
                    if (w > 0) step += " ";
                    step += "w" + std::to_string(word(rng));
                }
            }
            steps.push_back(std::move(step));
        }
        StepSequence seq(steps);
        StepSequence again = split_steps(join_steps(seq));
        CHECK(again == seq);
    }
}

TEST_CASE("validating constructor rejects malformed steps") {
    CHECK_THROWS_AS(StepSequence({"ok", ""}), DomainError);
    CHECK_THROWS_AS(StepSequence({"has\n\nblank"}), DomainError);
    CHECK_THROWS_AS(StepSequence({"trailing\n"}), DomainError);
    CHECK_THROWS_AS(StepSequence({"care\rreturn"}), DomainError);
    CHECK_THROWS_AS(StepSequence({" \t"}), DomainError);
    CHECK_NOTHROW(StepSequence({"fine", "also\nfine"}));
}

TEST_CASE("code fences survive splitting when internally single-spaced") {
    std::string cot =
        "Look at the helper:\n```python\ndef f():\n    return 1\n```\nDone.\n\n"
        "Next step.";
    StepSequence s = split_steps(cot);
    REQUIRE(s.size() == 2);
    CHECK_FALSE(step_has_unclosed_fence(s[0]));
}

TEST_CASE("unclosed fence detection counts markers") {
    CHECK(step_has_unclosed_fence("open:\n```python\ncode here"));
    CHECK_FALSE(step_has_unclosed_fence("no fences at all"));
    CHECK_FALSE(step_has_unclosed_fence("```\nx\n```"));
    CHECK(step_has_unclosed_fence("```\nx\n```\nagain:\n```"));
}
