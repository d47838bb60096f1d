#include <doctest.h>

#include <random>
#include <string>
#include <vector>

#include "cotprune/errors.hpp"
#include "cotprune/matcher.hpp"
#include "oracles.hpp"

using namespace cotprune;

TEST_CASE("similarity on fixed vectors") {
    CHECK(gestalt_similarity("abcd", "bcde") == doctest::Approx(0.75));
    CHECK(gestalt_similarity("hello world", "hello there") ==
          doctest::Approx(0.6363636363636364));
    CHECK(gestalt_similarity("the quick brown fox", "the quick red fox") ==
          doctest::Approx(0.8333333333333334));
    CHECK(gestalt_similarity("abab", "baba") == doctest::Approx(0.75));
    CHECK(gestalt_similarity("Step 1: add the numbers",
                             "Step 1: add all numbers") ==
          doctest::Approx(0.8695652173913043));
    CHECK(gestalt_similarity("aaaa", "aa") ==
          doctest::Approx(0.6666666666666666));
    CHECK(gestalt_similarity("xyzzy", "zzyxy") == doctest::Approx(0.6));
}

TEST_CASE("similarity edges") {
    CHECK(gestalt_similarity("", "") == 1.0);
    CHECK(gestalt_similarity("", "abc") == 0.0);
    CHECK(gestalt_similarity("abc", "") == 0.0);
    CHECK(gestalt_similarity("same", "same") == 1.0);
    CHECK(gestalt_similarity("ab", "ba") > 0.0);
}

TEST_CASE("similarity works on raw bytes with no normalization") {
    CHECK(gestalt_similarity("Case", "case") < 1.0);
    CHECK(gestalt_similarity("a b", "a  b") < 1.0);
    // multibyte content compares bytewise
    CHECK(gestalt_similarity("\xe6\x95\xb0", "\xe6\x95\xb0") == 1.0);
}

TEST_CASE("similarity matches the exhaustive oracle on random strings") {
    std::mt19937_64 rng(991);
    std::uniform_int_distribution<int> len(0, 64);
    std::uniform_int_distribution<int> alpha(0, 5);

    for (int iter = 0; iter < 500; ++iter) {
        std::string a, b;
        int la = len(rng), lb = len(rng);
        for (int i = 0; i < la; ++i) {
            a.push_back(static_cast<char>('a' + alpha(rng)));
        }
        for (int i = 0; i < lb; ++i) {
            b.push_back(static_cast<char>('a' + alpha(rng)));
        }
        double got = gestalt_similarity(a, b);
        double want = oracle::gestalt_similarity(a, b);
        CHECK(got == doctest::Approx(want).epsilon(1e-12));
    }
}

namespace {

StepSequence seq(std::vector<std::string> steps) {
    return StepSequence(std::move(steps));
}

} // namespace

TEST_CASE("pattern match accepts a verbatim ordered subset") {
    StepSequence origin = seq({"alpha beta", "gamma delta", "epsilon zeta",
                               "eta theta"});
    StepSequence coarse = seq({"gamma delta", "eta theta"});
    MatchOutcome out = pattern_match(origin, coarse, 0.6);
    REQUIRE(out.valid);
    REQUIRE(out.alignment.size() == 2);
    CHECK(out.alignment[0].origin_index == 1);
    CHECK(out.alignment[1].origin_index == 3);
    CHECK(out.alignment[0].score == 1.0);
    CHECK_FALSE(out.first_failure.has_value());
}

TEST_CASE("pattern match rejects reordered steps") {
    StepSequence origin = seq({"first unique words", "second other content",
                               "third closing thought"});
    StepSequence coarse = seq({"third closing thought", "first unique words"});
    MatchOutcome out = pattern_match(origin, coarse, 0.8);
    CHECK_FALSE(out.valid);
    REQUIRE(out.first_failure.has_value());
    CHECK(*out.first_failure == 1);
    // the partial alignment up to the failure is preserved
    REQUIRE(out.alignment.size() == 1);
    CHECK(out.alignment[0].origin_index == 2);
}

TEST_CASE("pattern match never revisits a consumed origin step") {
    StepSequence origin = seq({"shared phrasing here"});
    StepSequence coarse = seq({"shared phrasing here", "shared phrasing here"});
    MatchOutcome out = pattern_match(origin, coarse, 0.9);
    CHECK_FALSE(out.valid);
    CHECK(*out.first_failure == 1);
}

TEST_CASE("near matches pass at the right threshold") {
    StepSequence origin = seq({"Step 1: add the numbers"});
    StepSequence coarse = seq({"Step 1: add all numbers"});
    CHECK(pattern_match(origin, coarse, 0.85).valid);
    CHECK_FALSE(pattern_match(origin, coarse, 0.88).valid);
}

TEST_CASE("empty coarse is trivially valid") {
    StepSequence origin = seq({"anything"});
    MatchOutcome out = pattern_match(origin, StepSequence{}, 0.6);
    CHECK(out.valid);
    CHECK(out.alignment.empty());
}

TEST_CASE("tau outside the unit interval is rejected") {
    StepSequence origin = seq({"a"});
    StepSequence coarse = seq({"a"});
    CHECK_THROWS_AS(pattern_match(origin, coarse, -0.1), DomainError);
    CHECK_THROWS_AS(pattern_match(origin, coarse, 1.5), DomainError);
    CHECK(pattern_match(origin, coarse, 1.0).valid);
}

TEST_CASE("pattern match agrees with the oracle on random cases") {
    std::mt19937_64 rng(5170);
    std::uniform_int_distribution<int> n_origin(1, 12);
    std::uniform_int_distribution<int> word(0, 19);
    std::uniform_int_distribution<int> n_words(2, 6);
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    const char* kWords[] = {"loop",  "index", "sum",   "carry", "edge",
                            "check", "guard", "shift", "merge", "split",
                            "trace", "bound", "array", "stack", "queue",
                            "hash",  "sort",  "scan",  "fold",  "emit"};

    for (int iter = 0; iter < 300; ++iter) {
        std::vector<std::string> origin;
        int n = n_origin(rng);
        for (int i = 0; i < n; ++i) {
            std::string s;
            int w = n_words(rng);
            for (int k = 0; k < w; ++k) {
                if (k > 0) s += " ";
                s += kWords[word(rng)];
            }
            origin.push_back(std::move(s));
        }
        // coarse: random subset, sometimes shuffled, sometimes mutated
        std::vector<std::string> coarse;
        for (const std::string& s : origin) {
            if (unit(rng) < 0.5) coarse.push_back(s);
        }
        if (!coarse.empty() && unit(rng) < 0.3) {
            std::shuffle(coarse.begin(), coarse.end(), rng);
        }
        if (!coarse.empty() && unit(rng) < 0.3) {
            coarse[0] += " mutated";
        }
        double tau = unit(rng);

        MatchOutcome got = pattern_match(
            StepSequence(origin), coarse.empty() ? StepSequence{}
                                                 : StepSequence(coarse),
            tau);
        oracle::MatchResult want = oracle::pattern_match(origin, coarse, tau);

        REQUIRE(got.valid == want.valid);
        REQUIRE(got.alignment.size() == want.alignment.size());
        for (std::size_t i = 0; i < want.alignment.size(); ++i) {
            CHECK(got.alignment[i].coarse_index == want.alignment[i].coarse_index);
            CHECK(got.alignment[i].origin_index == want.alignment[i].origin_index);
            CHECK(got.alignment[i].score ==
                  doctest::Approx(want.alignment[i].score).epsilon(1e-12));
        }
        if (!want.valid) {
            REQUIRE(got.first_failure.has_value());
            CHECK(*got.first_failure == want.first_failure);
        }
    }
}
