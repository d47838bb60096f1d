#include <doctest.h>

#include <cmath>
#include <future>
#include <memory>
#include <string>
#include <vector>

#include "cotprune/errors.hpp"
#include "cotprune/gateway.hpp"
#include "cotprune/hash.hpp"
#include "cotprune/mock_backends.hpp"

using namespace cotprune;

namespace {

Gateway make_gateway(MockConfig mcfg = {}, GatewayConfig gcfg = {}) {
    return Gateway(std::make_unique<MockGenerator>(mcfg),
                   std::make_unique<MockScorer>(mcfg), gcfg);
}

GenerationRequest request(std::string prompt) {
    GenerationRequest req;
    req.prompt = std::move(prompt);
    req.model_name = "test-model";
    return req;
}

} // namespace

TEST_CASE("echo marker returns the rest of its line") {
    Gateway gw = make_gateway();
    CHECK(gw.generate(request("prefix [ECHO]payload here\nnext line")).text ==
          "payload here");
    CHECK(gw.generate(request("[ECHO]to the end")).text == "to the end");
}

TEST_CASE("mock generation depends only on seed, prompt, and variation") {
    MockConfig a;
    a.seed = 11;
    Gateway gw1 = make_gateway(a);
    Gateway gw2 = make_gateway(a);

    GenerationRequest req = request("some free-form prompt");
    std::string first = gw1.generate(req).text;
    CHECK(gw1.generate(req).text == first);   // repeat call, same output
    CHECK(gw2.generate(req).text == first);   // fresh instance, same output

    req.variation = 1;
    CHECK(gw1.generate(req).text != first);

    MockConfig b;
    b.seed = 12;
    Gateway gw3 = make_gateway(b);
    CHECK(gw3.generate(request("some free-form prompt")).text != first);
}

TEST_CASE("request validation happens before any backend call") {
    Gateway gw = make_gateway();
    GenerationRequest req = request("ok");
    req.temperature = -0.5;
    CHECK_THROWS_AS(gw.generate(req), DomainError);
    req = request("ok");
    req.top_p = 0.0;
    CHECK_THROWS_AS(gw.generate(req), DomainError);
    req = request("ok");
    req.max_output_tokens = 0;
    CHECK_THROWS_AS(gw.generate(req), DomainError);
}

TEST_CASE("transient failures are retried and attempts counted") {
    MockConfig mcfg;
    GatewayConfig gcfg;
    gcfg.transport_retries = 3;
    gcfg.backoff_base_ms = 0;

    auto gen = std::make_unique<MockGenerator>(mcfg);
    MockGenerator* gen_raw = gen.get();
    gen_raw->script_transport_failures("FLAKY", 2);
    Gateway gw(std::move(gen), std::make_unique<MockScorer>(mcfg), gcfg);

    // two scripted failures, then success on attempt 3
    GenerationResult res = gw.generate(request("FLAKY [ECHO]ok"));
    CHECK(res.text == "ok");
    CHECK(res.attempts == 3);
    CHECK(gen_raw->calls() == 3);
}

TEST_CASE("retry exhaustion reports the total attempt count") {
    MockConfig mcfg;
    GatewayConfig gcfg;
    gcfg.transport_retries = 3;
    gcfg.backoff_base_ms = 0;

    auto gen = std::make_unique<MockGenerator>(mcfg);
    gen->script_transport_failures("DOWN", 99);
    Gateway gw(std::move(gen), std::make_unique<MockScorer>(mcfg), gcfg);

    try {
        gw.generate(request("DOWN [ECHO]x"));
        FAIL("expected TransportError");
    } catch (const TransportError& e) {
        CHECK(e.attempts() == 4);  // initial try plus three retries
    }
}

TEST_CASE("in-flight requests never exceed the cap") {
    MockConfig mcfg;
    mcfg.artificial_delay_ms = 15;
    GatewayConfig gcfg;
    gcfg.max_in_flight = 3;

    auto gen = std::make_unique<MockGenerator>(mcfg);
    MockGenerator* gen_raw = gen.get();
    Gateway gw(std::move(gen), std::make_unique<MockScorer>(mcfg), gcfg);

    std::vector<std::future<void>> futures;
    for (int i = 0; i < 12; ++i) {
        futures.push_back(std::async(std::launch::async, [&gw, i] {
            gw.generate(request("[ECHO]call " + std::to_string(i)));
        }));
    }
    for (auto& f : futures) f.get();

    CHECK(gen_raw->max_concurrent_seen() <= 3);
    CHECK(gw.max_in_flight_seen() <= 3);
    CHECK(gen_raw->calls() == 12);
}

TEST_CASE("mock scoring of 'a b' yields three spans with formula logprobs") {
    MockConfig mcfg;
    mcfg.seed = 5;
    Gateway gw = make_gateway(mcfg);

    ScoredSequence seq = gw.score_sequence("a b", "m");
    REQUIRE(seq.tokens.size() == 3);
    CHECK(seq.text == "a b");

    // spans cover "a", " ", "b"
    CHECK(seq.tokens[0].byte_start == 0);
    CHECK(seq.tokens[0].byte_end == 1);
    CHECK(seq.tokens[1].byte_start == 1);
    CHECK(seq.tokens[1].byte_end == 2);
    CHECK(seq.tokens[2].byte_start == 2);
    CHECK(seq.tokens[2].byte_end == 3);

    const char* texts[] = {"a", " ", "b"};
    for (std::size_t i = 0; i < 3; ++i) {
        REQUIRE(seq.tokens[i].logprob.has_value());
        double want = MockScorer::formula_logprob(5, texts[i], i);
        CHECK(*seq.tokens[i].logprob == doctest::Approx(want));
        CHECK(*seq.tokens[i].logprob <= -1.0);
        CHECK(*seq.tokens[i].logprob >= -1.0 - 999.0 / 250.0);
    }
}

TEST_CASE("scorer formula is the documented hash arithmetic") {
    // h = fnv1a64(token bytes, fnv1a64(seed as 8 LE bytes)), then folded
    // with the token index; logprob = -(1 + (h mod 1000) / 250).
    std::uint64_t h = fnv1a64_u64(3, fnv1a64("tok", fnv1a64_u64(17)));
    double want = -(1.0 + static_cast<double>(h % 1000) / 250.0);
    CHECK(MockScorer::formula_logprob(17, "tok", 3) == doctest::Approx(want));
}

TEST_CASE("empty text scoring short-circuits") {
    MockConfig mcfg;
    auto scorer = std::make_unique<MockScorer>(mcfg);
    MockScorer* scorer_raw = scorer.get();
    Gateway gw(std::make_unique<MockGenerator>(mcfg), std::move(scorer));

    ScoredSequence seq = gw.score_sequence("", "m");
    CHECK(seq.tokens.empty());
    CHECK(scorer_raw->calls() == 0);
}

TEST_CASE("misaligned scorer output is rejected at the gateway") {
    Gateway gw = make_gateway();
    CHECK_THROWS_AS(gw.score_sequence("[SCORE_MISALIGN] text", "m"),
                    IntegrityError);
}

TEST_CASE("scored sequence contract violations are named") {
    ScoredSequence ok;
    ok.text = "ab";
    ok.tokens = {{0, 0, 1, -1.0}, {1, 1, 2, -2.0}};
    CHECK_NOTHROW(check_scored_sequence(ok));

    ScoredSequence gap = ok;
    gap.tokens[1].byte_start = 2;  // hole at byte 1
    gap.tokens[1].byte_end = 2;
    CHECK_THROWS_AS(check_scored_sequence(gap), IntegrityError);

    ScoredSequence positive = ok;
    positive.tokens[0].logprob = 0.5;
    CHECK_THROWS_AS(check_scored_sequence(positive), IntegrityError);

    ScoredSequence missing = ok;
    missing.tokens[0].logprob.reset();
    CHECK_THROWS_AS(check_scored_sequence(missing), IntegrityError);

    ScoredSequence short_cover = ok;
    short_cover.tokens.pop_back();
    CHECK_THROWS_AS(check_scored_sequence(short_cover), IntegrityError);
}

TEST_CASE("top alternatives flow through when configured") {
    MockConfig mcfg;
    mcfg.seed = 9;
    mcfg.top_alternatives = 2;
    Gateway gw = make_gateway(mcfg);

    ScoredSequence seq = gw.score_sequence("hi", "m");
    REQUIRE(seq.tokens.size() == 1);
    REQUIRE(seq.top_alternatives.size() == 1);
    CHECK(seq.top_alternatives[0].size() == 2);
    for (const auto& [text, lp] : seq.top_alternatives[0]) {
        CHECK(lp <= 0.0);
        CHECK_FALSE(text.empty());
    }
}
