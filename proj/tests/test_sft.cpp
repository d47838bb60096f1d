#include <doctest.h>

#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cotprune/errors.hpp"
#include "cotprune/sft.hpp"

using namespace cotprune;

namespace {

Sample finished(const std::string& id) {
    Sample s;
    s.id = id;
    s.question = "Write it.";
    s.cot_original = "think long\n\nthink more";
    s.answer = "def w():\n    pass";
    s.cot_coarse = "think long";
    s.cot_final = "think long";
    s.status = Status::stage2_ok;
    s.retries_used = 1;
    return s;
}

Sample fallback(const std::string& id) {
    Sample s;
    s.id = id;
    s.question = "Fall back.";
    s.cot_original = "kept as-is\n\nevery step";
    s.answer = "x = 1";
    s.cot_coarse = s.cot_original;
    s.status = Status::stage1_fallback;
    s.retries_used = 8;
    s.add_flag(kFlagStage1Fallback);
    return s;
}

} // namespace

TEST_CASE("format names parse") {
    CHECK(sft_format_from_string("plain") == SftFormat::plain);
    CHECK(sft_format_from_string("think-tags") == SftFormat::think_tags);
    CHECK_THROWS_AS(sft_format_from_string("xml"), ConfigError);
}

TEST_CASE("plain record pairs the question with reasoning plus answer") {
    nlohmann::json o =
        nlohmann::json::parse(sft_record_json(finished("s1"), {}, false));
    CHECK(o["id"] == "s1");
    CHECK(o["prompt"] == "Write it.");
    CHECK(o["response"] == "think long\n\ndef w():\n    pass");
    CHECK_FALSE(o.contains("fallback"));
}

TEST_CASE("think-tags format wraps the reasoning") {
    SftConfig cfg;
    cfg.format = SftFormat::think_tags;
    nlohmann::json o =
        nlohmann::json::parse(sft_record_json(finished("s2"), cfg, false));
    CHECK(o["response"] ==
          "<think>\nthink long\n</think>\n\ndef w():\n    pass");
}

TEST_CASE("record keys keep a fixed order") {
    std::string line = sft_record_json(finished("s3"), {}, false);
    std::size_t id_pos = line.find("\"id\"");
    std::size_t prompt_pos = line.find("\"prompt\"");
    std::size_t response_pos = line.find("\"response\"");
    CHECK(id_pos < prompt_pos);
    CHECK(prompt_pos < response_pos);
}

TEST_CASE("only refined samples are emitted by default") {
    std::vector<Sample> samples = {finished("a"), fallback("b")};
    Sample dead;
    dead.id = "c";
    dead.question = "q";
    dead.cot_original = "cot";
    dead.answer = "a";
    dead.status = Status::failed;
    dead.error = "boom";
    samples.push_back(dead);

    std::ostringstream out;
    SftStats stats = emit_sft(samples, {}, out);
    CHECK(stats.emitted == 1);
    CHECK(stats.skipped == 2);
    CHECK(stats.fallback_emitted == 0);

    std::istringstream lines(out.str());
    std::string line;
    std::size_t count = 0;
    while (std::getline(lines, line)) {
        ++count;
        CHECK(nlohmann::json::parse(line)["id"] == "a");
    }
    CHECK(count == 1);
}

TEST_CASE("include_fallback emits marked records from the coarse text") {
    std::vector<Sample> samples = {finished("a"), fallback("b")};
    SftConfig cfg;
    cfg.include_fallback = true;

    std::ostringstream out;
    SftStats stats = emit_sft(samples, cfg, out);
    CHECK(stats.emitted == 2);
    CHECK(stats.fallback_emitted == 1);
    CHECK(stats.skipped == 0);

    std::istringstream lines(out.str());
    std::string line;
    std::getline(lines, line);
    std::getline(lines, line);
    nlohmann::json o = nlohmann::json::parse(line);
    CHECK(o["id"] == "b");
    CHECK(o["fallback"] == true);
    // fallback samples train on their unrefined coarse text
    CHECK(o["response"] == "kept as-is\n\nevery step\n\nx = 1");
}
