#include "cotprune/report.hpp"

#include <json.hpp>

#include "cotprune/errors.hpp"

namespace cotprune {

namespace {

using ordered_json = nlohmann::ordered_json;

} // namespace

double reduction_pct(std::size_t before, std::size_t after) {
    if (before == 0) return 0.0;
    return 100.0 *
           (1.0 - static_cast<double>(after) / static_cast<double>(before));
}

PruneReport compute_report(const std::vector<Sample>& samples,
                           const Tokenizer& tokenizer,
                           std::size_t malformed_lines_skipped) {
    PruneReport r;
    r.samples_total = samples.size();
    r.malformed_lines_skipped = malformed_lines_skipped;

    std::size_t final_samples = 0;
    for (const Sample& s : samples) {
        switch (s.status) {
            case Status::pending: break;
            case Status::stage1_ok: ++r.stage1_ok; break;
            case Status::stage1_fallback: break;
            case Status::stage2_ok: ++r.stage2_ok; break;
            case Status::failed: ++r.failed; break;
        }
        if (s.status == Status::stage1_fallback ||
            s.has_flag(kFlagStage1Fallback)) {
            ++r.stage1_fallback;
        }
        r.tokens_before += tokenizer.count(s.cot_original);
        if (s.cot_coarse) {
            r.tokens_after_stage1 += tokenizer.count(*s.cot_coarse);
            ++r.retries_histogram[s.retries_used];
        }
        if (s.cot_final) {
            r.tokens_after_stage2 += tokenizer.count(*s.cot_final);
            ++final_samples;
        }
        if (s.has_flag(kFlagBudgetViolation)) ++r.budget_violations;
        if (s.has_flag(kFlagUnclosedFence)) ++r.unclosed_fence_caveats;
    }

    if (r.samples_total > 0) {
        r.mean_tokens_before = static_cast<double>(r.tokens_before) /
                               static_cast<double>(r.samples_total);
    }
    if (final_samples > 0) {
        r.mean_tokens_after = static_cast<double>(r.tokens_after_stage2) /
                              static_cast<double>(final_samples);
    }
    r.reduction_pct = reduction_pct(r.tokens_before, r.tokens_after_stage2);
    return r;
}

std::string report_to_json(const PruneReport& report) {
    ordered_json o;
    o["samples_total"] = report.samples_total;
    o["stage1_ok"] = report.stage1_ok;
    o["stage1_fallback"] = report.stage1_fallback;
    o["stage2_ok"] = report.stage2_ok;
    o["failed"] = report.failed;
    o["tokens_before"] = report.tokens_before;
    o["tokens_after_stage1"] = report.tokens_after_stage1;
    o["tokens_after_stage2"] = report.tokens_after_stage2;
    o["mean_tokens_before"] = report.mean_tokens_before;
    o["mean_tokens_after"] = report.mean_tokens_after;
    o["reduction_pct"] = report.reduction_pct;
    ordered_json hist = ordered_json::object();
    for (const auto& [retries, freq] : report.retries_histogram) {
        hist[std::to_string(retries)] = freq;
    }
    o["retries_histogram"] = std::move(hist);
    o["budget_violations"] = report.budget_violations;
    o["unclosed_fence_caveats"] = report.unclosed_fence_caveats;
    o["malformed_lines_skipped"] = report.malformed_lines_skipped;
    return o.dump(2);
}

PruneReport report_from_json(const std::string& text) {
    nlohmann::json o = nlohmann::json::parse(text, nullptr, false);
    if (o.is_discarded() || !o.is_object()) {
        throw ValidationError("invalid report JSON");
    }
    try {
        PruneReport r;
        r.samples_total = o.at("samples_total").get<std::size_t>();
        r.stage1_ok = o.at("stage1_ok").get<std::size_t>();
        r.stage1_fallback = o.at("stage1_fallback").get<std::size_t>();
        r.stage2_ok = o.at("stage2_ok").get<std::size_t>();
        r.failed = o.at("failed").get<std::size_t>();
        r.tokens_before = o.at("tokens_before").get<std::size_t>();
        r.tokens_after_stage1 = o.at("tokens_after_stage1").get<std::size_t>();
        r.tokens_after_stage2 = o.at("tokens_after_stage2").get<std::size_t>();
        r.mean_tokens_before = o.at("mean_tokens_before").get<double>();
        r.mean_tokens_after = o.at("mean_tokens_after").get<double>();
        r.reduction_pct = o.at("reduction_pct").get<double>();
        for (const auto& [key, value] :
             o.at("retries_histogram").items()) {
            r.retries_histogram[std::stoi(key)] = value.get<std::size_t>();
        }
        r.budget_violations = o.at("budget_violations").get<std::size_t>();
        r.unclosed_fence_caveats =
            o.at("unclosed_fence_caveats").get<std::size_t>();
        r.malformed_lines_skipped =
            o.at("malformed_lines_skipped").get<std::size_t>();
        return r;
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("bad report record: ") + e.what());
    }
}

} // namespace cotprune
