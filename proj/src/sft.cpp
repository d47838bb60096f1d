#include "cotprune/sft.hpp"

#include <ostream>

#include <json.hpp>

#include "cotprune/errors.hpp"

namespace cotprune {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string render_response(const std::string& reasoning,
                            const std::string& answer, SftFormat format) {
    switch (format) {
        case SftFormat::plain:
            return reasoning + "\n\n" + answer;
        case SftFormat::think_tags:
            return "<think>\n" + reasoning + "\n</think>\n\n" + answer;
    }
    throw DomainError("unknown SFT format");
}

} // namespace

SftFormat sft_format_from_string(std::string_view name) {
    if (name == "plain") return SftFormat::plain;
    if (name == "think-tags") return SftFormat::think_tags;
    throw ConfigError("unknown SFT format: " + std::string(name) +
                      " (expected plain or think-tags)");
}

std::string sft_record_json(const Sample& sample, const SftConfig& cfg,
                            bool from_fallback) {
    const std::string& reasoning =
        from_fallback ? *sample.cot_coarse : *sample.cot_final;
    ordered_json o;
    o["id"] = sample.id;
    o["prompt"] = sample.question;
    o["response"] = render_response(reasoning, sample.answer, cfg.format);
    if (from_fallback) o["fallback"] = true;
    return o.dump();
}

SftStats emit_sft(const std::vector<Sample>& samples, const SftConfig& cfg,
                  std::ostream& out) {
    SftStats stats;
    for (const Sample& s : samples) {
        if (s.status == Status::stage2_ok) {
            out << sft_record_json(s, cfg, false) << "\n";
            ++stats.emitted;
        } else if (cfg.include_fallback &&
                   s.status == Status::stage1_fallback) {
            out << sft_record_json(s, cfg, true) << "\n";
            ++stats.emitted;
            ++stats.fallback_emitted;
        } else {
            ++stats.skipped;
        }
    }
    if (!out) {
        throw ConfigError("SFT output stream write failed");
    }
    return stats;
}

} // namespace cotprune
