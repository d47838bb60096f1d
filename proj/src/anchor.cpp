#include "cotprune/anchor.hpp"

#include <vector>

#include "cotprune/errors.hpp"
#include "cotprune/matcher.hpp"
#include "cotprune/segmenter.hpp"

namespace cotprune {

namespace {

bool is_blank(std::string_view line) {
    for (char c : line) {
        if (c != ' ' && c != '\t' && c != '\r') return false;
    }
    return true;
}

std::string_view trim_fence_tail(std::string_view line) {
    while (!line.empty() &&
           (line.back() == ' ' || line.back() == '\t' || line.back() == '\r')) {
        line.remove_suffix(1);
    }
    return line;
}

} // namespace

std::string strip_code_fence(std::string_view text) {
    std::vector<std::string_view> lines;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t nl = text.find('\n', pos);
        std::size_t end = (nl == std::string_view::npos) ? text.size() : nl;
        lines.push_back(text.substr(pos, end - pos));
        if (nl == std::string_view::npos) break;
        pos = nl + 1;
    }

    std::size_t first = 0;
    while (first < lines.size() && is_blank(lines[first])) ++first;
    std::size_t last = lines.size();
    while (last > first && is_blank(lines[last - 1])) --last;
    if (last - first < 2) return std::string(text);

    if (lines[first].substr(0, 3) != "```") return std::string(text);
    if (trim_fence_tail(lines[last - 1]) != "```") return std::string(text);

    std::string out;
    for (std::size_t i = first + 1; i + 1 < last; ++i) {
        if (i > first + 1) out.push_back('\n');
        out.append(lines[i]);
    }
    return out;
}

void coarse_prune(Sample& sample, const Stage1Config& cfg, Gateway& gateway,
                  const PromptTemplates& prompts) {
    if (sample.status != Status::pending) {
        throw StateError("coarse_prune requires a pending sample, got " +
                         std::string(to_string(sample.status)));
    }
    if (cfg.max_retries < 1) {
        throw ConfigError("max_retries must be >= 1");
    }

    StepSequence origin = split_steps(sample.cot_original);
    if (origin.size() <= 1) {
        // One step leaves nothing to prune at step granularity; skip the
        // round trips entirely.
        sample.cot_coarse = sample.cot_original;
        sample.status = Status::stage1_ok;
        sample.retries_used = 0;
        sample.add_flag(kFlagSingleStepSkip);
        return;
    }

    GenerationRequest anchor_req;
    anchor_req.prompt = prompts.render_direct(sample.question, sample.answer);
    anchor_req.temperature = cfg.anchor_temperature;
    anchor_req.top_p = cfg.top_p;
    anchor_req.max_output_tokens = cfg.max_output_tokens;
    anchor_req.model_name = cfg.model_name;
    sample.cot_direct = gateway.generate(anchor_req).text;

    GenerationRequest prune_req;
    prune_req.prompt =
        prompts.render_prune(*sample.cot_direct, sample.cot_original);
    prune_req.temperature = cfg.prune_temperature;
    prune_req.top_p = cfg.top_p;
    prune_req.max_output_tokens = cfg.max_output_tokens;
    prune_req.model_name = cfg.model_name;

    for (int attempt = 1; attempt <= cfg.max_retries; ++attempt) {
        prune_req.variation = attempt - 1;
        std::string candidate =
            strip_code_fence(gateway.generate(prune_req).text);
        StepSequence coarse = split_steps(candidate);
        // An empty candidate would pass pattern matching vacuously; treat it
        // as a failed attempt instead of accepting a contentless CoT.
        if (!coarse.empty() &&
            pattern_match(origin, coarse, cfg.tau).valid) {
            sample.cot_coarse = std::move(candidate);
            sample.status = Status::stage1_ok;
            sample.retries_used = attempt;
            return;
        }
    }

    sample.cot_coarse = sample.cot_original;
    sample.status = Status::stage1_fallback;
    sample.retries_used = cfg.max_retries;
    sample.add_flag(kFlagStage1Fallback);
}

} // namespace cotprune
