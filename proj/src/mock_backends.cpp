#include "cotprune/mock_backends.hpp"

#include <algorithm>
#include <chrono>
#include <thread>

#include "cotprune/errors.hpp"
#include "cotprune/hash.hpp"
#include "cotprune/segmenter.hpp"
#include "cotprune/tokenizer.hpp"

namespace cotprune {

namespace {

// Marker lines of the bundled prune template; used to find the thinking
// block inside a rendered prompt without re-parsing the whole template.
constexpr std::string_view kPruneTail = "\nThe compressed thinking is:";
constexpr std::string_view kThinkHead = "\nThinking:\n```\n";
constexpr std::string_view kDirectMarker =
    "step-by-step solution (containing only";

struct ConcurrencyGuard {
    std::atomic<int>& current;
    std::atomic<int>& peak;

    ConcurrencyGuard(std::atomic<int>& cur, std::atomic<int>& pk)
        : current(cur), peak(pk) {
        int now = current.fetch_add(1) + 1;
        int prev = peak.load();
        while (prev < now && !peak.compare_exchange_weak(prev, now)) {
        }
    }
    ~ConcurrencyGuard() { current.fetch_sub(1); }
};

std::uint64_t mix(std::uint64_t seed, std::string_view prompt, int nth) {
    return fnv1a64_u64(static_cast<std::uint64_t>(nth),
                       fnv1a64(prompt, fnv1a64_u64(seed)));
}

// The thinking block sits between the last kThinkHead and the last
// "\n```" + kPruneTail occurrence. Empty when the prompt has another shape.
std::string_view extract_think(std::string_view prompt) {
    std::size_t tail = prompt.rfind(kPruneTail);
    if (tail == std::string_view::npos || tail == 0) return {};
    std::size_t fence_close = prompt.rfind("\n```", tail - 1);
    if (fence_close == std::string_view::npos) return {};
    std::size_t head = prompt.rfind(kThinkHead, fence_close);
    if (head == std::string_view::npos) return {};
    std::size_t start = head + kThinkHead.size();
    if (start > fence_close) return {};
    return prompt.substr(start, fence_close - start);
}

} // namespace

MockGenerator::MockGenerator(MockConfig cfg) : cfg_(cfg) {}

void MockGenerator::script(std::string marker,
                           std::vector<std::string> responses) {
    std::lock_guard<std::mutex> lock(mu_);
    scripts_.emplace_back(std::move(marker), std::move(responses));
}

void MockGenerator::script_transport_failures(std::string marker,
                                              int failures) {
    std::lock_guard<std::mutex> lock(mu_);
    failure_scripts_.emplace_back(std::move(marker), failures);
}

int MockGenerator::calls() const {
    std::lock_guard<std::mutex> lock(mu_);
    return calls_;
}

GenerationResult MockGenerator::generate(const GenerationRequest& req) {
    ConcurrencyGuard guard(concurrent_, max_concurrent_);
    if (cfg_.artificial_delay_ms > 0) {
        std::this_thread::sleep_for(
            std::chrono::milliseconds(cfg_.artificial_delay_ms));
    }

    {
        std::lock_guard<std::mutex> lock(mu_);
        ++calls_;

        for (auto& [marker, remaining] : failure_scripts_) {
            if (remaining > 0 &&
                req.prompt.find(marker) != std::string::npos) {
                --remaining;
                throw TransportError("scripted transport failure", 1);
            }
        }
        for (auto& [marker, responses] : scripts_) {
            if (req.prompt.find(marker) != std::string::npos) {
                std::size_t cursor = script_cursor_[marker]++;
                std::size_t idx = std::min(cursor, responses.size() - 1);
                return GenerationResult{responses[idx], false, 1};
            }
        }
    }

    std::size_t echo = req.prompt.find(kEchoMarker);
    if (echo != std::string::npos) {
        std::size_t start = echo + kEchoMarker.size();
        std::size_t end = req.prompt.find('\n', start);
        if (end == std::string::npos) end = req.prompt.size();
        return GenerationResult{req.prompt.substr(start, end - start), false,
                                1};
    }

    return GenerationResult{synthesize(req), false, 1};
}

std::string MockGenerator::synthesize(const GenerationRequest& req) const {
    std::uint64_t h = mix(cfg_.seed, req.prompt, req.variation);

    std::string_view think = extract_think(req.prompt);
    if (!think.empty()) {
        // Simulated coarse prune: usually an ordered verbatim subset of the
        // thinking steps, sometimes reversed (never validates against
        // distinct steps), sometimes wrapped in a Markdown fence.
        StepSequence steps = split_steps(think);
        if (steps.size() <= 1) return std::string(think);

        std::vector<std::string> kept;
        for (std::size_t i = 0; i < steps.size(); ++i) {
            if (fnv1a64_u64(i, h) % 100 < 60) kept.push_back(steps[i]);
        }
        if (kept.empty()) kept.push_back(steps[0]);
        if (h % 7 == 0 && kept.size() > 1) {
            std::reverse(kept.begin(), kept.end());
        }
        std::string body = join_steps(StepSequence(std::move(kept)));
        if (h % 3 == 0) {
            return "```\n" + body + "\n```";
        }
        return body;
    }

    if (req.prompt.find(kDirectMarker) != std::string::npos) {
        return "Step-by-Step Solution:\nStep 1: restate the task (" +
               to_hex(h) +
               ").\nStep 2: derive the answer from the given code.\n\n"
               "Final Code:\nsee answer";
    }

    return "mock-response-" + to_hex(h);
}

MockScorer::MockScorer(MockConfig cfg) : cfg_(cfg) {}

int MockScorer::calls() const {
    std::lock_guard<std::mutex> lock(mu_);
    return calls_;
}

double MockScorer::formula_logprob(std::uint64_t seed, std::string_view token,
                                   std::size_t index) {
    std::uint64_t h = fnv1a64_u64(static_cast<std::uint64_t>(index),
                                  fnv1a64(token, fnv1a64_u64(seed)));
    return -(1.0 + static_cast<double>(h % 1000) / 250.0);
}

ScoredSequence MockScorer::score(const std::string& full_text,
                                 const std::string& model_name) {
    (void)model_name;
    ConcurrencyGuard guard(concurrent_, max_concurrent_);
    if (cfg_.artificial_delay_ms > 0) {
        std::this_thread::sleep_for(
            std::chrono::milliseconds(cfg_.artificial_delay_ms));
    }
    {
        std::lock_guard<std::mutex> lock(mu_);
        ++calls_;
    }

    ScoredSequence seq;
    seq.text = full_text;
    seq.tokens = covering_spans(full_text);

    bool misalign = full_text.find(kScoreMisalignMarker) != std::string::npos;
    for (auto& span : seq.tokens) {
        std::string_view token =
            std::string_view(full_text)
                .substr(span.byte_start, span.byte_end - span.byte_start);
        span.logprob = formula_logprob(cfg_.seed, token, span.index);
        if (misalign && span.index == 0) {
            span.byte_end += 1;  // deliberate overlap for fault injection
        }
    }

    if (cfg_.top_alternatives > 0) {
        seq.top_alternatives.resize(seq.tokens.size());
        for (std::size_t i = 0; i < seq.tokens.size(); ++i) {
            const auto& span = seq.tokens[i];
            std::string_view token =
                std::string_view(full_text)
                    .substr(span.byte_start, span.byte_end - span.byte_start);
            for (int k = 0; k < cfg_.top_alternatives; ++k) {
                seq.top_alternatives[i].emplace_back(
                    "alt" + std::to_string(k),
                    formula_logprob(cfg_.seed + 1 + static_cast<std::uint64_t>(k),
                                    token, i));
            }
        }
    }
    return seq;
}

} // namespace cotprune
