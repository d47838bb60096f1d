#pragma once

#include <atomic>
#include <cstdint>
#include <mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "cotprune/gateway.hpp"

namespace cotprune {

/// Marker the mock generator echoes: a prompt containing "[ECHO]xyz" yields
/// "xyz" (up to the end of that line).
inline constexpr std::string_view kEchoMarker = "[ECHO]";

/// Marker that makes the mock scorer return deliberately misaligned spans,
/// for exercising the downstream integrity check.
inline constexpr std::string_view kScoreMisalignMarker = "[SCORE_MISALIGN]";

struct MockConfig {
    std::uint64_t seed = 0;
    int top_alternatives = 0;   // per-token alternatives emitted by the scorer
    int artificial_delay_ms = 0;  // makes concurrency overlap observable
};

/// Deterministic offline generator. Behavior, in priority order:
///   1. transport-failure scripts (throw TransportError n times per marker),
///   2. scripted responses keyed by a marker contained in the prompt,
///   3. "[ECHO]..." echoing,
///   4. synthesized responses for the two pipeline prompt shapes: a pseudo
///      anchor for direct-CoT prompts, and for prune prompts an ordered
///      subset of the steps found in the prompt's thinking block.
/// Responses depend only on (seed, prompt, request variation), never on
/// call order, so runs are reproducible regardless of thread interleaving
/// and of which samples ran in an earlier, interrupted process.
class MockGenerator final : public TextGenerator {
public:
    explicit MockGenerator(MockConfig cfg = {});

    /// Responses are consumed in order; the last one repeats once exhausted.
    void script(std::string marker, std::vector<std::string> responses);

    /// The first `failures` calls whose prompt contains `marker` throw a
    /// retryable TransportError.
    void script_transport_failures(std::string marker, int failures);

    GenerationResult generate(const GenerationRequest& req) override;

    int calls() const;
    int max_concurrent_seen() const { return max_concurrent_.load(); }

private:
    std::string synthesize(const GenerationRequest& req) const;

    MockConfig cfg_;
    mutable std::mutex mu_;
    std::vector<std::pair<std::string, std::vector<std::string>>> scripts_;
    std::unordered_map<std::string, std::size_t> script_cursor_;
    std::vector<std::pair<std::string, int>> failure_scripts_;
    int calls_ = 0;

    std::atomic<int> concurrent_{0};
    std::atomic<int> max_concurrent_{0};
};

/// Deterministic offline scorer. Tokenizes with full-coverage spans (words,
/// single punctuation marks, whitespace runs) and assigns
///     logprob(token) = -(1 + (h mod 1000) / 250)
/// where h = FNV-1a 64 over seed (8 LE bytes), the token text, and the token
/// index (8 LE bytes). The formula is the cross-implementation test vector
/// contract, so do not change it.
class MockScorer final : public SequenceScorer {
public:
    explicit MockScorer(MockConfig cfg = {});

    ScoredSequence score(const std::string& full_text,
                         const std::string& model_name) override;

    static double formula_logprob(std::uint64_t seed, std::string_view token,
                                  std::size_t index);

    int calls() const;
    int max_concurrent_seen() const { return max_concurrent_.load(); }

private:
    MockConfig cfg_;
    mutable std::mutex mu_;
    int calls_ = 0;
    std::atomic<int> concurrent_{0};
    std::atomic<int> max_concurrent_{0};
};

} // namespace cotprune
