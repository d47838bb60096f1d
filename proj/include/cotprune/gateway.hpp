#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cotprune/types.hpp"

namespace cotprune {

struct GenerationRequest {
    std::string prompt;
    double temperature = 0.0;
    double top_p = 1.0;
    int max_output_tokens = 16384;
    std::string model_name;
    // Draw number when the same prompt is sampled repeatedly. Deterministic
    // backends fold it into their output; live sampling ignores it.
    int variation = 0;
};

struct GenerationResult {
    std::string text;
    bool truncated = false;  // output hit max_output_tokens
    int attempts = 1;        // tries made, including the first
};

/// A fully scored text: every token of `text` with byte offsets and logprob,
/// optionally with up to k alternatives per token for entropy diagnostics.
/// Concatenating the span slices of `text` reproduces `text` exactly.
struct ScoredSequence {
    std::string text;
    std::vector<TokenSpan> tokens;
    // top_alternatives[i] holds (token_text, logprob) pairs for token i;
    // empty when the backend was not asked for alternatives.
    std::vector<std::vector<std::pair<std::string, double>>> top_alternatives;
};

/// Chat-style text generation backend.
class TextGenerator {
public:
    virtual ~TextGenerator() = default;
    virtual GenerationResult generate(const GenerationRequest& req) = 0;
};

/// Per-token logprob scoring backend (echoed-prompt scoring).
class SequenceScorer {
public:
    virtual ~SequenceScorer() = default;
    virtual ScoredSequence score(const std::string& full_text,
                                 const std::string& model_name) = 0;
};

struct GatewayConfig {
    int transport_retries = 3;   // retries after the first attempt
    int backoff_base_ms = 250;   // doubles per retry
    int max_in_flight = 8;
    double rate_per_s = 0.0;     // 0 disables the rate limiter
    double rate_burst = 4.0;
};

/// Front door for both LLM capabilities. Owns the bounded in-flight pool,
/// the token-bucket rate limiter, and retry-with-backoff around transient
/// transport failures. Callers get a blocking contract: a call returns when
/// the response or the final error is available. Safe for concurrent use.
class Gateway {
public:
    Gateway(std::unique_ptr<TextGenerator> generator,
            std::unique_ptr<SequenceScorer> scorer,
            GatewayConfig cfg = {});

    /// Validates the request ranges, then runs the backend under the
    /// concurrency cap. Transient TransportErrors are retried with
    /// exponential backoff up to the configured cap; the error finally
    /// thrown carries the total attempt count.
    GenerationResult generate(const GenerationRequest& req);

    /// Scores every token of full_text. Empty text short-circuits to an
    /// empty span list without touching the backend.
    ScoredSequence score_sequence(const std::string& full_text,
                                  const std::string& model_name);

    int max_in_flight_seen() const { return max_in_flight_seen_.load(); }

    const GatewayConfig& config() const { return cfg_; }

private:
    class FlightSlot;

    template <typename Fn>
    auto with_retries(Fn&& fn) -> decltype(fn());

    void acquire_slot();
    void release_slot();
    void rate_limit_wait();

    std::unique_ptr<TextGenerator> generator_;
    std::unique_ptr<SequenceScorer> scorer_;
    GatewayConfig cfg_;

    std::mutex slot_mu_;
    std::condition_variable slot_cv_;
    int in_flight_ = 0;
    std::atomic<int> max_in_flight_seen_{0};

    std::mutex bucket_mu_;
    double bucket_tokens_ = 0.0;
    std::chrono::steady_clock::time_point bucket_refill_{};
};

/// Verifies the ScoredSequence contract: spans ordered, non-overlapping,
/// gap-free over the whole text, logprobs <= 0. Throws IntegrityError.
void check_scored_sequence(const ScoredSequence& seq);

} // namespace cotprune
