#include "cotprune/gateway.hpp"

#include <algorithm>
#include <thread>

#include "cotprune/errors.hpp"

namespace cotprune {

namespace {

void validate_config(const GatewayConfig& cfg) {
    if (cfg.transport_retries < 0) {
        throw ConfigError("transport_retries must be >= 0");
    }
    if (cfg.backoff_base_ms < 0) {
        throw ConfigError("backoff_base_ms must be >= 0");
    }
    if (cfg.max_in_flight < 1) {
        throw ConfigError("max_in_flight must be >= 1");
    }
    if (cfg.rate_per_s < 0.0) {
        throw ConfigError("rate_per_s must be >= 0");
    }
    if (cfg.rate_per_s > 0.0 && cfg.rate_burst < 1.0) {
        throw ConfigError("rate_burst must be >= 1 when rate limiting");
    }
}

void validate_request(const GenerationRequest& req) {
    if (req.temperature < 0.0) {
        throw DomainError("temperature must be >= 0");
    }
    if (!(req.top_p > 0.0 && req.top_p <= 1.0)) {
        throw DomainError("top_p must be in (0, 1]");
    }
    if (req.max_output_tokens < 1) {
        throw DomainError("max_output_tokens must be >= 1");
    }
}

} // namespace

class Gateway::FlightSlot {
public:
    explicit FlightSlot(Gateway& g) : g_(g) { g_.acquire_slot(); }
    ~FlightSlot() { g_.release_slot(); }
    FlightSlot(const FlightSlot&) = delete;
    FlightSlot& operator=(const FlightSlot&) = delete;

private:
    Gateway& g_;
};

Gateway::Gateway(std::unique_ptr<TextGenerator> generator,
                 std::unique_ptr<SequenceScorer> scorer, GatewayConfig cfg)
    : generator_(std::move(generator)), scorer_(std::move(scorer)),
      cfg_(cfg) {
    validate_config(cfg_);
}

template <typename Fn>
auto Gateway::with_retries(Fn&& fn) -> decltype(fn()) {
    int attempts = 0;
    for (;;) {
        try {
            ++attempts;
            return fn();
        } catch (const AuthError&) {
            throw;
        } catch (const TransportError& e) {
            if (attempts > cfg_.transport_retries) {
                throw TransportError(e.what(), attempts);
            }
            auto delay = std::chrono::milliseconds(
                static_cast<long long>(cfg_.backoff_base_ms)
                << (attempts - 1));
            if (delay.count() > 0) std::this_thread::sleep_for(delay);
        }
    }
}

GenerationResult Gateway::generate(const GenerationRequest& req) {
    if (!generator_) throw ConfigError("no generation backend configured");
    validate_request(req);
    int attempts = 0;
    auto result = with_retries([&] {
        ++attempts;
        rate_limit_wait();
        FlightSlot slot(*this);
        return generator_->generate(req);
    });
    result.attempts = attempts;
    return result;
}

ScoredSequence Gateway::score_sequence(const std::string& full_text,
                                       const std::string& model_name) {
    if (!scorer_) throw ConfigError("no scoring backend configured");
    if (full_text.empty()) return ScoredSequence{};
    auto result = with_retries([&] {
        rate_limit_wait();
        FlightSlot slot(*this);
        return scorer_->score(full_text, model_name);
    });
    check_scored_sequence(result);
    if (result.text != full_text) {
        throw IntegrityError("scored text differs from the submitted text");
    }
    return result;
}

void Gateway::acquire_slot() {
    std::unique_lock<std::mutex> lock(slot_mu_);
    slot_cv_.wait(lock, [&] { return in_flight_ < cfg_.max_in_flight; });
    ++in_flight_;
    int seen = in_flight_;
    int prev = max_in_flight_seen_.load();
    while (prev < seen && !max_in_flight_seen_.compare_exchange_weak(prev, seen)) {
    }
}

void Gateway::release_slot() {
    {
        std::lock_guard<std::mutex> lock(slot_mu_);
        --in_flight_;
    }
    slot_cv_.notify_one();
}

void Gateway::rate_limit_wait() {
    if (cfg_.rate_per_s <= 0.0) return;
    for (;;) {
        std::chrono::duration<double> wait{0.0};
        {
            std::lock_guard<std::mutex> lock(bucket_mu_);
            auto now = std::chrono::steady_clock::now();
            if (bucket_refill_ == std::chrono::steady_clock::time_point{}) {
                bucket_tokens_ = cfg_.rate_burst;
            } else {
                std::chrono::duration<double> elapsed = now - bucket_refill_;
                bucket_tokens_ = std::min(
                    cfg_.rate_burst,
                    bucket_tokens_ + elapsed.count() * cfg_.rate_per_s);
            }
            bucket_refill_ = now;
            if (bucket_tokens_ >= 1.0) {
                bucket_tokens_ -= 1.0;
                return;
            }
            wait = std::chrono::duration<double>(
                (1.0 - bucket_tokens_) / cfg_.rate_per_s);
        }
        std::this_thread::sleep_for(wait);
    }
}

void check_scored_sequence(const ScoredSequence& seq) {
    if (seq.text.empty()) {
        if (!seq.tokens.empty()) {
            throw IntegrityError("tokens present for empty scored text");
        }
        return;
    }
    if (seq.tokens.empty()) {
        throw IntegrityError("no tokens for non-empty scored text");
    }
    std::size_t expected_start = 0;
    for (std::size_t i = 0; i < seq.tokens.size(); ++i) {
        const TokenSpan& t = seq.tokens[i];
        if (t.index != i) {
            throw IntegrityError("token indices not contiguous at " +
                                 std::to_string(i));
        }
        if (t.byte_start != expected_start) {
            throw IntegrityError("token coverage gap before byte " +
                                 std::to_string(t.byte_start));
        }
        if (t.byte_end <= t.byte_start || t.byte_end > seq.text.size()) {
            throw IntegrityError("bad token span at index " +
                                 std::to_string(i));
        }
        if (!t.logprob.has_value()) {
            throw IntegrityError("token without logprob at index " +
                                 std::to_string(i));
        }
        if (*t.logprob > 0.0) {
            throw IntegrityError("positive logprob at index " +
                                 std::to_string(i));
        }
        expected_start = t.byte_end;
    }
    if (expected_start != seq.text.size()) {
        throw IntegrityError("token coverage ends before end of text");
    }
    if (!seq.top_alternatives.empty() &&
        seq.top_alternatives.size() != seq.tokens.size()) {
        throw IntegrityError("top_alternatives length mismatch");
    }
}

} // namespace cotprune
