#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>

#include "cotprune/gateway.hpp"

namespace cotprune {

struct TransportResponse {
    int status = 0;
    std::string body;
};

/// One HTTP POST of a JSON body to a fixed path. Implementations throw
/// TransportError for connect/read failures so the gateway retry loop can
/// engage; non-2xx statuses come back as-is for the caller to interpret.
class Transport {
public:
    virtual ~Transport() = default;
    virtual TransportResponse post_json(const std::string& path,
                                        const std::string& body) = 0;
};

/// Real HTTP client. `base_url` is scheme://host[:port]; the bearer token is
/// read from the environment by the caller and handed in here, never parsed
/// from argv or config files.
class HttpTransport final : public Transport {
public:
    HttpTransport(std::string base_url, std::string api_key,
                  int timeout_s = 120);
    ~HttpTransport() override;

    TransportResponse post_json(const std::string& path,
                                const std::string& body) override;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Replays canned responses keyed by the request digest
/// fnv1a64(path + "\n" + body), rendered as 16 hex chars. Missing keys throw
/// StateError; replay must be byte-exact or the fixture is stale.
class FixtureTransport final : public Transport {
public:
    explicit FixtureTransport(const std::string& fixture_path);

    TransportResponse post_json(const std::string& path,
                                const std::string& body) override;

private:
    std::map<std::string, TransportResponse> responses_;
};

/// Wraps another transport and records request/response pairs into the same
/// fixture format FixtureTransport reads.
class RecordingTransport final : public Transport {
public:
    RecordingTransport(std::unique_ptr<Transport> inner,
                       std::string fixture_path);
    ~RecordingTransport() override;

    TransportResponse post_json(const std::string& path,
                                const std::string& body) override;

    void flush();

private:
    std::unique_ptr<Transport> inner_;
    std::string fixture_path_;
    std::mutex mu_;
    std::map<std::string, TransportResponse> recorded_;
};

/// Digest used to key fixture entries.
std::string request_digest(std::string_view path, std::string_view body);

/// Chat-completions backend. Sends {model, messages:[{role:"user",...}],
/// temperature, top_p, max_tokens} and reads choices[0].message.content,
/// flagging truncation when finish_reason == "length".
class OpenAiGenerator final : public TextGenerator {
public:
    explicit OpenAiGenerator(std::shared_ptr<Transport> transport);

    GenerationResult generate(const GenerationRequest& req) override;

private:
    std::shared_ptr<Transport> transport_;
};

/// Completions backend in echo mode: {model, prompt, max_tokens:0, echo:true,
/// logprobs:k} returns per-token logprobs for the prompt itself. The first
/// token has no conditional probability; the server sends null and we store
/// the 0.0 sentinel, which downstream never treats as a real score.
class OpenAiScorer final : public SequenceScorer {
public:
    OpenAiScorer(std::shared_ptr<Transport> transport, int top_alternatives = 0);

    ScoredSequence score(const std::string& full_text,
                         const std::string& model_name) override;

private:
    std::shared_ptr<Transport> transport_;
    int top_alternatives_;
};

} // namespace cotprune
