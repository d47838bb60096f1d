#include "cotprune/openai_client.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include <httplib.h>
#include <json.hpp>

#include "cotprune/errors.hpp"
#include "cotprune/hash.hpp"

namespace cotprune {

namespace {

using json = nlohmann::json;

constexpr const char* kChatPath = "/v1/chat/completions";
constexpr const char* kCompletionsPath = "/v1/completions";

[[noreturn]] void throw_for_status(int status, const std::string& body) {
    if (status == 401 || status == 403) {
        throw AuthError("authentication rejected (HTTP " +
                        std::to_string(status) + ")");
    }
    if (status == 408 || status == 429 || status >= 500) {
        throw TransportError("HTTP " + std::to_string(status), 1);
    }
    std::string detail = body.substr(0, 200);
    throw Error("HTTP " + std::to_string(status) + ": " + detail);
}

json parse_backend_json(const std::string& body) {
    json parsed = json::parse(body, nullptr, false);
    if (parsed.is_discarded()) {
        throw IntegrityError("backend returned unparseable JSON");
    }
    return parsed;
}

} // namespace

std::string request_digest(std::string_view path, std::string_view body) {
    return to_hex(fnv1a64(body, fnv1a64("\n", fnv1a64(path))));
}

struct HttpTransport::Impl {
    httplib::Client client;
    std::string api_key;

    Impl(const std::string& base_url, std::string key, int timeout_s)
        : client(base_url), api_key(std::move(key)) {
        client.set_connection_timeout(timeout_s, 0);
        client.set_read_timeout(timeout_s, 0);
        client.set_write_timeout(timeout_s, 0);
        client.set_follow_location(true);
    }
};

HttpTransport::HttpTransport(std::string base_url, std::string api_key,
                             int timeout_s) {
    if (base_url.rfind("http://", 0) != 0 &&
        base_url.rfind("https://", 0) != 0) {
        throw ConfigError("endpoint must start with http:// or https://: " +
                          base_url);
    }
#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
    if (base_url.rfind("https://", 0) == 0) {
        throw ConfigError(
            "built without TLS support; use an http:// endpoint");
    }
#endif
    impl_ = std::make_unique<Impl>(base_url, std::move(api_key), timeout_s);
}

HttpTransport::~HttpTransport() = default;

TransportResponse HttpTransport::post_json(const std::string& path,
                                           const std::string& body) {
    httplib::Headers headers;
    if (!impl_->api_key.empty()) {
        headers.emplace("Authorization", "Bearer " + impl_->api_key);
    }
    auto res = impl_->client.Post(path, headers, body, "application/json");
    if (!res) {
        throw TransportError(
            "transport failure: " + httplib::to_string(res.error()), 1);
    }
    return TransportResponse{res->status, res->body};
}

FixtureTransport::FixtureTransport(const std::string& fixture_path) {
    std::ifstream in(fixture_path, std::ios::binary);
    if (!in) {
        throw ConfigError("cannot open fixture file: " + fixture_path);
    }
    std::stringstream buf;
    buf << in.rdbuf();
    json doc = json::parse(buf.str(), nullptr, false);
    if (doc.is_discarded() || !doc.is_object() || !doc.contains("entries")) {
        throw ConfigError("malformed fixture file: " + fixture_path);
    }
    for (const auto& [digest, entry] : doc.at("entries").items()) {
        responses_[digest] = TransportResponse{
            entry.at("status").get<int>(),
            entry.at("body").get<std::string>()};
    }
}

TransportResponse FixtureTransport::post_json(const std::string& path,
                                              const std::string& body) {
    std::string digest = request_digest(path, body);
    auto it = responses_.find(digest);
    if (it == responses_.end()) {
        throw StateError("no fixture entry for request digest " + digest +
                         " (path " + path + "); re-record the fixture");
    }
    return it->second;
}

RecordingTransport::RecordingTransport(std::unique_ptr<Transport> inner,
                                       std::string fixture_path)
    : inner_(std::move(inner)), fixture_path_(std::move(fixture_path)) {}

RecordingTransport::~RecordingTransport() {
    try {
        flush();
    } catch (...) {
        // Destructor flush is best effort; call flush() to observe errors.
    }
}

TransportResponse RecordingTransport::post_json(const std::string& path,
                                                const std::string& body) {
    TransportResponse res = inner_->post_json(path, body);
    std::lock_guard<std::mutex> lock(mu_);
    recorded_[request_digest(path, body)] = res;
    return res;
}

void RecordingTransport::flush() {
    std::lock_guard<std::mutex> lock(mu_);
    nlohmann::ordered_json entries = nlohmann::ordered_json::object();
    for (const auto& [digest, res] : recorded_) {
        entries[digest] = {{"status", res.status}, {"body", res.body}};
    }
    nlohmann::ordered_json doc = {{"version", 1}, {"entries", entries}};
    std::ofstream out(fixture_path_, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw ConfigError("cannot write fixture file: " + fixture_path_);
    }
    out << doc.dump(2) << "\n";
}

OpenAiGenerator::OpenAiGenerator(std::shared_ptr<Transport> transport)
    : transport_(std::move(transport)) {}

GenerationResult OpenAiGenerator::generate(const GenerationRequest& req) {
    json body = {
        {"model", req.model_name},
        {"messages", json::array({json{{"role", "user"},
                                       {"content", req.prompt}}})},
        {"temperature", req.temperature},
        {"top_p", req.top_p},
        {"max_tokens", req.max_output_tokens},
    };
    TransportResponse res = transport_->post_json(kChatPath, body.dump());
    if (res.status < 200 || res.status >= 300) {
        throw_for_status(res.status, res.body);
    }
    json parsed = parse_backend_json(res.body);
    if (!parsed.contains("choices") || !parsed.at("choices").is_array() ||
        parsed.at("choices").empty()) {
        throw IntegrityError("chat response has no choices");
    }
    const json& choice = parsed.at("choices").at(0);
    if (!choice.contains("message") ||
        !choice.at("message").contains("content") ||
        !choice.at("message").at("content").is_string()) {
        throw IntegrityError("chat response has no message content");
    }
    GenerationResult out;
    out.text = choice.at("message").at("content").get<std::string>();
    out.truncated = choice.value("finish_reason", "") == "length";
    return out;
}

OpenAiScorer::OpenAiScorer(std::shared_ptr<Transport> transport,
                           int top_alternatives)
    : transport_(std::move(transport)), top_alternatives_(top_alternatives) {}

ScoredSequence OpenAiScorer::score(const std::string& full_text,
                                   const std::string& model_name) {
    json body = {
        {"model", model_name},
        {"prompt", full_text},
        {"max_tokens", 0},
        {"echo", true},
        {"logprobs", top_alternatives_},
    };
    TransportResponse res =
        transport_->post_json(kCompletionsPath, body.dump());
    if (res.status < 200 || res.status >= 300) {
        throw_for_status(res.status, res.body);
    }
    json parsed = parse_backend_json(res.body);
    if (!parsed.contains("choices") || !parsed.at("choices").is_array() ||
        parsed.at("choices").empty()) {
        throw IntegrityError("completions response has no choices");
    }
    const json& choice = parsed.at("choices").at(0);
    if (!choice.contains("logprobs") || choice.at("logprobs").is_null()) {
        throw CapabilityError(
            "scoring endpoint returned no logprobs; echoed-prompt scoring "
            "unsupported");
    }
    const json& lp = choice.at("logprobs");
    if (!lp.contains("token_logprobs") || !lp.contains("text_offset")) {
        throw CapabilityError(
            "scoring endpoint logprobs lack token_logprobs/text_offset");
    }
    const json& logprobs = lp.at("token_logprobs");
    const json& offsets = lp.at("text_offset");
    if (!logprobs.is_array() || !offsets.is_array() ||
        logprobs.size() != offsets.size()) {
        throw IntegrityError("logprob arrays disagree in length");
    }

    ScoredSequence seq;
    seq.text = full_text;
    std::size_t n = logprobs.size();
    seq.tokens.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        TokenSpan span;
        span.index = i;
        span.byte_start = offsets.at(i).get<std::size_t>();
        span.byte_end = (i + 1 < n) ? offsets.at(i + 1).get<std::size_t>()
                                    : full_text.size();
        // The first echoed token has no conditioning context; servers send
        // null. Stored as the 0.0 sentinel, which downstream never reads.
        span.logprob = logprobs.at(i).is_null()
                           ? 0.0
                           : logprobs.at(i).get<double>();
        seq.tokens.push_back(span);
    }

    if (lp.contains("top_logprobs") && lp.at("top_logprobs").is_array()) {
        const json& tops = lp.at("top_logprobs");
        if (tops.size() == n) {
            seq.top_alternatives.resize(n);
            for (std::size_t i = 0; i < n; ++i) {
                if (!tops.at(i).is_object()) continue;
                auto& alts = seq.top_alternatives[i];
                for (const auto& [tok, val] : tops.at(i).items()) {
                    if (val.is_number()) {
                        alts.emplace_back(tok, val.get<double>());
                    }
                }
                std::sort(alts.begin(), alts.end(),
                          [](const auto& x, const auto& y) {
                              if (x.second != y.second)
                                  return x.second > y.second;
                              return x.first < y.first;
                          });
            }
        }
    }
    return seq;
}

} // namespace cotprune
