#pragma once

#include <cstddef>
#include <memory>
#include <string_view>
#include <vector>

#include "cotprune/types.hpp"

namespace cotprune {

/// Budget-counting contract. Implementations must be deterministic and safe
/// for concurrent read-only use; count(text) == spans(text).size() always.
class Tokenizer {
public:
    virtual ~Tokenizer() = default;

    virtual std::size_t count(std::string_view text) const = 0;

    /// Token spans in byte order, without logprobs.
    virtual std::vector<TokenSpan> spans(std::string_view text) const = 0;
};

/// Bundled reference tokenizer: splits on Unicode whitespace and treats each
/// ASCII punctuation character as its own token. Whitespace itself is not a
/// token. Dependency-free and deterministic, which is what budget counting
/// and the offline test suites need; model vocabularies plug in behind the
/// same contract.
class WhitespaceTokenizer final : public Tokenizer {
public:
    std::size_t count(std::string_view text) const override;
    std::vector<TokenSpan> spans(std::string_view text) const override;
};

/// Full-coverage segmentation used by the mock scorer: like the reference
/// tokenizer but whitespace runs are tokens too, so concatenating the span
/// texts reproduces the input byte-for-byte.
std::vector<TokenSpan> covering_spans(std::string_view text);

} // namespace cotprune
