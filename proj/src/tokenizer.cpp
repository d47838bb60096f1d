#include "cotprune/tokenizer.hpp"

namespace cotprune {

namespace {

// Decodes one UTF-8 code point at `i`; returns its value and advances `i`.
// Malformed bytes are consumed one at a time and returned as-is, so the
// tokenizer stays total on arbitrary byte strings.
char32_t decode_utf8(std::string_view text, std::size_t& i) {
    unsigned char c = static_cast<unsigned char>(text[i]);
    std::size_t len = 0;
    char32_t cp = 0;
    if (c < 0x80) {
        ++i;
        return c;
    } else if ((c & 0xE0) == 0xC0) {
        len = 2;
        cp = c & 0x1F;
    } else if ((c & 0xF0) == 0xE0) {
        len = 3;
        cp = c & 0x0F;
    } else if ((c & 0xF8) == 0xF0) {
        len = 4;
        cp = c & 0x07;
    } else {
        ++i;
        return c;
    }
    if (i + len > text.size()) {
        ++i;
        return c;
    }
    for (std::size_t k = 1; k < len; ++k) {
        unsigned char cc = static_cast<unsigned char>(text[i + k]);
        if ((cc & 0xC0) != 0x80) {
            ++i;
            return c;
        }
        cp = (cp << 6) | (cc & 0x3F);
    }
    i += len;
    return cp;
}

// Unicode White_Space property.
bool is_unicode_ws(char32_t cp) {
    switch (cp) {
        case 0x0009: case 0x000A: case 0x000B: case 0x000C: case 0x000D:
        case 0x0020: case 0x0085: case 0x00A0: case 0x1680:
        case 0x2028: case 0x2029: case 0x202F: case 0x205F: case 0x3000:
            return true;
        default:
            return cp >= 0x2000 && cp <= 0x200A;
    }
}

bool is_ascii_punct(char32_t cp) {
    return (cp >= 0x21 && cp <= 0x2F) || (cp >= 0x3A && cp <= 0x40) ||
           (cp >= 0x5B && cp <= 0x60) || (cp >= 0x7B && cp <= 0x7E);
}

enum class CharClass { whitespace, punctuation, word };

CharClass classify(char32_t cp) {
    if (is_unicode_ws(cp)) return CharClass::whitespace;
    if (is_ascii_punct(cp)) return CharClass::punctuation;
    return CharClass::word;
}

// Shared scan. Emits word runs and single punctuation marks; whitespace runs
// are emitted only when `include_whitespace` is set (mock-scorer coverage).
std::vector<TokenSpan> scan(std::string_view text, bool include_whitespace) {
    std::vector<TokenSpan> out;
    std::size_t i = 0;
    std::size_t word_start = 0;
    bool in_word = false;
    std::size_t ws_start = 0;
    bool in_ws = false;

    auto flush_word = [&](std::size_t end) {
        if (in_word) {
            out.push_back({out.size(), word_start, end, std::nullopt});
            in_word = false;
        }
    };
    auto flush_ws = [&](std::size_t end) {
        if (in_ws) {
            if (include_whitespace) {
                out.push_back({out.size(), ws_start, end, std::nullopt});
            }
            in_ws = false;
        }
    };

    while (i < text.size()) {
        std::size_t start = i;
        char32_t cp = decode_utf8(text, i);
        switch (classify(cp)) {
            case CharClass::whitespace:
                flush_word(start);
                if (!in_ws) {
                    in_ws = true;
                    ws_start = start;
                }
                break;
            case CharClass::punctuation:
                flush_word(start);
                flush_ws(start);
                out.push_back({out.size(), start, i, std::nullopt});
                break;
            case CharClass::word:
                flush_ws(start);
                if (!in_word) {
                    in_word = true;
                    word_start = start;
                }
                break;
        }
    }
    flush_word(text.size());
    flush_ws(text.size());
    return out;
}

} // namespace

std::size_t WhitespaceTokenizer::count(std::string_view text) const {
    return scan(text, false).size();
}

std::vector<TokenSpan> WhitespaceTokenizer::spans(std::string_view text) const {
    return scan(text, false);
}

std::vector<TokenSpan> covering_spans(std::string_view text) {
    return scan(text, true);
}

} // namespace cotprune
