#include "cotprune/segmenter.hpp"

#include "cotprune/errors.hpp"

namespace cotprune {

namespace {

bool line_is_blank(std::string_view line) {
    for (char c : line) {
        if (c != ' ' && c != '\t') return false;
    }
    return true;
}

std::string normalize_newlines(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] == '\r' && i + 1 < text.size() && text[i + 1] == '\n') {
            continue;
        }
        out.push_back(text[i]);
    }
    return out;
}

} // namespace

StepSequence::StepSequence(std::vector<std::string> steps)
    : steps_(std::move(steps)) {
    for (std::size_t s = 0; s < steps_.size(); ++s) {
        const std::string& step = steps_[s];
        auto fail = [&](std::string_view why) {
            throw DomainError("invalid step " + std::to_string(s) + ": " +
                              std::string(why));
        };
        if (step.empty()) fail("is empty");
        if (step.find('\r') != std::string::npos) {
            fail("contains a carriage return");
        }
        // Any blank line inside a step (including a leading or trailing
        // newline, which makes the first or last line empty) breaks the
        // join/split round trip.
        std::size_t pos = 0;
        while (pos <= step.size()) {
            std::size_t nl = step.find('\n', pos);
            std::size_t end = (nl == std::string::npos) ? step.size() : nl;
            if (line_is_blank(std::string_view(step).substr(pos, end - pos))) {
                fail("contains a blank line");
            }
            if (nl == std::string::npos) break;
            pos = nl + 1;
        }
    }
}

StepSequence split_steps(std::string_view cot) {
    std::string text = normalize_newlines(cot);
    std::vector<std::string> steps;
    std::string current;
    bool current_started = false;

    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t nl = text.find('\n', pos);
        std::size_t end = (nl == std::string::npos) ? text.size() : nl;
        std::string_view line = std::string_view(text).substr(pos, end - pos);
        if (line_is_blank(line)) {
            if (current_started) {
                steps.push_back(std::move(current));
                current.clear();
                current_started = false;
            }
        } else {
            if (current_started) current.push_back('\n');
            current.append(line);
            current_started = true;
        }
        if (nl == std::string::npos) break;
        pos = nl + 1;
    }
    if (current_started) steps.push_back(std::move(current));
    return StepSequence(std::move(steps), StepSequence::Unchecked{});
}

std::string join_steps(const StepSequence& seq) {
    std::string out;
    for (std::size_t i = 0; i < seq.size(); ++i) {
        if (i > 0) out.append(StepSequence::kDelimiter);
        out.append(seq[i]);
    }
    return out;
}

bool step_has_unclosed_fence(std::string_view step) {
    std::size_t count = 0;
    std::size_t pos = 0;
    while ((pos = step.find("```", pos)) != std::string_view::npos) {
        ++count;
        pos += 3;
    }
    return (count % 2) != 0;
}

} // namespace cotprune
