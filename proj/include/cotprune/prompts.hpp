#pragma once

#include <string>
#include <string_view>

namespace cotprune {

/// The two prompt templates live as plain text assets so they can be swapped
/// without rebuilding. Placeholders are {question}, {answer}, {solution},
/// {think}; substitution is a single left-to-right pass, so placeholder-like
/// text inside the substituted values is never re-expanded.
class PromptTemplates {
public:
    static PromptTemplates load(const std::string& dir);

    std::string render_direct(std::string_view question,
                              std::string_view answer) const;
    std::string render_prune(std::string_view solution,
                             std::string_view think) const;

    const std::string& direct_template() const { return direct_; }
    const std::string& prune_template() const { return prune_; }

private:
    PromptTemplates(std::string direct, std::string prune);

    std::string direct_;
    std::string prune_;
};

} // namespace cotprune
