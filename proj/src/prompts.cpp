#include "cotprune/prompts.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <utility>
#include <vector>

#include "cotprune/errors.hpp"

namespace cotprune {

namespace {

std::string read_asset(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("prompt template not found: " + path);
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void check_arity(const std::string& tpl, std::string_view placeholder,
                 const std::string& path) {
    std::size_t first = tpl.find(placeholder);
    if (first == std::string::npos) {
        throw ConfigError("template " + path + " lacks placeholder " +
                          std::string(placeholder));
    }
    if (tpl.find(placeholder, first + 1) != std::string::npos) {
        throw ConfigError("template " + path + " repeats placeholder " +
                          std::string(placeholder));
    }
}

// Replaces each placeholder once at its position in the template. Working
// from the rightmost occurrence leftward keeps earlier positions valid and
// never rescans substituted values, so placeholder-like text inside a value
// survives untouched.
std::string substitute(
    const std::string& tpl,
    std::vector<std::pair<std::string_view, std::string_view>> slots) {
    std::vector<std::pair<std::size_t, std::size_t>> found;  // pos, slot idx
    for (std::size_t s = 0; s < slots.size(); ++s) {
        found.emplace_back(tpl.find(slots[s].first), s);
    }
    std::sort(found.begin(), found.end(),
              [](const auto& a, const auto& b) { return a.first > b.first; });
    std::string out = tpl;
    for (const auto& [pos, s] : found) {
        out.replace(pos, slots[s].first.size(), slots[s].second);
    }
    return out;
}

} // namespace

PromptTemplates::PromptTemplates(std::string direct, std::string prune)
    : direct_(std::move(direct)), prune_(std::move(prune)) {}

PromptTemplates PromptTemplates::load(const std::string& dir) {
    std::string direct_path = dir + "/direct_cot.txt";
    std::string prune_path = dir + "/coarse_prune.txt";
    std::string direct = read_asset(direct_path);
    std::string prune = read_asset(prune_path);
    check_arity(direct, "{question}", direct_path);
    check_arity(direct, "{answer}", direct_path);
    check_arity(prune, "{solution}", prune_path);
    check_arity(prune, "{think}", prune_path);
    return PromptTemplates(std::move(direct), std::move(prune));
}

std::string PromptTemplates::render_direct(std::string_view question,
                                           std::string_view answer) const {
    return substitute(direct_,
                      {{"{question}", question}, {"{answer}", answer}});
}

std::string PromptTemplates::render_prune(std::string_view solution,
                                          std::string_view think) const {
    return substitute(prune_, {{"{solution}", solution}, {"{think}", think}});
}

} // namespace cotprune
