#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "cotprune/types.hpp"

namespace cotprune {

enum class SftFormat { plain, think_tags };

SftFormat sft_format_from_string(std::string_view name);

struct SftConfig {
    bool include_fallback = false;
    SftFormat format = SftFormat::plain;
};

struct SftStats {
    std::size_t emitted = 0;
    std::size_t skipped = 0;
    std::size_t fallback_emitted = 0;
};

/// Renders one sample as a training pair. The response is the compressed
/// reasoning followed by a blank line and the answer; think_tags wraps the
/// reasoning in <think> markers instead.
std::string sft_record_json(const Sample& sample, const SftConfig& cfg,
                            bool from_fallback);

/// Emits finished samples as JSONL training pairs. Only samples that
/// completed the refinement stage qualify; with include_fallback, samples
/// that kept their original text at the coarse stage are emitted from that
/// text and marked so downstream filtering stays possible.
SftStats emit_sft(const std::vector<Sample>& samples, const SftConfig& cfg,
                  std::ostream& out);

} // namespace cotprune
