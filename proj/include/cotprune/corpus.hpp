#pragma once

#include <cstddef>
#include <cstdint>
#include <fstream>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "cotprune/types.hpp"

namespace cotprune {

struct LoadStats {
    std::size_t lines_total = 0;
    std::size_t malformed_skipped = 0;
    std::vector<std::string> malformed_reasons;  // capped, for telemetry
};

/// Parses one JSONL line into a RawRecord. Throws ValidationError for
/// non-object JSON or wrongly typed fields; unknown keys are ignored.
RawRecord parse_raw_record(const std::string& line);

/// JSON round-trip for processed samples. Key order is fixed so output files
/// are byte-stable across runs.
std::string sample_to_json(const Sample& sample);
Sample sample_from_json(const std::string& line);

/// Loads a corpus file. Malformed lines are skipped and counted; when more
/// than `max_malformed_fraction` of non-empty lines are malformed the load
/// aborts with ValidationError, on the theory that the file is the wrong
/// format rather than slightly dirty. Records missing an id get "line<N>"
/// (1-based); a duplicate id makes the later line malformed.
std::vector<Sample> load_corpus(const std::string& path, LoadStats& stats,
                                double max_malformed_fraction = 0.5);

/// Loads a corpus of already-processed samples (full output records), for
/// stage2-only runs, stats, validation, and SFT emission. Same skipping and
/// abort rules as load_corpus.
std::vector<Sample> load_processed_corpus(const std::string& path,
                                          LoadStats& stats,
                                          double max_malformed_fraction = 0.5);

/// Writes samples as JSONL with crash recovery. After each sample line is
/// flushed, a journal line {"id","off"} is appended to `<path>.journal`
/// recording the output byte offset past that sample. On resume the output
/// is truncated to the last journaled offset and the journaled ids are
/// skipped; finalize() removes the journal. An existing output without
/// `resume` is refused rather than clobbered.
class CorpusWriter {
public:
    CorpusWriter(std::string path, bool resume);
    ~CorpusWriter();

    bool already_done(const std::string& id) const;
    std::size_t done_count() const { return done_ids_.size(); }

    void write(const Sample& sample);
    void finalize();

    /// Test hook: terminate the process (exit code 137) immediately after
    /// the Nth journal append, counting writes made by this instance.
    void set_crash_after(std::uint64_t n) { crash_after_ = n; }

private:
    void load_journal();
    void recover_by_scan();

    std::string path_;
    std::string journal_path_;
    std::ofstream out_;
    std::ofstream journal_;
    std::unordered_set<std::string> done_ids_;
    std::uint64_t offset_ = 0;  // bytes of trusted output written so far
    std::uint64_t writes_ = 0;
    std::uint64_t crash_after_ = 0;  // 0 = disabled
    bool finalized_ = false;
};

} // namespace cotprune
