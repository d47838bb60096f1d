#include "cotprune/corpus.hpp"

#include <cstdlib>
#include <filesystem>
#include <utility>

#include <json.hpp>

#include "cotprune/errors.hpp"

namespace cotprune {

namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

constexpr std::size_t kMaxReasonsKept = 20;

bool line_is_blank(const std::string& line) {
    for (char c : line) {
        if (c != ' ' && c != '\t' && c != '\r') return false;
    }
    return true;
}

std::optional<std::string> get_text_field(const json& obj, const char* key) {
    if (!obj.contains(key) || obj.at(key).is_null()) return std::nullopt;
    if (!obj.at(key).is_string()) {
        throw ValidationError(std::string("field not text: ") + key);
    }
    return obj.at(key).get<std::string>();
}

// Shared loader skeleton: per-line parse hook, malformed-line accounting,
// duplicate-id rejection, malformed-fraction abort.
template <typename ParseLine>
std::vector<Sample> load_lines(const std::string& path, LoadStats& stats,
                               double max_malformed_fraction,
                               ParseLine&& parse_line) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("cannot open input: " + path);
    }
    std::vector<Sample> samples;
    std::unordered_set<std::string> seen_ids;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line_is_blank(line)) continue;
        ++stats.lines_total;
        try {
            Sample s = parse_line(line, line_no);
            if (s.id.empty()) {
                s.id = "line" + std::to_string(line_no);
            }
            if (!seen_ids.insert(s.id).second) {
                throw ValidationError("duplicate id: " + s.id);
            }
            samples.push_back(std::move(s));
        } catch (const ValidationError& e) {
            ++stats.malformed_skipped;
            if (stats.malformed_reasons.size() < kMaxReasonsKept) {
                stats.malformed_reasons.push_back(
                    "line " + std::to_string(line_no) + ": " + e.what());
            }
        }
    }
    if (stats.lines_total > 0) {
        double fraction = static_cast<double>(stats.malformed_skipped) /
                          static_cast<double>(stats.lines_total);
        if (fraction > max_malformed_fraction) {
            throw ValidationError(
                "too many malformed lines: " +
                std::to_string(stats.malformed_skipped) + " of " +
                std::to_string(stats.lines_total) + " in " + path);
        }
    }
    return samples;
}

} // namespace

RawRecord parse_raw_record(const std::string& line) {
    json obj = json::parse(line, nullptr, false);
    if (obj.is_discarded()) {
        throw ValidationError("invalid JSON");
    }
    if (!obj.is_object()) {
        throw ValidationError("record is not a JSON object");
    }
    RawRecord raw;
    raw.id = get_text_field(obj, "id");
    raw.question = get_text_field(obj, "question");
    raw.cot = get_text_field(obj, "cot");
    raw.answer = get_text_field(obj, "answer");
    return raw;
}

std::string sample_to_json(const Sample& sample) {
    ordered_json o;
    o["id"] = sample.id;
    o["question"] = sample.question;
    o["cot"] = sample.cot_original;
    o["answer"] = sample.answer;
    if (sample.cot_direct) o["cot_direct"] = *sample.cot_direct;
    if (sample.cot_coarse) o["cot_coarse"] = *sample.cot_coarse;
    if (sample.cot_final) o["cot_final"] = *sample.cot_final;
    o["status"] = std::string(to_string(sample.status));
    o["retries_used"] = sample.retries_used;
    o["flags"] = sample.flags;
    ordered_json trace = ordered_json::array();
    for (const StepScoreTrace& t : sample.surprisal_trace) {
        trace.push_back({{"step_index", t.step_index},
                         {"surprisal", t.surprisal},
                         {"kept", t.kept}});
    }
    o["surprisal_trace"] = std::move(trace);
    if (sample.error) o["error"] = *sample.error;
    return o.dump();
}

Sample sample_from_json(const std::string& line) {
    json obj = json::parse(line, nullptr, false);
    if (obj.is_discarded()) {
        throw ValidationError("invalid JSON");
    }
    if (!obj.is_object()) {
        throw ValidationError("record is not a JSON object");
    }
    try {
        Sample s;
        s.id = obj.at("id").get<std::string>();
        s.question = obj.at("question").get<std::string>();
        s.cot_original = obj.at("cot").get<std::string>();
        s.answer = obj.at("answer").get<std::string>();
        s.cot_direct = get_text_field(obj, "cot_direct");
        s.cot_coarse = get_text_field(obj, "cot_coarse");
        s.cot_final = get_text_field(obj, "cot_final");
        s.status = status_from_string(obj.at("status").get<std::string>());
        s.retries_used = obj.at("retries_used").get<int>();
        for (const auto& f : obj.at("flags")) {
            s.flags.push_back(f.get<std::string>());
        }
        for (const auto& t : obj.at("surprisal_trace")) {
            s.surprisal_trace.push_back(
                {t.at("step_index").get<std::size_t>(),
                 t.at("surprisal").get<double>(), t.at("kept").get<bool>()});
        }
        s.error = get_text_field(obj, "error");
        return s;
    } catch (const json::exception& e) {
        throw ValidationError(std::string("bad sample record: ") + e.what());
    }
}

std::vector<Sample> load_corpus(const std::string& path, LoadStats& stats,
                                double max_malformed_fraction) {
    return load_lines(path, stats, max_malformed_fraction,
                      [](const std::string& line, std::size_t) {
                          return validate_sample(parse_raw_record(line));
                      });
}

std::vector<Sample> load_processed_corpus(const std::string& path,
                                          LoadStats& stats,
                                          double max_malformed_fraction) {
    return load_lines(path, stats, max_malformed_fraction,
                      [](const std::string& line, std::size_t) {
                          return sample_from_json(line);
                      });
}

CorpusWriter::CorpusWriter(std::string path, bool resume)
    : path_(std::move(path)), journal_path_(path_ + ".journal") {
    namespace fs = std::filesystem;
    bool output_exists = fs::exists(path_);
    if (!resume && output_exists) {
        throw StateError("output already exists (pass --resume to continue): " +
                         path_);
    }
    if (resume && output_exists) {
        if (fs::exists(journal_path_)) {
            load_journal();
        }
        if (offset_ > fs::file_size(path_)) {
            // Journal promises more than the file holds; distrust it.
            done_ids_.clear();
            offset_ = 0;
        }
        if (offset_ == 0) {
            recover_by_scan();
        }
        fs::resize_file(path_, offset_);
    }

    out_.open(path_, std::ios::binary | std::ios::app);
    if (!out_) {
        throw ConfigError("cannot open output for writing: " + path_);
    }
    // Rewrite the journal so a torn trailing line from a crash never
    // prefixes new appends.
    journal_.open(journal_path_, std::ios::binary | std::ios::trunc);
    if (!journal_) {
        throw ConfigError("cannot open journal for writing: " + journal_path_);
    }
    std::uint64_t off = 0;
    std::ifstream replay(path_, std::ios::binary);
    std::string line;
    // Journal entries are re-derived from the trusted output prefix; ids in
    // done order with their end offsets.
    while (off < offset_ && std::getline(replay, line)) {
        off += line.size() + 1;
        Sample s = sample_from_json(line);
        json entry = {{"id", s.id}, {"off", off}};
        journal_ << entry.dump() << "\n";
    }
    journal_.flush();
}

CorpusWriter::~CorpusWriter() {
    if (!finalized_) {
        out_.flush();
        journal_.flush();
    }
}

bool CorpusWriter::already_done(const std::string& id) const {
    return done_ids_.count(id) > 0;
}

void CorpusWriter::load_journal() {
    std::ifstream in(journal_path_, std::ios::binary);
    std::string line;
    while (std::getline(in, line)) {
        json entry = json::parse(line, nullptr, false);
        if (entry.is_discarded() || !entry.is_object() ||
            !entry.contains("id") || !entry.contains("off")) {
            break;  // torn tail from a crash; trust only the prefix
        }
        done_ids_.insert(entry.at("id").get<std::string>());
        offset_ = entry.at("off").get<std::uint64_t>();
    }
}

void CorpusWriter::recover_by_scan() {
    std::ifstream in(path_, std::ios::binary);
    std::string line;
    std::uint64_t off = 0;
    while (std::getline(in, line)) {
        if (in.eof()) break;  // final line lacks its newline: torn tail
        std::uint64_t end = off + line.size() + 1;
        try {
            Sample s = sample_from_json(line);
            done_ids_.insert(s.id);
            offset_ = end;
        } catch (const ValidationError&) {
            break;  // torn or foreign tail; trust only the prefix
        }
        off = end;
    }
}

void CorpusWriter::write(const Sample& sample) {
    if (finalized_) {
        throw StateError("write after finalize");
    }
    std::string line = sample_to_json(sample) + "\n";
    out_ << line;
    out_.flush();
    if (!out_) {
        throw ConfigError("write failed: " + path_);
    }
    offset_ += line.size();
    done_ids_.insert(sample.id);

    json entry = {{"id", sample.id}, {"off", offset_}};
    journal_ << entry.dump() << "\n";
    journal_.flush();
    ++writes_;
    if (crash_after_ > 0 && writes_ >= crash_after_) {
        // Test hook: die without unwinding, as a real crash would.
        std::_Exit(137);
    }
}

void CorpusWriter::finalize() {
    if (finalized_) return;
    out_.flush();
    out_.close();
    journal_.close();
    std::error_code ec;
    std::filesystem::remove(journal_path_, ec);
    finalized_ = true;
}

} // namespace cotprune
