#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "cotprune/corpus.hpp"
#include "cotprune/errors.hpp"
#include "cotprune/gateway.hpp"
#include "cotprune/mock_backends.hpp"
#include "cotprune/openai_client.hpp"
#include "cotprune/pipeline.hpp"
#include "cotprune/prompts.hpp"
#include "cotprune/report.hpp"
#include "cotprune/sft.hpp"
#include "cotprune/tokenizer.hpp"

#ifndef COTPRUNE_DEFAULT_ASSET_DIR
#define COTPRUNE_DEFAULT_ASSET_DIR "assets/prompts"
#endif

namespace {

using cotprune::RunStage;
using ordered_json = nlohmann::ordered_json;

// Progress and diagnostics go to stderr as one JSON object per line; stdout
// carries only data, so runs compose in shell pipelines.
void telemetry(ordered_json event) {
    std::cerr << event.dump() << "\n";
}

struct CommonOpts {
    std::string input;
    std::string output;
    double tau = 0.6;
    std::size_t budget = 4096;
    std::string gen_endpoint;
    std::string score_endpoint;
    std::string gen_model = "deepseek-v3";
    std::string score_model = "deepseek-r1-distill-qwen-7b";
    int max_retries = 8;
    int concurrency = 8;
    int transport_retries = 3;
    int timeout_s = 120;
    double rate_per_s = 0.0;
    bool mock = false;
    std::uint64_t seed = 0;
    bool resume = false;
    bool serial = false;
    std::string report_path;
    std::string prompt_dir = COTPRUNE_DEFAULT_ASSET_DIR;
    std::uint64_t crash_after = 0;
    bool include_fallback = false;
    std::string format = "plain";
};

void add_io_options(CLI::App* cmd, CommonOpts& opt, bool needs_output) {
    cmd->add_option("--input", opt.input, "Input JSONL corpus")
        ->required();
    auto* out = cmd->add_option("--output", opt.output, "Output JSONL path");
    if (needs_output) out->required();
}

void add_backend_options(CLI::App* cmd, CommonOpts& opt, bool generation,
                         bool scoring) {
    if (generation) {
        cmd->add_option("--gen-endpoint", opt.gen_endpoint,
                        "Generation endpoint base URL (OpenAI-compatible)");
        cmd->add_option("--gen-model", opt.gen_model, "Generation model name")
            ->capture_default_str();
        cmd->add_option("--max-retries", opt.max_retries,
                        "Stage-1 validation retry cap")
            ->capture_default_str();
        cmd->add_option("--prompt-dir", opt.prompt_dir,
                        "Directory holding the prompt template assets")
            ->capture_default_str();
    }
    if (scoring) {
        cmd->add_option("--score-endpoint", opt.score_endpoint,
                        "Scoring endpoint base URL (defaults to --gen-endpoint)");
        cmd->add_option("--score-model", opt.score_model,
                        "Scoring model name")
            ->capture_default_str();
    }
    cmd->add_flag("--mock", opt.mock,
                  "Use the deterministic offline backends");
    cmd->add_option("--seed", opt.seed, "Seed for the mock backends")
        ->capture_default_str();
    cmd->add_option("--concurrency", opt.concurrency,
                    "Worker threads and in-flight request cap")
        ->capture_default_str();
    cmd->add_option("--transport-retries", opt.transport_retries,
                    "Retries after a transient transport failure")
        ->capture_default_str();
    cmd->add_option("--timeout", opt.timeout_s, "HTTP timeout in seconds")
        ->capture_default_str();
    cmd->add_option("--rate-limit", opt.rate_per_s,
                    "Max requests per second (0 = unlimited)")
        ->capture_default_str();
    cmd->add_flag("--serial", opt.serial,
                  "Process samples with the serial reference driver");
}

void add_run_options(CLI::App* cmd, CommonOpts& opt) {
    cmd->add_option("--tau", opt.tau,
                    "Minimum Gestalt similarity for a step match")
        ->capture_default_str();
    cmd->add_option("--budget", opt.budget, "Token budget for the final CoT")
        ->capture_default_str();
    cmd->add_flag("--resume", opt.resume,
                  "Continue an interrupted run from its journal");
    cmd->add_option("--report", opt.report_path,
                    "Write the run report to this file instead of stdout");
    cmd->add_option("--crash-after", opt.crash_after,
                    "Testing hook: kill the process after N written samples")
        ->group("");  // hidden from --help
}

cotprune::Gateway build_gateway(const CommonOpts& opt, bool generation,
                                bool scoring) {
    cotprune::GatewayConfig gcfg;
    gcfg.transport_retries = opt.transport_retries;
    gcfg.max_in_flight = opt.concurrency;
    gcfg.rate_per_s = opt.rate_per_s;

    if (opt.mock) {
        cotprune::MockConfig mcfg;
        mcfg.seed = opt.seed;
        return cotprune::Gateway(
            std::make_unique<cotprune::MockGenerator>(mcfg),
            std::make_unique<cotprune::MockScorer>(mcfg), gcfg);
    }

    // Credentials come from the environment only; a flag or config entry
    // would leak them into shell history and committed files.
    const char* key = std::getenv("COTPRUNE_API_KEY");
    std::string api_key = key ? key : "";

    std::unique_ptr<cotprune::TextGenerator> generator;
    std::unique_ptr<cotprune::SequenceScorer> scorer;
    if (generation) {
        if (opt.gen_endpoint.empty()) {
            throw cotprune::ConfigError(
                "--gen-endpoint is required without --mock");
        }
        generator = std::make_unique<cotprune::OpenAiGenerator>(
            std::make_shared<cotprune::HttpTransport>(opt.gen_endpoint,
                                                      api_key, opt.timeout_s));
    }
    if (scoring) {
        std::string endpoint = opt.score_endpoint.empty() ? opt.gen_endpoint
                                                          : opt.score_endpoint;
        if (endpoint.empty()) {
            throw cotprune::ConfigError(
                "--score-endpoint is required without --mock");
        }
        scorer = std::make_unique<cotprune::OpenAiScorer>(
            std::make_shared<cotprune::HttpTransport>(endpoint, api_key,
                                                      opt.timeout_s));
    }
    return cotprune::Gateway(std::move(generator), std::move(scorer), gcfg);
}

void write_report(const CommonOpts& opt, const cotprune::PruneReport& report) {
    std::string text = cotprune::report_to_json(report);
    if (opt.report_path.empty()) {
        std::cout << text << "\n";
        return;
    }
    std::ofstream out(opt.report_path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw cotprune::ConfigError("cannot write report: " + opt.report_path);
    }
    out << text << "\n";
}

int process_corpus(const CommonOpts& opt, RunStage stage) {
    cotprune::PipelineConfig cfg;
    cfg.stage1.tau = opt.tau;
    cfg.stage1.max_retries = opt.max_retries;
    cfg.stage1.model_name = opt.gen_model;
    cfg.score_model = opt.score_model;
    cfg.budget = opt.budget;
    cfg.stage = stage;
    cfg.threads = opt.concurrency;

    bool generation = stage != RunStage::stage2_only;
    bool scoring = stage != RunStage::stage1_only;

    std::optional<cotprune::PromptTemplates> prompts;
    if (generation) {
        prompts = cotprune::PromptTemplates::load(opt.prompt_dir);
    } else {
        // Stage 2 never renders prompts; point at the default dir so the
        // reference stays valid.
        prompts = cotprune::PromptTemplates::load(COTPRUNE_DEFAULT_ASSET_DIR);
    }

    cotprune::Gateway gateway = build_gateway(opt, generation, scoring);
    cotprune::WhitespaceTokenizer tokenizer;

    cotprune::LoadStats stats;
    std::vector<cotprune::Sample> samples =
        (stage == RunStage::stage2_only)
            ? cotprune::load_processed_corpus(opt.input, stats)
            : cotprune::load_corpus(opt.input, stats);

    cotprune::CorpusWriter writer(opt.output, opt.resume);
    writer.set_crash_after(opt.crash_after);

    std::vector<cotprune::Sample> todo;
    todo.reserve(samples.size());
    for (auto& s : samples) {
        if (!writer.already_done(s.id)) todo.push_back(std::move(s));
    }
    std::size_t resumed = samples.size() - todo.size();

    telemetry({{"event", "run_start"},
               {"input", opt.input},
               {"samples", samples.size()},
               {"resumed", resumed},
               {"malformed_skipped", stats.malformed_skipped},
               {"mock", opt.mock}});
    for (const std::string& reason : stats.malformed_reasons) {
        telemetry({{"event", "malformed_line"}, {"detail", reason}});
    }

    auto on_done = [&](const cotprune::Sample& s) {
        writer.write(s);
        telemetry({{"event", "sample_done"},
                   {"id", s.id},
                   {"status", std::string(to_string(s.status))},
                   {"retries_used", s.retries_used}});
    };

    if (opt.serial) {
        run_corpus_serial(todo, cfg, gateway, *prompts, tokenizer, on_done);
    } else {
        run_corpus_parallel(todo, cfg, gateway, *prompts, tokenizer, on_done);
    }
    writer.finalize();

    // The report is recomputed from the file just written, so resumed and
    // uninterrupted runs agree by construction.
    cotprune::LoadStats out_stats;
    std::vector<cotprune::Sample> written =
        cotprune::load_processed_corpus(opt.output, out_stats);
    cotprune::PruneReport report = cotprune::compute_report(
        written, tokenizer, stats.malformed_skipped);
    write_report(opt, report);

    telemetry({{"event", "run_done"},
               {"samples_total", report.samples_total},
               {"stage2_ok", report.stage2_ok},
               {"failed", report.failed},
               {"reduction_pct", report.reduction_pct}});
    return report.failed > 0 ? 2 : 0;
}

int run_stats(const CommonOpts& opt) {
    cotprune::WhitespaceTokenizer tokenizer;
    cotprune::LoadStats stats;
    std::vector<cotprune::Sample> samples =
        cotprune::load_processed_corpus(opt.input, stats);
    cotprune::PruneReport report =
        cotprune::compute_report(samples, tokenizer, stats.malformed_skipped);
    write_report(opt, report);
    return 0;
}

int run_validate(const CommonOpts& opt) {
    cotprune::WhitespaceTokenizer tokenizer;
    cotprune::LoadStats stats;
    std::vector<cotprune::Sample> samples =
        cotprune::load_processed_corpus(opt.input, stats);
    cotprune::ValidationReport report = cotprune::validate_corpus(
        samples, opt.tau, opt.budget, tokenizer, opt.concurrency);
    for (const auto& [id, message] : report.violations) {
        telemetry({{"event", "violation"}, {"id", id}, {"message", message}});
    }
    ordered_json summary = {{"samples_checked", report.samples_checked},
                            {"violations", report.violations.size()},
                            {"malformed_skipped", stats.malformed_skipped}};
    std::cout << summary.dump() << "\n";
    return report.violations.empty() ? 0 : 1;
}

int run_emit_sft(const CommonOpts& opt) {
    cotprune::LoadStats stats;
    std::vector<cotprune::Sample> samples =
        cotprune::load_processed_corpus(opt.input, stats);
    cotprune::SftConfig cfg;
    cfg.include_fallback = opt.include_fallback;
    cfg.format = cotprune::sft_format_from_string(opt.format);

    cotprune::SftStats emitted;
    if (opt.output.empty()) {
        emitted = cotprune::emit_sft(samples, cfg, std::cout);
    } else {
        std::ofstream out(opt.output, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw cotprune::ConfigError("cannot write SFT output: " +
                                        opt.output);
        }
        emitted = cotprune::emit_sft(samples, cfg, out);
    }
    telemetry({{"event", "sft_done"},
               {"emitted", emitted.emitted},
               {"fallback_emitted", emitted.fallback_emitted},
               {"skipped", emitted.skipped}});
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Two-stage compression of chain-of-thought corpora"};
    app.require_subcommand(1);
    app.set_config("--config", "",
                   "Config file mirroring the long option names");

    CommonOpts opt;

    CLI::App* run = app.add_subcommand(
        "run", "Coarse prune, score, and refine a corpus end to end");
    add_io_options(run, opt, true);
    add_backend_options(run, opt, true, true);
    add_run_options(run, opt);

    CLI::App* stage1 = app.add_subcommand(
        "stage1", "Anchor-guided coarse pruning only");
    add_io_options(stage1, opt, true);
    add_backend_options(stage1, opt, true, false);
    add_run_options(stage1, opt);

    CLI::App* stage2 = app.add_subcommand(
        "stage2", "Surprisal refinement of a coarse-pruned corpus");
    add_io_options(stage2, opt, true);
    add_backend_options(stage2, opt, false, true);
    add_run_options(stage2, opt);

    CLI::App* stats = app.add_subcommand(
        "stats", "Recompute the report for a processed corpus");
    add_io_options(stats, opt, false);
    stats->add_option("--report", opt.report_path,
                      "Write the report to this file instead of stdout");

    CLI::App* validate = app.add_subcommand(
        "validate", "Audit a processed corpus against the pipeline invariants");
    add_io_options(validate, opt, false);
    validate->add_option("--tau", opt.tau, "Similarity threshold to audit at")
        ->capture_default_str();
    validate->add_option("--budget", opt.budget, "Token budget to audit at")
        ->capture_default_str();
    validate->add_option("--concurrency", opt.concurrency, "Worker threads")
        ->capture_default_str();

    CLI::App* emit = app.add_subcommand(
        "emit-sft", "Export finished samples as SFT prompt/response pairs");
    add_io_options(emit, opt, false);
    emit->add_flag("--include-fallback", opt.include_fallback,
                   "Also emit fallback samples, marked, from their coarse text");
    emit->add_option("--format", opt.format, "plain or think-tags")
        ->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return process_corpus(opt, RunStage::full);
        if (stage1->parsed()) {
            return process_corpus(opt, RunStage::stage1_only);
        }
        if (stage2->parsed()) {
            return process_corpus(opt, RunStage::stage2_only);
        }
        if (stats->parsed()) return run_stats(opt);
        if (validate->parsed()) return run_validate(opt);
        if (emit->parsed()) return run_emit_sft(opt);
    } catch (const std::exception& e) {
        telemetry({{"event", "fatal"}, {"error", e.what()}});
        return 1;
    }
    return 1;
}
