#include "cotprune/pipeline.hpp"

#include <atomic>
#include <exception>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "cotprune/errors.hpp"
#include "cotprune/matcher.hpp"
#include "cotprune/refiner.hpp"
#include "cotprune/scorer.hpp"
#include "cotprune/segmenter.hpp"

namespace cotprune {

namespace {

void run_stage2(Sample& sample, const PipelineConfig& cfg, Gateway& gateway,
                const Tokenizer& tokenizer) {
    StepSequence coarse = split_steps(*sample.cot_coarse);
    if (coarse.empty()) {
        throw IntegrityError("coarse CoT has no steps");
    }
    for (const std::string& step : coarse) {
        if (step_has_unclosed_fence(step)) {
            sample.add_flag(kFlagUnclosedFence);
            break;
        }
    }

    std::vector<ScoredStep> scored =
        score_steps(sample.question, coarse, gateway, cfg.score_model);
    RefineResult refined = fine_prune(scored, cfg.budget, tokenizer);

    std::vector<bool> kept(scored.size(), true);
    for (std::size_t idx : refined.removed_indices) kept[idx] = false;
    sample.surprisal_trace.clear();
    for (const ScoredStep& step : scored) {
        sample.surprisal_trace.push_back(
            {step.step_index, step.surprisal, kept[step.step_index]});
    }

    assemble_final(sample, refined);
}

bool ordered_subsequence(const StepSequence& part, const StepSequence& whole) {
    std::size_t w = 0;
    for (std::size_t p = 0; p < part.size(); ++p) {
        while (w < whole.size() && whole[w] != part[p]) ++w;
        if (w == whole.size()) return false;
        ++w;
    }
    return true;
}

} // namespace

void run_sample(Sample& sample, const PipelineConfig& cfg, Gateway& gateway,
                const PromptTemplates& prompts, const Tokenizer& tokenizer) {
    try {
        if (cfg.stage == RunStage::stage2_only) {
            // Samples already past stage 2 (or dead) pass through untouched,
            // so re-running the stage is idempotent.
            if (sample.status == Status::stage2_ok ||
                sample.status == Status::failed) {
                return;
            }
            if (sample.status != Status::stage1_ok &&
                sample.status != Status::stage1_fallback) {
                throw StateError(
                    "stage 2 needs a coarse-pruned sample, got status " +
                    std::string(to_string(sample.status)));
            }
        } else {
            coarse_prune(sample, cfg.stage1, gateway, prompts);
        }
        if (cfg.stage == RunStage::stage1_only) return;
        run_stage2(sample, cfg, gateway, tokenizer);
    } catch (const AuthError&) {
        throw;
    } catch (const ConfigError&) {
        throw;
    } catch (const TransportError&) {
        // Exhausted retries mean the endpoint is gone, not that this sample
        // is bad; abort so the run can resume later.
        throw;
    } catch (const std::exception& e) {
        sample.status = Status::failed;
        sample.error = e.what();
    }
}

void run_corpus_serial(std::vector<Sample>& samples, const PipelineConfig& cfg,
                       Gateway& gateway, const PromptTemplates& prompts,
                       const Tokenizer& tokenizer,
                       const SampleCallback& on_done) {
    for (Sample& sample : samples) {
        run_sample(sample, cfg, gateway, prompts, tokenizer);
        if (on_done) on_done(sample);
    }
}

void run_corpus_parallel(std::vector<Sample>& samples,
                         const PipelineConfig& cfg, Gateway& gateway,
                         const PromptTemplates& prompts,
                         const Tokenizer& tokenizer,
                         const SampleCallback& on_done) {
#ifdef _OPENMP
    std::exception_ptr systemic;
    std::atomic<bool> aborted{false};
    long n = static_cast<long>(samples.size());
    int threads = cfg.threads > 0 ? cfg.threads : omp_get_max_threads();
#pragma omp parallel for ordered schedule(dynamic, 1) num_threads(threads)
    for (long i = 0; i < n; ++i) {
        if (!aborted.load(std::memory_order_acquire)) {
            try {
                run_sample(samples[static_cast<std::size_t>(i)], cfg, gateway,
                           prompts, tokenizer);
            } catch (...) {
#pragma omp critical(cotprune_systemic)
                {
                    if (!systemic) systemic = std::current_exception();
                }
                aborted.store(true, std::memory_order_release);
            }
        }
#pragma omp ordered
        {
            // Completed samples keep draining in input order until the
            // abort point; everything after is left for a resume.
            if (on_done && !aborted.load(std::memory_order_acquire)) {
                on_done(samples[static_cast<std::size_t>(i)]);
            }
        }
    }
    if (systemic) std::rethrow_exception(systemic);
#else
    run_corpus_serial(samples, cfg, gateway, prompts, tokenizer, on_done);
#endif
}

ValidationReport validate_corpus(const std::vector<Sample>& samples,
                                 double tau, std::size_t budget,
                                 const Tokenizer& tokenizer, int threads) {
    ValidationReport report;
    report.samples_checked = samples.size();
    std::vector<std::vector<std::string>> per_sample(samples.size());

    long n = static_cast<long>(samples.size());
#ifdef _OPENMP
    int nthreads = threads > 0 ? threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 4) num_threads(nthreads)
#else
    (void)threads;
#endif
    for (long i = 0; i < n; ++i) {
        const Sample& s = samples[static_cast<std::size_t>(i)];
        std::vector<std::string>& out = per_sample[static_cast<std::size_t>(i)];
        for (std::string& v : sample_invariant_violations(s)) {
            out.push_back(std::move(v));
        }
        if (s.status != Status::stage2_ok) continue;

        StepSequence origin = split_steps(s.cot_original);
        StepSequence coarse = split_steps(*s.cot_coarse);
        StepSequence final_steps = split_steps(*s.cot_final);

        if (!ordered_subsequence(final_steps, coarse)) {
            out.push_back(
                "final steps are not an ordered subsequence of coarse steps");
        }
        if (!pattern_match(origin, coarse, tau).valid) {
            out.push_back("coarse CoT no longer pattern-matches the original");
        }
        std::size_t count = tokenizer.count(*s.cot_final);
        if (count > budget && !s.has_flag(kFlagBudgetViolation)) {
            out.push_back("final CoT exceeds the budget without a flag (" +
                          std::to_string(count) + " > " +
                          std::to_string(budget) + ")");
        }
        if (!s.surprisal_trace.empty()) {
            std::size_t kept = 0;
            for (const StepScoreTrace& t : s.surprisal_trace) {
                if (t.kept) ++kept;
            }
            if (kept != final_steps.size()) {
                out.push_back("surprisal_trace kept count disagrees with "
                              "final step count");
            }
        }
    }

    for (std::size_t i = 0; i < per_sample.size(); ++i) {
        for (std::string& msg : per_sample[i]) {
            report.violations.emplace_back(samples[i].id, std::move(msg));
        }
    }
    return report;
}

} // namespace cotprune
