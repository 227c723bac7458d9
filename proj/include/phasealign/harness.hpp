#ifndef PHASEALIGN_HARNESS_HPP
#define PHASEALIGN_HARNESS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "phasealign/common.hpp"
#include "phasealign/ddsa.hpp"
#include "phasealign/network.hpp"
#include "phasealign/onebit.hpp"
#include "phasealign/rng.hpp"

namespace phasealign {

enum class Algorithm { ddsa, onebit };

inline const char* algorithm_name(Algorithm a) { return a == Algorithm::ddsa ? "ddsa" : "onebit"; }

/// Full description of one Monte-Carlo experiment. The experiment output is
/// a pure function of this struct.
struct ExperimentSpec {
    std::size_t n_transmitters = 500;
    double symbol_amplitude = 1.0;
    double noise_variance = 0.0;
    Algorithm algorithm = Algorithm::ddsa;
    int feedback_bits = 3;      // ddsa
    bool exact_feedback = false; // ddsa test mode
    int sweeps = 1;             // ddsa
    double delta_max = pi / 30.0; // one-bit
    int max_slots = 5000;         // one-bit
    double threshold = 0.95;
    bool absolute_threshold = false; // interpret threshold as raw RSS instead of normalized
    int trials = 100;
    std::uint64_t master_seed = 1;

    void validate() const {
        if (n_transmitters < 1) throw config_error("n_transmitters: must be >= 1");
        if (!(symbol_amplitude > 0.0)) throw config_error("symbol_amplitude: must be > 0");
        if (!(noise_variance >= 0.0)) throw config_error("noise_variance: must be >= 0");
        if (feedback_bits < 1 || feedback_bits > 24) throw config_error("feedback_bits: must be in [1, 24]");
        if (sweeps < 1) throw config_error("sweeps: must be >= 1");
        if (!(delta_max > 0.0 && delta_max < pi)) throw config_error("delta_max: must be in (0, pi)");
        if (max_slots < 1) throw config_error("max_slots: must be >= 1");
        if (absolute_threshold) {
            if (!(threshold > 0.0)) throw config_error("threshold: must be > 0");
        } else {
            if (!(threshold > 0.0 && threshold <= 1.0)) throw config_error("threshold: must be in (0, 1]");
        }
        if (trials < 1) throw config_error("trials: must be >= 1");
    }

    SystemConfig system_config() const {
        return SystemConfig{n_transmitters, symbol_amplitude, noise_variance};
    }
};

struct SlotRecord {
    int slot = 0;
    double rss = 0.0;
    double normalized_rss = 0.0;
};

struct ConvergenceTrace {
    std::string algorithm;
    int trial_index = 0;
    std::uint64_t seed = 0;
    std::vector<SlotRecord> slots;
};

struct TrialSummary {
    std::optional<int> slots_to_threshold;
    double final_normalized_rss = 0.0;
    int total_slots = 0;
};

/// Smallest slot index whose normalized RSS meets the threshold.
inline std::optional<int> slots_to_threshold(const ConvergenceTrace& trace, double threshold) {
    if (trace.slots.empty()) throw std::invalid_argument("slots_to_threshold: empty trace");
    if (!(threshold > 0.0 && threshold <= 1.0))
        throw std::invalid_argument("slots_to_threshold: threshold must be in (0, 1]");
    for (const auto& rec : trace.slots)
        if (rec.normalized_rss >= threshold) return rec.slot;
    return std::nullopt;
}

/// The channel draw for one trial. Depends only on the seed and
/// n_transmitters, so paired experiments that differ only in the algorithm
/// see identical channels.
inline ChannelRealization trial_channel(const ExperimentSpec& spec, Rng& rng) {
    return sample_rayleigh_channel(spec.n_transmitters, rng);
}

/// Run a single trial. Seeds are derived as trial_seed(master_seed,
/// trial_index); the channel draw consumes the stream first, then the
/// strategy (DDSA consumes no randomness).
inline std::pair<ConvergenceTrace, TrialSummary> run_trial(const ExperimentSpec& spec, int trial_index) {
    spec.validate();
    const std::uint64_t seed = trial_seed(spec.master_seed, static_cast<std::uint64_t>(trial_index));
    Rng rng(seed);
    const SystemConfig cfg = spec.system_config();
    const ChannelRealization ch = trial_channel(spec, rng);
    BeamformerState st = BeamformerState::zeros(spec.n_transmitters);
    const double bound = aligned_rss_bound(ch, cfg);
    if (bound <= 0.0) throw degenerate_channel_error("run_trial: all channel amplitudes are zero");

    ConvergenceTrace trace;
    trace.algorithm = algorithm_name(spec.algorithm);
    trace.trial_index = trial_index;
    trace.seed = seed;

    if (spec.algorithm == Algorithm::ddsa) {
        const QuantizerConfig quantizer = QuantizerConfig::make(spec.feedback_bits);
        const FeedbackMode mode = spec.exact_feedback ? FeedbackMode::exact : FeedbackMode::quantized;
        double committed = rss(ch, st, cfg);
        trace.slots.push_back({0, committed, committed / bound});
        int slot = 1;
        for (int sweep = 0; sweep < spec.sweeps; ++sweep) {
            const auto logs = run_ddsa_sweep(ch, st, cfg, quantizer, mode);
            for (const auto& log : logs) {
                // two new slots per round; the adjustment lands on the second
                trace.slots.push_back({slot++, committed, committed / bound});
                committed = log.rss_after;
                trace.slots.push_back({slot++, committed, committed / bound});
            }
        }
    } else {
        OneBitConfig onebit{spec.delta_max, spec.max_slots};
        const double stop = spec.absolute_threshold ? spec.threshold / bound : spec.threshold;
        const auto best = run_onebit(ch, st, cfg, onebit, rng, stop);
        for (std::size_t k = 0; k < best.size(); ++k)
            trace.slots.push_back({static_cast<int>(k), best[k], best[k] / bound});
    }

    TrialSummary summary;
    summary.total_slots = static_cast<int>(trace.slots.size());
    summary.final_normalized_rss = trace.slots.back().normalized_rss;
    const double norm_threshold = spec.absolute_threshold ? spec.threshold / bound : spec.threshold;
    if (norm_threshold > 0.0 && norm_threshold <= 1.0)
        summary.slots_to_threshold = slots_to_threshold(trace, norm_threshold);
    else
        summary.slots_to_threshold = std::nullopt;
    return {std::move(trace), summary};
}

struct Aggregate {
    int trials = 0;
    double fraction_reached = 0.0;
    // slots-to-threshold statistics over reaching trials; NaN when none reached
    double mean_slots = std::numeric_limits<double>::quiet_NaN();
    double median_slots = std::numeric_limits<double>::quiet_NaN();
    double std_slots = std::numeric_limits<double>::quiet_NaN();
    double mean_final = 0.0;
    double median_final = 0.0;
    double std_final = 0.0;
};

namespace detail {
inline double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}
inline double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}
inline double std_of(const std::vector<double>& v, double mean) {
    double s = 0.0;
    for (double x : v) s += (x - mean) * (x - mean);
    return std::sqrt(s / static_cast<double>(v.size()));
}
} // namespace detail

inline Aggregate aggregate_summaries(const std::vector<TrialSummary>& summaries) {
    Aggregate agg;
    agg.trials = static_cast<int>(summaries.size());
    std::vector<double> finals, slots;
    for (const auto& s : summaries) {
        finals.push_back(s.final_normalized_rss);
        if (s.slots_to_threshold) slots.push_back(static_cast<double>(*s.slots_to_threshold));
    }
    if (!summaries.empty()) {
        agg.fraction_reached = static_cast<double>(slots.size()) / static_cast<double>(summaries.size());
        agg.mean_final = detail::mean_of(finals);
        agg.median_final = detail::median_of(finals);
        agg.std_final = detail::std_of(finals, agg.mean_final);
    }
    if (!slots.empty()) {
        agg.mean_slots = detail::mean_of(slots);
        agg.median_slots = detail::median_of(slots);
        agg.std_slots = detail::std_of(slots, agg.mean_slots);
    }
    return agg;
}

struct ExperimentResult {
    std::vector<ConvergenceTrace> traces; ///< empty when keep_traces = false
    std::vector<TrialSummary> summaries;
    Aggregate aggregate;
    std::vector<std::string> errors; ///< per-trial failures, "trial N: message"
};

/// Run every trial in index order and aggregate. Per-trial failures are
/// collected rather than aborting the remaining trials.
inline ExperimentResult run_experiment(const ExperimentSpec& spec, bool keep_traces = true) {
    spec.validate();
    ExperimentResult result;
    for (int t = 0; t < spec.trials; ++t) {
        try {
            auto [trace, summary] = run_trial(spec, t);
            result.summaries.push_back(summary);
            if (keep_traces) result.traces.push_back(std::move(trace));
        } catch (const std::exception& e) {
            result.errors.push_back("trial " + std::to_string(t) + ": " + e.what());
        }
    }
    result.aggregate = aggregate_summaries(result.summaries);
    return result;
}

} // namespace phasealign

#endif
