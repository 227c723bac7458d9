#ifndef PHASEALIGN_ONEBIT_HPP
#define PHASEALIGN_ONEBIT_HPP

#include <optional>
#include <vector>

#include "phasealign/common.hpp"
#include "phasealign/network.hpp"
#include "phasealign/rng.hpp"

namespace phasealign {

/// One-bit random-perturbation baseline parameters.
struct OneBitConfig {
    double delta_max = pi / 30.0; ///< perturbation half-width, radians
    int max_slots = 5000;

    void validate() const {
        if (!(delta_max > 0.0 && delta_max < pi))
            throw std::invalid_argument("OneBitConfig: delta_max must be in (0, pi)");
        if (max_slots < 1)
            throw std::invalid_argument("OneBitConfig: max_slots must be >= 1");
    }
};

struct OneBitStepResult {
    double best_rss = 0.0;
    double measured_rss = 0.0;
    bool kept = false;
};

/// One slot of the one-bit scheme: every transmitter draws an independent
/// uniform perturbation on [-delta_max, delta_max], the perturbed RSS is
/// measured, and the single feedback bit says keep (improved over best so
/// far) or revert. Reverts restore the state bitwise. Exactly one uniform
/// draw per transmitter regardless of outcome.
inline OneBitStepResult onebit_step(const ChannelRealization& ch, BeamformerState& st,
                                    const SystemConfig& cfg, const OneBitConfig& onebit,
                                    double best_rss, Rng& rng) {
    detail::check_lengths(ch, st);
    const std::vector<double> saved = st.psi;
    for (double& psi : st.psi)
        psi += rng.uniform(-onebit.delta_max, onebit.delta_max);
    const double measured = rss(ch, st, cfg);

    OneBitStepResult result;
    result.measured_rss = measured;
    if (measured > best_rss) {
        result.best_rss = measured;
        result.kept = true;
    } else {
        st.psi = saved;
        result.best_rss = best_rss;
        result.kept = false;
    }
    return result;
}

/// Run the baseline for up to max_slots slots, or until the normalized
/// best-so-far RSS reaches stop_threshold (when given). Returns the
/// best-so-far RSS after each slot; entry k is the state after slot k.
inline std::vector<double> run_onebit(const ChannelRealization& ch, BeamformerState& st,
                                      const SystemConfig& cfg, const OneBitConfig& onebit, Rng& rng,
                                      std::optional<double> stop_threshold = std::nullopt) {
    onebit.validate();
    const double bound = aligned_rss_bound(ch, cfg);
    if (bound <= 0.0) throw degenerate_channel_error("run_onebit: all channel amplitudes are zero");

    double best = rss(ch, st, cfg);
    std::vector<double> trace;
    trace.reserve(static_cast<std::size_t>(onebit.max_slots));
    for (int slot = 0; slot < onebit.max_slots; ++slot) {
        best = onebit_step(ch, st, cfg, onebit, best, rng).best_rss;
        trace.push_back(best);
        if (stop_threshold && best / bound >= *stop_threshold) break;
    }
    return trace;
}

} // namespace phasealign

#endif
