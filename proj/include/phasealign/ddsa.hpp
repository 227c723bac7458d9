#ifndef PHASEALIGN_DDSA_HPP
#define PHASEALIGN_DDSA_HPP

#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <vector>

#include "phasealign/common.hpp"
#include "phasealign/network.hpp"

namespace phasealign {

/// Probe offset between the three measurements of a round.
inline constexpr double probe_alpha = two_pi / 3.0;

/// Three RSS measurements M_0, M_1, M_2 taken while the probed transmitter
/// offsets its phase by 0, alpha, 2*alpha.
struct ProbeTriple {
    std::array<double, 3> m{};
};

/// Closed-form recovery from one probe triple: magnitude of the
/// rest-of-network phasor (r_mag), magnitude of the probed transmitter's
/// phasor (c_mag), and the angle beta between them.
///
/// The two magnitudes enter the probe equations symmetrically, so only the
/// unordered pair is identifiable; we adopt r_mag >= c_mag. When the probes
/// carry no angular information (2*r_mag*c_mag below tolerance) `degenerate`
/// is set and beta is reported as 0.
struct DifferentialEstimate {
    double r_mag = 0.0;
    double c_mag = 0.0;
    double beta = 0.0;
    bool degenerate = false;
};

/// Uniform K-bit phase codebook {2*pi*m / 2^K : m = 0..2^K-1}.
struct QuantizerConfig {
    int bits = 3;
    std::vector<double> levels;

    static QuantizerConfig make(int bits) {
        if (bits < 1 || bits > 24)
            throw std::invalid_argument("QuantizerConfig: bits must be in [1, 24]");
        QuantizerConfig q;
        q.bits = bits;
        const std::size_t n = std::size_t{1} << bits;
        q.levels.reserve(n);
        for (std::size_t m = 0; m < n; ++m)
            q.levels.push_back(two_pi * static_cast<double>(m) / static_cast<double>(n));
        return q;
    }
};

/// Index of the codebook level the probed transmitter must subtract.
struct FeedbackMessage {
    std::uint32_t level_index = 0;
};

/// Record of one completed round.
struct DdsaRoundLog {
    std::size_t transmitter_index = 0;
    ProbeTriple probes;
    DifferentialEstimate estimate;
    FeedbackMessage feedback;
    double rss_after = 0.0;
    int slots_consumed = 2;
};

struct RoundSink {
    virtual void on_round(const DdsaRoundLog& log) = 0;
    virtual ~RoundSink() = default;
};

enum class FeedbackMode {
    quantized, ///< feed back a K-bit level index
    exact      ///< feed back beta itself (test mode, isolates quantization loss)
};

/// Measure the three-offset probe triple for transmitter i. All transmitters
/// stay on air; only transmitter i's phase is offset, and the state is left
/// untouched (the probe is evaluated without mutating it).
inline ProbeTriple probe_round(const ChannelRealization& ch, const BeamformerState& st,
                               const SystemConfig& cfg, std::size_t i) {
    if (cfg.n_transmitters != ch.size())
        throw std::invalid_argument("probe_round: config.n_transmitters does not match channel size");
    detail::check_lengths(ch, st);
    if (i >= ch.size()) throw std::invalid_argument("probe_round: transmitter index out of range");

    const std::complex<double> sum = composite_phasor(ch, st);
    const std::complex<double> ci = std::polar(ch.amplitudes[i], ch.phases[i] + st.psi[i]);
    const std::complex<double> rest = sum - ci;

    ProbeTriple p;
    p.m[0] = cfg.symbol_amplitude * std::abs(sum);
    p.m[1] = cfg.symbol_amplitude * std::abs(rest + ci * std::polar(1.0, probe_alpha));
    p.m[2] = cfg.symbol_amplitude * std::abs(rest + ci * std::polar(1.0, 2.0 * probe_alpha));
    return p;
}

/// Invert M_j^2 = R^2 + C^2 + 2RC cos(beta + 2*pi*j/3), j = 0, 1, 2.
///
/// The 120-degree spacing gives the closed form
///   S = (M0^2 + M1^2 + M2^2) / 3          = R^2 + C^2
///   u = (2 M0^2 - M1^2 - M2^2) / 3        = 2RC cos(beta)
///   v = (M2^2 - M1^2) / sqrt(3)           = 2RC sin(beta)
/// from which beta = atan2(v, u) and {R, C} are the roots of
/// x^4 - S x^2 + (RC)^2 = 0 with R >= C.
inline DifferentialEstimate solve_differential(const ProbeTriple& probes) {
    for (double m : probes.m) {
        if (!(std::isfinite(m) && m >= 0.0))
            throw std::invalid_argument("solve_differential: probes must be finite and nonnegative");
    }
    const double m0 = probes.m[0] * probes.m[0];
    const double m1 = probes.m[1] * probes.m[1];
    const double m2 = probes.m[2] * probes.m[2];

    const double s = (m0 + m1 + m2) / 3.0;
    const double u = (2.0 * m0 - m1 - m2) / 3.0;
    const double v = (m2 - m1) / std::sqrt(3.0);
    const double two_rc = std::hypot(u, v);

    const double eps_rc = 1e-12 * std::max(1.0, s);
    if (two_rc <= eps_rc) {
        DifferentialEstimate est;
        est.r_mag = std::sqrt(std::max(s, 0.0));
        est.c_mag = 0.0;
        est.beta = 0.0;
        est.degenerate = true;
        return est;
    }

    double disc = s * s - two_rc * two_rc; // S^2 - 4 (RC)^2
    const double eps_disc = 1e-9 * std::max(1.0, s * s);
    if (disc < -eps_disc)
        throw numeric_error("solve_differential: inconsistent probe triple (negative discriminant)");
    if (disc < 0.0) disc = 0.0;

    const double root = std::sqrt(disc);
    DifferentialEstimate est;
    est.r_mag = std::sqrt((s + root) / 2.0);
    est.c_mag = std::sqrt(std::max((s - root) / 2.0, 0.0));
    est.beta = wrap_angle(std::atan2(v, u));
    return est;
}

/// Pick the codebook level whose subtraction maximizes the predicted RSS
/// R^2 + C^2 + 2RC cos(beta - q), i.e. the level nearest to beta mod 2*pi.
/// Ties (within 1e-12 rad) resolve to the smaller index; degenerate
/// estimates get level 0, which is a no-op.
inline FeedbackMessage select_feedback(const DifferentialEstimate& est, const QuantizerConfig& quantizer) {
    if (est.degenerate) return FeedbackMessage{0};
    std::uint32_t best = 0;
    double best_dist = std::abs(wrap_angle(est.beta - quantizer.levels[0]));
    for (std::uint32_t m = 1; m < quantizer.levels.size(); ++m) {
        const double d = std::abs(wrap_angle(est.beta - quantizer.levels[m]));
        if (d < best_dist - 1e-12) {
            best = m;
            best_dist = d;
        }
    }
    return FeedbackMessage{best};
}

/// Subtract the commanded level from transmitter i's phase.
inline void apply_feedback(BeamformerState& st, std::size_t i, FeedbackMessage feedback,
                           const QuantizerConfig& quantizer) {
    if (i >= st.psi.size()) throw std::invalid_argument("apply_feedback: transmitter index out of range");
    if (feedback.level_index >= quantizer.levels.size())
        throw std::invalid_argument("apply_feedback: feedback level index out of range");
    st.psi[i] -= quantizer.levels[feedback.level_index];
}

/// One full sweep: for each transmitter in index order, probe, solve, select,
/// apply. Slot cost is 2 per round (offsets 1 and 2); the j = 0 measurement
/// is carried over from the previous round's post-adjustment RSS, which the
/// receiver knows in closed form.
inline std::vector<DdsaRoundLog> run_ddsa_sweep(const ChannelRealization& ch, BeamformerState& st,
                                                const SystemConfig& cfg, const QuantizerConfig& quantizer,
                                                FeedbackMode mode = FeedbackMode::quantized,
                                                RoundSink* sink = nullptr) {
    detail::check_lengths(ch, st);
    std::vector<DdsaRoundLog> logs;
    logs.reserve(ch.size());
    for (std::size_t i = 0; i < ch.size(); ++i) {
        DdsaRoundLog log;
        log.transmitter_index = i;
        log.probes = probe_round(ch, st, cfg, i);
        log.estimate = solve_differential(log.probes);
        log.feedback = select_feedback(log.estimate, quantizer);
        if (mode == FeedbackMode::exact && !log.estimate.degenerate) {
            // skip corrections whose predicted gain is below measurement
            // precision; re-evaluating the RSS after a ~1 ulp phase change
            // can otherwise lose the last bit
            const double m0_sq = log.probes.m[0] * log.probes.m[0];
            const double gain = 2.0 * log.estimate.r_mag * log.estimate.c_mag *
                                (1.0 - std::cos(log.estimate.beta));
            if (gain > 1e-12 * std::max(1.0, m0_sq)) st.psi[i] -= log.estimate.beta;
        } else {
            apply_feedback(st, i, log.feedback, quantizer);
        }
        log.rss_after = rss(ch, st, cfg);
        log.slots_consumed = 2;
        if (sink) sink->on_round(log);
        logs.push_back(log);
    }
    return logs;
}

} // namespace phasealign

#endif
