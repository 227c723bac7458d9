#ifndef PHASEALIGN_NETWORK_HPP
#define PHASEALIGN_NETWORK_HPP

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "phasealign/common.hpp"
#include "phasealign/rng.hpp"

namespace phasealign {

/// Flat-fading channel snapshot: per-transmitter amplitude a_i and phase phi_i.
/// Immutable for the lifetime of a trial.
struct ChannelRealization {
    std::vector<double> amplitudes;
    std::vector<double> phases;

    std::size_t size() const { return amplitudes.size(); }

    double amplitude_sum() const {
        double s = 0.0;
        for (double a : amplitudes) s += a;
        return s;
    }
};

/// Per-transmitter beamforming phase psi_i. Unit gain on every branch.
struct BeamformerState {
    std::vector<double> psi;

    static BeamformerState zeros(std::size_t n) { return BeamformerState{std::vector<double>(n, 0.0)}; }
};

struct SystemConfig {
    std::size_t n_transmitters = 500;
    double symbol_amplitude = 1.0; // sqrt(P)
    double noise_variance = 0.0;   // housed for forward compatibility; RSS oracle ignores it
};

namespace detail {
inline void check_lengths(const ChannelRealization& ch, const BeamformerState& st) {
    if (ch.amplitudes.size() != ch.phases.size())
        throw std::invalid_argument("channel amplitudes/phases length mismatch");
    if (ch.size() != st.psi.size())
        throw std::invalid_argument("channel/beamformer length mismatch");
}
} // namespace detail

/// Draw n i.i.d. unit-variance complex Gaussian channel coefficients and
/// return them in polar form. Re and Im are i.i.d. N(0, 1/2), so the
/// amplitude is Rayleigh with E[a^2] = 1 and the phase uniform on [-pi, pi).
/// One normal_pair() per transmitter, in index order.
inline ChannelRealization sample_rayleigh_channel(std::size_t n, Rng& rng) {
    if (n == 0) throw std::invalid_argument("sample_rayleigh_channel: n must be >= 1");
    ChannelRealization ch;
    ch.amplitudes.reserve(n);
    ch.phases.reserve(n);
    constexpr double inv_sqrt2 = 0.70710678118654752440;
    for (std::size_t i = 0; i < n; ++i) {
        auto [z0, z1] = rng.normal_pair();
        const double re = z0 * inv_sqrt2;
        const double im = z1 * inv_sqrt2;
        ch.amplitudes.push_back(std::hypot(re, im));
        double phi = std::atan2(im, re);
        if (phi >= pi) phi = -pi;
        ch.phases.push_back(phi);
    }
    return ch;
}

/// Elementwise total phase theta_i = phi_i + psi_i.
inline std::vector<double> total_phases(const ChannelRealization& ch, const BeamformerState& st) {
    detail::check_lengths(ch, st);
    std::vector<double> theta(ch.size());
    for (std::size_t i = 0; i < ch.size(); ++i) theta[i] = ch.phases[i] + st.psi[i];
    return theta;
}

/// Coherent sum of all transmitter phasors, sum_i a_i exp(j theta_i).
inline std::complex<double> composite_phasor(const ChannelRealization& ch, const BeamformerState& st) {
    detail::check_lengths(ch, st);
    std::complex<double> sum{0.0, 0.0};
    for (std::size_t i = 0; i < ch.size(); ++i)
        sum += std::polar(ch.amplitudes[i], ch.phases[i] + st.psi[i]);
    return sum;
}

/// Received signal strength sqrt(P) * |sum_i a_i exp(j theta_i)|.
inline double rss(const ChannelRealization& ch, const BeamformerState& st, const SystemConfig& cfg) {
    if (cfg.n_transmitters != ch.size())
        throw std::invalid_argument("rss: config.n_transmitters does not match channel size");
    return cfg.symbol_amplitude * std::abs(composite_phasor(ch, st));
}

/// Upper bound sqrt(P) * sum_i a_i, attained exactly at full phase alignment.
inline double aligned_rss_bound(const ChannelRealization& ch, const SystemConfig& cfg) {
    return cfg.symbol_amplitude * ch.amplitude_sum();
}

/// RSS divided by its aligned maximum; in [0, 1] up to rounding.
inline double normalized_rss(const ChannelRealization& ch, const BeamformerState& st, const SystemConfig& cfg) {
    const double bound = aligned_rss_bound(ch, cfg);
    if (bound <= 0.0)
        throw degenerate_channel_error("normalized_rss: all channel amplitudes are zero");
    return rss(ch, st, cfg) / bound;
}

} // namespace phasealign

#endif
