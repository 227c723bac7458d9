#include <doctest.h>

#include <cmath>

#include "phasealign/ddsa.hpp"
#include "phasealign/rng.hpp"
#include "test_util.hpp"

using namespace phasealign;

namespace {
SystemConfig cfg_for(const ChannelRealization& ch, double sqrt_p = 1.0) {
    return SystemConfig{ch.size(), sqrt_p, 0.0};
}
} // namespace

TEST_CASE("quantizer codebook") {
    const auto q3 = QuantizerConfig::make(3);
    REQUIRE(q3.levels.size() == 8);
    const double expected[] = {0, pi / 4, pi / 2, 3 * pi / 4, pi, 5 * pi / 4, 3 * pi / 2, 7 * pi / 4};
    for (int i = 0; i < 8; ++i) CHECK(q3.levels[i] == doctest::Approx(expected[i]).epsilon(1e-15));
    CHECK(q3.levels[0] == 0.0);

    const auto q1 = QuantizerConfig::make(1);
    REQUIRE(q1.levels.size() == 2);
    CHECK(q1.levels[1] == doctest::Approx(pi));

    CHECK_THROWS_AS(QuantizerConfig::make(0), std::invalid_argument);
}

TEST_CASE("probe_round") {
    SUBCASE("two aligned transmitters") {
        ChannelRealization ch{{1.0, 1.0}, {0.0, 0.0}};
        auto st = BeamformerState::zeros(2);
        const auto p = probe_round(ch, st, cfg_for(ch), 1);
        CHECK(p.m[0] == doctest::Approx(2.0).epsilon(1e-14));
        CHECK(p.m[1] == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(p.m[2] == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("lone transmitter is offset-invariant") {
        ChannelRealization ch{{1.0}, {0.9}};
        auto st = BeamformerState::zeros(1);
        const auto p = probe_round(ch, st, cfg_for(ch), 0);
        CHECK(p.m[0] == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(p.m[1] == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(p.m[2] == doctest::Approx(1.0).epsilon(1e-14));
    }
    SUBCASE("M_0 equals the unprobed RSS, state untouched") {
        Rng rng(5);
        auto ch = sample_rayleigh_channel(16, rng);
        BeamformerState st = BeamformerState::zeros(16);
        st.psi[3] = 0.4;
        const auto before = st.psi;
        const auto p = probe_round(ch, st, cfg_for(ch), 7);
        CHECK(p.m[0] == rss(ch, st, cfg_for(ch)));
        CHECK(st.psi == before);
    }
    SUBCASE("index out of range") {
        ChannelRealization ch{{1.0}, {0.0}};
        auto st = BeamformerState::zeros(1);
        CHECK_THROWS_AS(probe_round(ch, st, cfg_for(ch), 1), std::invalid_argument);
    }
}

TEST_CASE("solve_differential closed-form cases") {
    SUBCASE("known triple (sqrt7, 1, sqrt7)") {
        const auto est = solve_differential(ProbeTriple{{std::sqrt(7.0), 1.0, std::sqrt(7.0)}});
        REQUIRE_FALSE(est.degenerate);
        CHECK(est.r_mag == doctest::Approx(2.0).epsilon(1e-12));
        CHECK(est.c_mag == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(est.beta == doctest::Approx(pi / 3).epsilon(1e-12));
    }
    SUBCASE("symmetric probes force beta = 0") {
        // R = 2, C = 1: M0 = R + C, M1 = M2 = sqrt(R^2 + C^2 - RC)
        const double m = std::sqrt(3.0);
        const auto est = solve_differential(ProbeTriple{{3.0, m, m}});
        REQUIRE_FALSE(est.degenerate);
        CHECK(est.beta == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(est.r_mag == doctest::Approx(2.0).epsilon(1e-12));
        CHECK(est.c_mag == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("offset-invariant probes are degenerate") {
        const auto est = solve_differential(ProbeTriple{{1.5, 1.5, 1.5}});
        CHECK(est.degenerate);
        CHECK(est.c_mag == 0.0);
        CHECK(est.r_mag == doctest::Approx(1.5).epsilon(1e-12));
    }
    SUBCASE("inconsistent probes raise numeric_error") {
        CHECK_THROWS_AS(solve_differential(ProbeTriple{{std::sqrt(10.0), 0.0, 0.0}}), numeric_error);
    }
    SUBCASE("non-finite probes are rejected") {
        CHECK_THROWS_AS(solve_differential(ProbeTriple{{1.0, -0.5, 1.0}}), std::invalid_argument);
    }
}

TEST_CASE("solver round-trip recovers (R, C, beta)") {
    Rng rng(31337);
    for (int iter = 0; iter < 2000; ++iter) {
        const double r = rng.uniform(0.1, 10.0);
        const double c = rng.uniform(0.1, 10.0);
        const double beta = rng.uniform(-pi, pi);
        const auto probes = testutil::synth_probes(r, c, beta);
        const auto est = solve_differential(probes);
        REQUIRE_FALSE(est.degenerate);

        CHECK(testutil::angle_diff(est.beta, beta) <= 1e-9);
        const double hi = std::max(r, c), lo = std::min(r, c);
        CHECK(std::abs(est.r_mag - hi) <= 1e-9 * hi);
        CHECK(std::abs(est.c_mag - lo) <= 1e-9 * std::max(lo, 1e-3));
        CHECK(est.r_mag >= est.c_mag);

        // probe energy identity: sum M_j^2 = 3 (R^2 + C^2)
        const double sum_sq = probes.m[0] * probes.m[0] + probes.m[1] * probes.m[1] +
                              probes.m[2] * probes.m[2];
        CHECK(sum_sq == doctest::Approx(3.0 * (r * r + c * c)).epsilon(1e-12));

        // substitute the estimate back into all three equations
        for (int j = 0; j < 3; ++j) {
            const double predicted = est.r_mag * est.r_mag + est.c_mag * est.c_mag +
                                     2.0 * est.r_mag * est.c_mag *
                                         std::cos(est.beta + two_pi * j / 3.0);
            const double measured = probes.m[j] * probes.m[j];
            CHECK(std::abs(predicted - measured) <= 1e-9 * std::max(1.0, measured));
        }
    }
}

TEST_CASE("select_feedback") {
    const auto q3 = QuantizerConfig::make(3);
    SUBCASE("nearest level wins") {
        DifferentialEstimate est{2.0, 1.0, pi / 3, false};
        CHECK(select_feedback(est, q3).level_index == 1);
    }
    SUBCASE("exact level") {
        DifferentialEstimate est{2.0, 1.0, 0.0, false};
        CHECK(select_feedback(est, q3).level_index == 0);
    }
    SUBCASE("tie at -pi/8 breaks to index 0") {
        DifferentialEstimate est{2.0, 1.0, -pi / 8, false};
        CHECK(select_feedback(est, q3).level_index == 0);
    }
    SUBCASE("degenerate estimate gets the no-op level") {
        DifferentialEstimate est{1.0, 0.0, 0.0, true};
        CHECK(select_feedback(est, q3).level_index == 0);
    }
    SUBCASE("wraps around the circle") {
        DifferentialEstimate est{2.0, 1.0, -pi / 4, false};
        CHECK(select_feedback(est, q3).level_index == 7); // 7*pi/4 == -pi/4 mod 2*pi
    }
}

TEST_CASE("apply_feedback") {
    const auto q3 = QuantizerConfig::make(3);
    BeamformerState st{{1.0, 2.0}};
    apply_feedback(st, 0, FeedbackMessage{0}, q3);
    CHECK(st.psi[0] == 1.0);
    apply_feedback(st, 0, FeedbackMessage{1}, q3);
    CHECK(st.psi[0] == doctest::Approx(1.0 - pi / 4).epsilon(1e-15));
    CHECK(st.psi[1] == 2.0);
    CHECK_THROWS_AS(apply_feedback(st, 5, FeedbackMessage{0}, q3), std::invalid_argument);
    CHECK_THROWS_AS(apply_feedback(st, 0, FeedbackMessage{8}, q3), std::invalid_argument);
}

TEST_CASE("single quantized round never lowers the RSS") {
    const auto q3 = QuantizerConfig::make(3);
    Rng rng(99);
    for (int iter = 0; iter < 200; ++iter) {
        ChannelRealization ch{{rng.uniform(0.1, 2.0), rng.uniform(0.1, 2.0)},
                              {rng.uniform(-pi, pi), rng.uniform(-pi, pi)}};
        BeamformerState st = BeamformerState::zeros(2);
        const auto cfg = cfg_for(ch);
        const double before = rss(ch, st, cfg);
        const auto probes = probe_round(ch, st, cfg, 0);
        const auto est = solve_differential(probes);
        apply_feedback(st, 0, select_feedback(est, q3), q3);
        CHECK(rss(ch, st, cfg) >= before - 1e-12 * std::max(1.0, before));
    }
}

TEST_CASE("run_ddsa_sweep") {
    const auto q3 = QuantizerConfig::make(3);

    SUBCASE("single transmitter has nothing to align against") {
        ChannelRealization ch{{1.0}, {0.3}};
        auto st = BeamformerState::zeros(1);
        const auto logs = run_ddsa_sweep(ch, st, cfg_for(ch), q3);
        REQUIRE(logs.size() == 1);
        CHECK(logs[0].estimate.degenerate);
        CHECK(logs[0].feedback.level_index == 0);
        CHECK(logs[0].rss_after == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(st.psi[0] == 0.0);
    }

    SUBCASE("exact feedback aligns a two-phasor system in one round") {
        ChannelRealization ch{{1.0, 1.0}, {0.0, pi / 2}};
        auto st = BeamformerState::zeros(2);
        const auto cfg = cfg_for(ch);
        const auto logs = run_ddsa_sweep(ch, st, cfg, q3, FeedbackMode::exact);
        CHECK(normalized_rss(ch, st, cfg) == doctest::Approx(1.0).epsilon(1e-12));
        // already aligned after round 0; round 1 keeps it
        CHECK(logs[0].rss_after == doctest::Approx(2.0).epsilon(1e-12));
    }

    SUBCASE("per-round RSS is non-decreasing, exact and quantized") {
        for (const auto mode : {FeedbackMode::quantized, FeedbackMode::exact}) {
            for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
                Rng rng(seed);
                auto ch = sample_rayleigh_channel(25, rng);
                auto st = BeamformerState::zeros(25);
                const auto cfg = cfg_for(ch);
                double prev = rss(ch, st, cfg);
                for (const auto& log : run_ddsa_sweep(ch, st, cfg, q3, mode)) {
                    CHECK(log.rss_after >= prev);
                    CHECK(log.slots_consumed == 2);
                    prev = log.rss_after;
                }
            }
        }
    }

    SUBCASE("repeated exact sweeps converge to alignment") {
        Rng rng(4242);
        auto ch = sample_rayleigh_channel(12, rng);
        auto st = BeamformerState::zeros(12);
        const auto cfg = cfg_for(ch);
        for (int sweep = 0; sweep < 3; ++sweep) run_ddsa_sweep(ch, st, cfg, q3, FeedbackMode::exact);
        CHECK(normalized_rss(ch, st, cfg) >= 0.999);
    }

    SUBCASE("round sink sees every round") {
        struct Counter : RoundSink {
            int n = 0;
            void on_round(const DdsaRoundLog&) override { ++n; }
        } counter;
        Rng rng(7);
        auto ch = sample_rayleigh_channel(9, rng);
        auto st = BeamformerState::zeros(9);
        const auto logs = run_ddsa_sweep(ch, st, cfg_for(ch), q3, FeedbackMode::quantized, &counter);
        CHECK(counter.n == 9);
        CHECK(logs.size() == 9);
    }
}
