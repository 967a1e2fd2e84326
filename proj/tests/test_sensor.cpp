#include "support.hpp"

#include <wfsim/errors.hpp>
#include <wfsim/sensor.hpp>

#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>

using namespace wfsim;
using testing::Gen;
using testing::rel_err;

namespace {

constexpr double pi = std::numbers::pi;
constexpr double inf = std::numeric_limits<double>::infinity();

// The 100 nT, 2.4 μs test tone of the single-point experiments.
Waveform tone()
{
    return Waveform::parametric(2.4e-6, {{100e-9, 1, 0.0}});
}

Waveform constant(double T, double b0)
{
    return Waveform::tabulated(T, {{0.0, b0}, {T, b0}});
}

Waveform zero(double T)
{
    return Waveform::parametric(T, {{0.0, 1, 0.0}});
}

ProtocolConfig config(Protocol kind, int k, double t_s = 300e-9, double T = 2.4e-6, double t_i = 450e-9)
{
    return ProtocolConfig{kind, k, t_s, T, t_i};
}

} // namespace

TEST_CASE("sensor defaults and validation")
{
    SensorParams p;
    CHECK(p.gamma_e == doctest::Approx(2 * pi * 28.024e9));
    CHECK(p.T2_star == 5.2e-6);
    CHECK(p.T2 == 0.66e-3);
    CHECK(p.contrast == 0.25);
    CHECK(p.rabi_freq == 10e6);
    CHECK(p.t_pi == 50e-9);
    CHECK(p.photon_rate_bright == 50e3);
    CHECK(p.snr_ref == 50.0);
    CHECK_NOTHROW(p.validate());
    CHECK(p.warnings().empty());

    auto bad = p;
    bad.contrast = 1.5;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = p;
    bad.T2 = -1.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad = p;
    bad.gamma_e = 0.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

    auto slow = p;
    slow.t_pi = 100e-9; // t_π·Ω = 1, not ½
    CHECK_NOTHROW(slow.validate());
    CHECK(slow.warnings().size() == 1);

    const auto free = p.without_decoherence();
    CHECK(free.T2 == inf);
    CHECK(free.T2_star == inf);
    CHECK_NOTHROW(free.validate());
}

TEST_CASE("protocol names round-trip")
{
    for (auto kind : {Protocol::RamseySQL, Protocol::TDQD, Protocol::PddTDQD})
        CHECK(parse_protocol(to_string(kind)) == kind);
    CHECK(parse_protocol("ramsey") == Protocol::RamseySQL);
    CHECK_THROWS_AS(parse_protocol("cpmg"), std::invalid_argument);
}

TEST_CASE("protocol config: resources and window checks")
{
    SensorParams p;
    CHECK(config(Protocol::TDQD, 7).resources() == 14);
    CHECK(config(Protocol::PddTDQD, 15).resources() == 30);
    CHECK(config(Protocol::RamseySQL, 5).resources() == 5);
    CHECK_NOTHROW(config(Protocol::PddTDQD, 15).validate(p));
    CHECK_THROWS_AS(config(Protocol::PddTDQD, 0).validate(p), std::invalid_argument);
    CHECK_THROWS_AS(config(Protocol::PddTDQD, 1, 300e-9, 2.4e-6, 2.2e-6).validate(p), std::invalid_argument);
    CHECK_THROWS_AS(config(Protocol::PddTDQD, 1, 2.35e-6, 2.4e-6, 0.0).validate(p), std::invalid_argument);
}

TEST_CASE("phase_exact worked examples")
{
    SensorParams p;
    CHECK(phase_exact(zero(2.4e-6), p, 450e-9, 300e-9) == 0.0);

    const double b0 = 37e-9;
    CHECK(rel_err(phase_exact(constant(2.4e-6, b0), p, 450e-9, 300e-9), -2 * p.gamma_e * b0 * 300e-9) < 1e-13);

    const double want = -2 * p.gamma_e *
                        testing::quad([](double t) { return 100e-9 * std::sin(2 * pi * t / 2.4e-6); }, 450e-9, 750e-9);
    CHECK(rel_err(phase_exact(tone(), p, 450e-9, 300e-9), want) < 1e-10);

    CHECK_THROWS_AS(phase_exact(tone(), p, 2.2e-6, 300e-9), std::invalid_argument);
    CHECK_THROWS_AS(phase_exact(tone(), p, -1e-9, 300e-9), std::invalid_argument);
}

TEST_CASE("phase_approx worked examples")
{
    SensorParams p;
    CHECK(phase_approx(zero(2.4e-6), p, 450e-9, 300e-9) == 0.0);
    const auto c = constant(2.4e-6, -12e-9);
    CHECK(rel_err(phase_approx(c, p, 450e-9, 300e-9), phase_exact(c, p, 450e-9, 300e-9)) < 1e-13);
    CHECK(phase_approx(tone(), p, 450e-9, 300e-9) ==
          doctest::Approx(-2 * p.gamma_e * 100e-9 * std::sin(2 * pi * 450e-9 / 2.4e-6) * 300e-9).epsilon(1e-13));
    CHECK_THROWS_AS(phase_approx(tone(), p, 2.3e-6, 300e-9), std::invalid_argument);
}

TEST_CASE("phase_approx error shrinks quadratically once t_s is small")
{
    // At t_i = 450 ns the b'' term dominates only below about T/256, so the
    // local order is checked on the next halvings.
    SensorParams p;
    const auto w = tone();
    const double T = w.period();
    auto err = [&](double ts) { return std::abs(phase_approx(w, p, 450e-9, ts) - phase_exact(w, p, 450e-9, ts)); };
    for (int k = 9; k <= 11; ++k) {
        const double ts = T / std::ldexp(1.0, k);
        const double order = std::log2(err(ts) / err(ts / 2));
        CHECK(order == doctest::Approx(2.0).epsilon(0.05));
    }
}

TEST_CASE("phase is linear in field amplitude")
{
    SensorParams p;
    Gen g(21);
    for (int trial = 0; trial < 300; ++trial) {
        const double T = g.uniform(2e-6, 1e-5);
        const auto w = g.parametric(T, 1e-7);
        const double alpha = g.uniform(-10, 10);
        const double ts = g.uniform(10e-9, 0.2 * T);
        const double ti = g.uniform(0.0, T - ts);
        const double base = phase_exact(w, p, ti, ts);
        const double scaled = phase_exact(w.scaled(alpha), p, ti, ts);
        CHECK(std::abs(scaled - alpha * base) <= 1e-12 * std::abs(alpha * base) + 1e-300);
    }
}

TEST_CASE("envelopes: k = 0 and disabled decoherence give 1")
{
    SensorParams p;
    CHECK(envelope_tdqd(p, 0, 300e-9, 2.4e-6) == 1.0);
    CHECK(envelope_pdd(p, 0, 300e-9, 2.4e-6) == 1.0);
    const auto free = p.without_decoherence();
    for (int k = 0; k <= 1000; k += 37) {
        CHECK(envelope_tdqd(free, k, 300e-9, 2.4e-6) == 1.0);
        CHECK(envelope_pdd(free, k, 300e-9, 2.4e-6) == 1.0);
    }
    CHECK(envelope_ramsey(free, 300e-9) == 1.0);
}

TEST_CASE("envelopes: hand-evaluated reference points")
{
    SensorParams p;
    // Values frozen from an independent extended-precision evaluation.
    CHECK(rel_err(envelope_tdqd(p, 8, 300e-9, 2.4e-6), 0.4250892509439242) < 1e-12);
    CHECK(rel_err(envelope_pdd(p, 8, 300e-9, 2.4e-6), 0.9957248669894609) < 1e-12);
    CHECK(rel_err(envelope_pdd(p, 64, 300e-9, 2.4e-6), 0.760183793548526) < 1e-12);
    // Rounded hand values, to their printed precision.
    CHECK(std::abs(envelope_pdd(p, 8, 300e-9, 2.4e-6) - 0.99572) < 5e-6);
    CHECK(std::abs(envelope_pdd(p, 64, 300e-9, 2.4e-6) - 0.76018) < 5e-6);
    CHECK(std::abs(envelope_tdqd(p, 8, 300e-9, 2.4e-6) - 0.42509) < 5e-6);
    CHECK(rel_err(envelope_ramsey(p, 300e-9), std::exp(-std::pow(300e-9 / 5.2e-6, 2))) < 1e-15);
    // PDD does not depend on T2*.
    auto q = p;
    q.T2_star = 1e-9;
    CHECK(envelope_pdd(q, 8, 300e-9, 2.4e-6) == envelope_pdd(p, 8, 300e-9, 2.4e-6));
    CHECK_THROWS_AS(envelope_tdqd(p, -1, 300e-9, 2.4e-6), std::invalid_argument);
}

TEST_CASE("envelopes are non-increasing in k and PDD beats TDQD at defaults")
{
    SensorParams p;
    for (int k = 1; k <= 128; ++k) {
        const double tdqd = envelope_tdqd(p, k, 300e-9, 2.4e-6);
        const double pdd = envelope_pdd(p, k, 300e-9, 2.4e-6);
        CHECK(tdqd <= envelope_tdqd(p, k - 1, 300e-9, 2.4e-6));
        CHECK(pdd <= envelope_pdd(p, k - 1, 300e-9, 2.4e-6));
        CHECK(pdd > tdqd);
        CHECK(tdqd > 0.0);
        CHECK(pdd <= 1.0);
    }
}

TEST_CASE("signal worked examples")
{
    const auto free = SensorParams{}.without_decoherence();
    for (int k : {1, 4, 15, 64})
        CHECK(signal(zero(2.4e-6), free, config(Protocol::PddTDQD, k), Quadrature::X) == 1.0);

    // Constant field chosen so that the 15-pass phase is exactly 0.5 rad.
    const double b0 = -0.5 / (15 * 2 * free.gamma_e * 300e-9);
    const auto c = config(Protocol::PddTDQD, 15);
    CHECK(accumulated_phase(constant(2.4e-6, b0), free, c) == doctest::Approx(0.5).epsilon(1e-13));
    CHECK(signal(constant(2.4e-6, b0), free, c, Quadrature::X) == doctest::Approx(0.87758256189).epsilon(1e-10));

    // Small phase, TDQD: X ≈ envelope·Φ.
    SensorParams p;
    const auto weak = Waveform::parametric(2.4e-6, {{1e-9, 1, 0.0}});
    const auto ct = config(Protocol::TDQD, 3);
    const double phi = accumulated_phase(weak, p, ct);
    CHECK(std::abs(phi) < 1e-2);
    CHECK(signal(weak, p, ct, Quadrature::X) == doctest::Approx(envelope_tdqd(p, 3, 300e-9, 2.4e-6) * phi).epsilon(1e-4));
}

TEST_CASE("quadrature pair lies on the envelope circle")
{
    SensorParams p;
    Gen g(22);
    for (int trial = 0; trial < 500; ++trial) {
        const auto kind = static_cast<Protocol>(g.integer(0, 2));
        const auto w = g.parametric(2.4e-6, 3e-7);
        const double ts = g.uniform(20e-9, 400e-9);
        const auto c = config(kind, g.integer(1, 80), ts, 2.4e-6, g.uniform(0.0, 2.4e-6 - ts));
        const auto s = signal_pair(w, p, c);
        const double env = protocol_envelope(p, c);
        CHECK(std::abs(s.x * s.x + s.y * s.y - env * env) <= 1e-15);
        CHECK(std::abs(s.x) <= 1.0);
        CHECK(std::abs(s.y) <= 1.0);
        // Noiseless quadratures invert to the accumulated phase (principal branch).
        const double phi = accumulated_phase(w, p, c);
        if (std::abs(phi) < pi && env > 1e-6)
            CHECK(phase_from_quadratures(kind, s) == doctest::Approx(phi).epsilon(1e-9));
    }
}

TEST_CASE("accumulated phase grows exactly linearly with k")
{
    SensorParams p;
    const auto w = tone();
    for (auto kind : {Protocol::TDQD, Protocol::PddTDQD}) {
        const double one = accumulated_phase(w, p, config(kind, 1));
        for (int k = 1; k <= 64; ++k) CHECK(rel_err(accumulated_phase(w, p, config(kind, k)), k * one) < 1e-15);
    }
    // One Ramsey pass carries half the differential phase.
    CHECK(accumulated_phase(w, p, config(Protocol::RamseySQL, 1)) ==
          doctest::Approx(0.5 * phase_exact(w, p, 450e-9, 300e-9)).epsilon(1e-15));
}

TEST_CASE("sensitivity: doubling k halves B_min without decoherence")
{
    const auto free = SensorParams{}.without_decoherence();
    for (auto kind : {Protocol::TDQD, Protocol::PddTDQD}) {
        for (int k : {1, 3, 10, 50}) {
            const auto a = sensitivity(free, config(kind, k));
            const auto b = sensitivity(free, config(kind, 2 * k));
            CHECK(rel_err(b.b_min, 0.5 * a.b_min) < 1e-12);
            // With no dead time the cycle doubles too, so η improves by √2.
            CHECK(rel_err(b.eta, a.eta / std::sqrt(2.0)) < 1e-12);
            CHECK(rel_err(a.t_cycle, 2 * k * (2.4e-6 + 300e-9)) < 1e-14);
        }
    }
}

TEST_CASE("sensitivity: interior optimum near k = 64 for PDD")
{
    SensorParams p;
    int best_k = 0;
    double best = inf;
    std::vector<double> eta;
    for (int k = 1; k <= 256; ++k) {
        eta.push_back(sensitivity(p, config(Protocol::PddTDQD, k)).eta);
        if (eta.back() < best) {
            best = eta.back();
            best_k = k;
        }
    }
    CHECK(best_k > 1);
    CHECK(best_k < 256);
    CHECK(best_k >= 32);
    CHECK(best_k <= 128);
    // Unimodal: strictly better before the optimum, strictly worse after.
    for (int k = 1; k < best_k; ++k) CHECK(eta[k - 1] > eta[k]);
    for (int k = best_k; k < 256; ++k) CHECK(eta[k] > eta[k - 1]);
}

TEST_CASE("sensitivity: optimum ratio matches the continuous Gaussian-envelope optimum")
{
    // η ∝ exp((k/a)²)/√k is minimized at k = a/2, so η_TDQD*/η_PDD* = √(a_PDD/a_TDQD).
    SensorParams p;
    const double ts = 300e-9;
    const double T = 2.4e-6;
    const double a_tdqd = 1.0 / (2.0 * std::hypot(ts / p.T2_star, T / p.T2));
    const double a_pdd = p.T2 / (2.0 * (T + ts));
    auto best = [&](Protocol kind) {
        double out = inf;
        for (int k = 1; k <= 512; ++k) out = std::min(out, sensitivity(p, config(kind, k)).eta);
        return out;
    };
    const double ratio = best(Protocol::TDQD) / best(Protocol::PddTDQD);
    CHECK(ratio == doctest::Approx(std::sqrt(a_pdd / a_tdqd)).epsilon(0.01));
    CHECK(ratio > 1.0);
}

TEST_CASE("sensitivity: envelope underflow is flagged")
{
    SensorParams p;
    const auto s = sensitivity(p, config(Protocol::TDQD, 5000));
    CHECK_FALSE(s.finite);
    CHECK(s.eta == inf);
    CHECK(sensitivity(p, config(Protocol::RamseySQL, 1)).finite);
    CHECK_THROWS_AS(sensitivity(p, config(Protocol::TDQD, 0)), std::invalid_argument);
}

TEST_CASE("photon budget reproduces the reference SNR")
{
    SensorParams p;
    const double nb = photons_per_shot(p, 2e6);
    CHECK(nb == doctest::Approx(0.02).epsilon(1e-12));
    CHECK(p.contrast * std::sqrt(nb * 2e6) == doctest::Approx(50.0).epsilon(1e-12));
}
