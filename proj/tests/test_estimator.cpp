#include "support.hpp"

#include <wfsim/errors.hpp>
#include <wfsim/estimator.hpp>

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

using namespace wfsim;
using testing::Gen;
using testing::rel_err;

namespace {

constexpr double pi = std::numbers::pi;

PhaseEnsemble make_ensemble(double T, std::size_t n1, std::size_t cols, std::vector<double> values)
{
    PhaseEnsemble e;
    e.scheme = Scheme::SQL;
    e.grid = make_grid(T, n1);
    e.n2 = static_cast<int>(cols);
    e.columns = cols;
    e.t_s = 50e-9;
    e.estimates = std::move(values);
    return e;
}

PhaseEnsemble random_ensemble(Gen& g, double T, double spread)
{
    const auto n1 = static_cast<std::size_t>(g.integer(1, 24));
    const auto cols = static_cast<std::size_t>(g.integer(1, 9));
    std::vector<double> v(n1 * cols);
    for (auto& x : v) x = g.uniform(-spread, spread);
    return make_ensemble(T, n1, cols, std::move(v));
}

Waveform shifted(const Waveform& w, double c)
{
    std::vector<Sample> s(w.samples().begin(), w.samples().end());
    for (auto& x : s) x.value += c;
    return Waveform::tabulated(w.period(), std::move(s));
}

Waveform zero(double T)
{
    return Waveform::parametric(T, {{0.0, 1, 0.0}});
}

} // namespace

TEST_CASE("reconstruct averages rows into a zero-order hold")
{
    const auto e = make_ensemble(1.0, 4, 2, {1, 3, -2, -2, 0.5, 1.5, 10, 0});
    const auto r = reconstruct(e);
    CHECK(r.phi_bar == std::vector<double>{2, -2, 1, 5});
    CHECK(r(0.0) == 2);
    CHECK(r(0.2499) == 2);
    CHECK(r(0.25) == -2);
    CHECK(r(0.6) == 1);
    CHECK(r(0.99) == 5);
    CHECK(r(1.0) == 5);
}

TEST_CASE("phase_truth and phase_to_field are inverse scalings")
{
    SensorParams p;
    const auto b = Waveform::parametric(9.6e-6, {{3e-9, 1, 0.2}, {-1e-9, 3, 0.0}});
    const auto phi = phase_truth(b, p, 50e-9);
    for (double t : {0.0, 1.1e-6, 4.4e-6, 9.6e-6}) {
        CHECK(rel_err(phi.eval(t), -2 * p.gamma_e * 50e-9 * b.eval(t)) < 1e-14);
        CHECK(rel_err(phase_to_field(-phi.eval(t), p, 50e-9), b.eval(t)) < 1e-14);
    }
}

TEST_CASE("decompose_error worked examples")
{
    // Zero truth, one bin, estimates ±0.1: everything is statistical.
    const auto a = decompose_error(make_ensemble(1.0, 1, 2, {0.1, -0.1}), zero(1.0));
    CHECK(a.delta_stat_sq == doctest::Approx(0.01).epsilon(1e-14));
    CHECK(a.delta_det_sq == doctest::Approx(0.0));
    CHECK(a.delta_sq == doctest::Approx(0.01).epsilon(1e-14));
    CHECK(a.delta_sq_direct == doctest::Approx(0.01).epsilon(1e-14));

    // Unit sine truth against a zero estimate: ∫sin² dt/T = 1/2.
    const auto sine = Waveform::parametric(1.0, {{1.0, 1, 0.0}});
    const auto b = decompose_error(make_ensemble(1.0, 1, 1, {0.0}), sine);
    CHECK(b.delta_stat_sq == 0.0);
    CHECK(b.delta_det_sq == doctest::Approx(0.5).epsilon(1e-13));

    // Constant truth reproduced by a noiseless ensemble.
    const auto c = Waveform::tabulated(1.0, {{0.0, 0.3}, {1.0, 0.3}});
    const auto r = decompose_error(make_ensemble(1.0, 5, 3, std::vector<double>(15, 0.3)), c);
    CHECK(r.delta_sq == doctest::Approx(0.0).epsilon(1e-20));
    CHECK(r.per_bin_det.size() == 5);
}

TEST_CASE("decompose_error: statistical + deterministic equals the cell-by-cell error")
{
    Gen g(31);
    for (int trial = 0; trial < 300; ++trial) {
        const double T = g.uniform(1e-6, 1e-5);
        const auto truth = trial % 2 ? g.parametric(T, 0.3) : g.tabulated(T, 0.3);
        const auto e = random_ensemble(g, T, 0.5);
        const auto r = decompose_error(e, truth);
        CHECK(rel_err(r.delta_sq_direct, r.delta_stat_sq + r.delta_det_sq) < 1e-12);
        CHECK(r.delta_sq == r.delta_stat_sq + r.delta_det_sq);
    }
}

TEST_CASE("decompose_error agrees with direct quadrature")
{
    Gen g(32);
    for (int trial = 0; trial < 40; ++trial) {
        const double T = 9.6e-6;
        const auto truth = trial % 2 ? g.parametric(T, 0.2) : g.tabulated(T, 0.2, 8);
        const auto e = random_ensemble(g, T, 0.4);
        double want = 0.0;
        for (std::size_t i = 0; i < e.n1(); ++i) {
            const auto [lo, hi] = e.grid.window(i);
            for (double v : e.row(i)) {
                auto sq = [&](double t) { return (v - truth.eval(t)) * (v - truth.eval(t)); };
                want += testing::quad_tabulated(truth, sq, lo, hi, 1e-11, 6);
            }
        }
        want /= T * static_cast<double>(e.columns);
        CHECK(rel_err(decompose_error(e, truth).delta_sq, want) < 1e-9);
    }
}

TEST_CASE("decompose_error invariances")
{
    Gen g(33);
    for (int trial = 0; trial < 100; ++trial) {
        const double T = 2.4e-6;
        const auto truth = g.tabulated(T, 0.3);
        auto e = random_ensemble(g, T, 0.5);
        const auto base = decompose_error(e, truth);

        // A common offset on estimates and truth changes nothing.
        const double c = g.uniform(-2, 2);
        auto moved = e;
        for (auto& v : moved.estimates) v += c;
        const auto s = decompose_error(moved, shifted(truth, c));
        CHECK(s.delta_stat_sq == doctest::Approx(base.delta_stat_sq).epsilon(1e-9));
        CHECK(s.delta_det_sq == doctest::Approx(base.delta_det_sq).epsilon(1e-9));

        // The statistical part does not see the truth at all.
        CHECK(decompose_error(e, g.parametric(T, 1.0)).delta_stat_sq == base.delta_stat_sq);

        // Reshuffling spread inside a row without moving its mean keeps the deterministic part.
        auto spread = e;
        for (std::size_t i = 0; i < e.n1() && e.columns >= 2; ++i) {
            const double d = g.uniform(-1, 1);
            spread.at(i, 0) += d;
            spread.at(i, 1) -= d;
        }
        CHECK(decompose_error(spread, truth).delta_det_sq == doctest::Approx(base.delta_det_sq).epsilon(1e-12));
    }
}

TEST_CASE("decompose_error rejects a truth with another period")
{
    const auto e = make_ensemble(1.0, 2, 1, {0.0, 0.0});
    CHECK_THROWS_AS(decompose_error(e, zero(2.0)), std::invalid_argument);
    CHECK_NOTHROW(decompose_error(e, zero(1.0)));
}

TEST_CASE("deterministic error curve: constant truth has none")
{
    SensorParams p;
    const auto c = Waveform::tabulated(9.6e-6, {{0.0, 2e-9}, {9.6e-6, 2e-9}});
    const std::vector<std::size_t> n1s{1, 2, 7, 64};
    for (auto [n1, d] : deterministic_error_curve(c, p, n1s, 50e-9)) CHECK(d == doctest::Approx(0.0).epsilon(1e-20));
}

TEST_CASE("deterministic error curve of a smooth tone falls as 1/n1")
{
    // Per-bin error of a centered hold is φ'²h³/12 to leading order, so
    // δ_det → A·2π/(n1·√24) for φ = A·sin(2πt/T).
    SensorParams p;
    const double T = 9.6e-6;
    const double A = 0.5;
    const auto field = Waveform::parametric(T, {{-A / (2 * p.gamma_e * 50e-9), 1, 0.0}});
    std::vector<std::size_t> n1s;
    for (std::size_t n = 4; n <= 1024; n *= 2) n1s.push_back(n);
    const auto curve = deterministic_error_curve(field, p, n1s, 50e-9);

    std::vector<double> x, y;
    for (auto [n1, d] : curve) {
        x.push_back(std::log(double(n1)));
        y.push_back(std::log(d));
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double n = double(x.size());
    CHECK((n * sxy - sx * sy) / (n * sxx - sx * sx) == doctest::Approx(-1.0).epsilon(0.05));

    const double prefactor = A * 2 * pi / std::sqrt(24.0);
    CHECK(curve.back().second * 1024 == doctest::Approx(prefactor).epsilon(1e-3));
}

TEST_CASE("window-mean bins never do worse than center bins")
{
    SensorParams p;
    Gen g(34);
    for (int trial = 0; trial < 50; ++trial) {
        const auto field = trial % 2 ? g.parametric(9.6e-6, 5e-9) : g.tabulated(9.6e-6, 5e-9);
        const std::vector<std::size_t> n1s{1, 3, 16, 50};
        const auto center = deterministic_error_curve(field, p, n1s, 50e-9, BinTarget::Center);
        const auto mean = deterministic_error_curve(field, p, n1s, 50e-9, BinTarget::WindowMean);
        for (std::size_t k = 0; k < n1s.size(); ++k)
            CHECK(mean[k].second <= center[k].second * (1 + 1e-12) + 1e-18);
    }
}

TEST_CASE("deterministic curve agrees with a noiseless ensemble at the same centers")
{
    SensorParams p;
    const double T = 9.6e-6;
    const auto field = Waveform::parametric(T, {{4e-9, 1, 0.0}, {1e-9, 2, 1.0}});
    const auto phi = phase_truth(field, p, 50e-9);
    for (std::size_t n1 : {4, 16, 33}) {
        const auto grid = make_grid(T, n1);
        std::vector<double> v(n1);
        for (std::size_t i = 0; i < n1; ++i) v[i] = phi.eval(grid.instants[i]);
        const auto r = decompose_error(make_ensemble(T, n1, 1, v), phi);
        const std::vector<std::size_t> one{n1};
        CHECK(std::sqrt(r.delta_det_sq) ==
              doctest::Approx(deterministic_error_curve(field, p, one, 50e-9)[0].second).epsilon(1e-12));
    }
}
