#pragma once

#include <wfsim/waveform.hpp>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <numbers>
#include <random>
#include <string>
#include <vector>

namespace testing {

/// Hand-rolled generator for property tests; fixed seeds keep failures reproducible.
class Gen {
public:
    explicit Gen(std::uint64_t seed) : eng_(seed) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(eng_); }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(eng_); }
    double normal(double mean = 0.0, double sd = 1.0) { return std::normal_distribution<double>(mean, sd)(eng_); }
    std::mt19937_64& engine() { return eng_; }

    std::vector<wfsim::Harmonic> harmonics(int max_count = 5, int max_index = 8, double amplitude = 1e-6)
    {
        std::vector<wfsim::Harmonic> out(static_cast<std::size_t>(integer(1, max_count)));
        for (auto& h : out) {
            h.amplitude = uniform(-amplitude, amplitude);
            h.index = integer(1, max_index);
            h.phase = uniform(-std::numbers::pi, std::numbers::pi);
        }
        return out;
    }

    wfsim::Waveform parametric(double period, double amplitude = 1e-6)
    {
        return wfsim::Waveform::parametric(period, harmonics(5, 8, amplitude));
    }

    // Random piecewise-linear table spanning exactly [0, T].
    wfsim::Waveform tabulated(double period, double amplitude = 1e-6, int max_points = 20)
    {
        const int n = integer(2, max_points);
        std::vector<double> ts{0.0, period};
        for (int k = 2; k < n; ++k) ts.push_back(uniform(0.0, period));
        std::sort(ts.begin(), ts.end());
        ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
        std::vector<wfsim::Sample> s;
        for (double t : ts) s.push_back({t, uniform(-amplitude, amplitude)});
        return wfsim::Waveform::tabulated(period, std::move(s));
    }

private:
    std::mt19937_64 eng_;
};

/// Adaptive Gauss–Kronrod quadrature, the numeric oracle for closed forms.
template <typename F>
double quad(F f, double a, double b, double tol = 1e-14, unsigned depth = 15)
{
    if (a == b) return 0.0;
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, depth, tol);
}

/// Same, split at the breakpoints of a tabulated waveform so kinks never sit inside a panel.
template <typename F>
double quad_tabulated(const wfsim::Waveform& w, F f, double a, double b, double tol = 1e-14, unsigned depth = 15)
{
    std::vector<double> cuts{a};
    for (const auto& s : w.samples()) {
        if (s.t > a && s.t < b) cuts.push_back(s.t);
    }
    cuts.push_back(b);
    double acc = 0.0;
    for (std::size_t k = 0; k + 1 < cuts.size(); ++k) acc += quad(f, cuts[k], cuts[k + 1], tol, depth);
    return acc;
}

inline double rel_err(double got, double want)
{
    if (want == 0.0) return std::abs(got);
    return std::abs(got - want) / std::abs(want);
}

/// Fresh per-test scratch directory under the build tree.
inline std::filesystem::path scratch(const std::string& name)
{
    const std::filesystem::path dir = std::filesystem::path(WFSIM_TEST_TMPDIR) / name;
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

} // namespace testing
