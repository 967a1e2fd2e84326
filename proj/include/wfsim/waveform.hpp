#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace wfsim {

/// One term A·sin(2π·m·t/T + ψ) of a parametric waveform.
struct Harmonic {
    double amplitude = 0.0; // tesla (or radians for phase-domain waveforms)
    int index = 1;          // m ≥ 1
    double phase = 0.0;     // ψ, radians
};

/// One (t, value) pair of a tabulated waveform.
struct Sample {
    double t = 0.0;
    double value = 0.0;
};

/// A reproducible signal b(t) over one period [0, T].
///
/// Either a finite sum of harmonics of 1/T (evaluated periodically) or a table
/// of samples joined by straight lines. The same type is used for the field
/// b(t) in tesla and for the phase-domain counterpart φ(t) in radians; see
/// scaled().
class Waveform {
public:
    static Waveform parametric(double period, std::vector<Harmonic> components);
    static Waveform tabulated(double period, std::vector<Sample> samples);

    double period() const noexcept { return period_; }
    bool is_parametric() const noexcept { return samples_.empty(); }
    std::span<const Harmonic> components() const noexcept { return components_; }
    std::span<const Sample> samples() const noexcept { return samples_; }

    /// b(t). Parametric waveforms accept any t; tabulated ones throw
    /// out_of_domain outside their sample range.
    double eval(double t) const;
    double operator()(double t) const { return eval(t); }

    /// b(t) with t wrapped into [0, T).
    double eval_periodic(double t) const;

    /// ∫_{t0}^{t1} b(t) dt, t0 ≤ t1.
    double integrate(double t0, double t1) const;

    /// ∫_{t0}^{t1} (level − b(t))² dt, t0 ≤ t1. Never negative.
    double integrate_squared_deviation(double level, double t0, double t1) const;

    /// Same shape with every value multiplied by factor.
    Waveform scaled(double factor) const;

private:
    Waveform() = default;

    double period_ = 0.0;
    std::vector<Harmonic> components_;
    std::vector<Sample> samples_;
};

/// Hölder smoothness (q, M) of a waveform, M in the waveform's value units.
struct SmoothnessEstimate {
    double q = 1.0;
    double M = 0.0;
};

/// Largest exponent q ∈ (0, 1] (on a 0.01 grid) for which
/// H(q, ε) = (1/T)∫|[f(t+ε) − f(t)]/ε^q|² dt stays bounded as ε shrinks
/// through eps_set, with M = T^q·√max_ε H(q, ε). The integral is a rectangle
/// rule on n_grid points of the periodic extension.
SmoothnessEstimate estimate_holder(const Waveform& w, std::size_t n_grid, std::span<const double> eps_set);

/// Bin-center sample instants t_i = (i − 1/2)·T/n1 (stored zero-based).
struct SampleGrid {
    double period = 0.0;
    std::vector<double> instants;

    std::size_t n1() const noexcept { return instants.size(); }
    double spacing() const noexcept { return period / static_cast<double>(instants.size()); }

    /// Zero-order-hold window [t_i − T/(2n1), t_i + T/(2n1)) of bin i.
    std::pair<double, double> window(std::size_t i) const;

    /// Bin whose half-open window contains t; t = T maps to the last bin.
    std::size_t bin_of(double t) const;
};

SampleGrid make_grid(double period, std::size_t n1);

} // namespace wfsim
