#include "wfsim/waveform.hpp"

#include "wfsim/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <numbers>

namespace wfsim {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// ∫_{t0}^{t1} cos(α t + β) dt, written to stay accurate for short intervals.
double integrate_cos(double alpha, double beta, double t0, double t1)
{
    const double len = t1 - t0;
    if (alpha == 0.0) return std::cos(beta) * len;
    const double mid = 0.5 * (t0 + t1);
    return 2.0 * std::cos(alpha * mid + beta) * std::sin(0.5 * alpha * len) / alpha;
}

// ∫_{t0}^{t1} sin(α t + β) dt, α ≠ 0.
double integrate_sin(double alpha, double beta, double t0, double t1)
{
    const double len = t1 - t0;
    const double mid = 0.5 * (t0 + t1);
    return 2.0 * std::sin(alpha * mid + beta) * std::sin(0.5 * alpha * len) / alpha;
}

void require_ordered(double t0, double t1)
{
    if (!(t0 <= t1)) throw invalid_argument(fmt::format("integration bounds out of order: {} > {}", t0, t1));
}

} // namespace

Waveform Waveform::parametric(double period, std::vector<Harmonic> components)
{
    if (!(period > 0.0) || !std::isfinite(period)) throw invalid_argument("waveform period must be positive");
    if (components.empty()) throw invalid_argument("parametric waveform needs at least one component");
    for (const auto& c : components) {
        if (c.index < 1) throw invalid_argument(fmt::format("harmonic index must be >= 1, got {}", c.index));
        if (!std::isfinite(c.amplitude) || !std::isfinite(c.phase))
            throw invalid_argument("harmonic amplitude and phase must be finite");
    }
    Waveform w;
    w.period_ = period;
    w.components_ = std::move(components);
    return w;
}

Waveform Waveform::tabulated(double period, std::vector<Sample> samples)
{
    if (!(period > 0.0) || !std::isfinite(period)) throw invalid_argument("waveform period must be positive");
    if (samples.size() < 2) throw invalid_argument("tabulated waveform needs at least two samples");
    for (std::size_t k = 0; k < samples.size(); ++k) {
        const auto& s = samples[k];
        if (!std::isfinite(s.t) || !std::isfinite(s.value)) throw invalid_argument("tabulated samples must be finite");
        if (s.t < 0.0 || s.t > period)
            throw invalid_argument(fmt::format("sample time {} outside [0, {}]", s.t, period));
        if (k > 0 && !(s.t > samples[k - 1].t))
            throw invalid_argument(fmt::format("sample times must be strictly increasing (index {})", k));
    }
    Waveform w;
    w.period_ = period;
    w.samples_ = std::move(samples);
    return w;
}

double Waveform::eval(double t) const
{
    if (is_parametric()) {
        double sum = 0.0;
        for (const auto& c : components_) {
            sum += c.amplitude * std::sin(kTwoPi * c.index * t / period_ + c.phase);
        }
        return sum;
    }

    const double tol = 1e-12 * period_;
    const double lo = samples_.front().t;
    const double hi = samples_.back().t;
    if (t < lo - tol || t > hi + tol)
        throw out_of_domain(fmt::format("t = {} outside tabulated range [{}, {}]", t, lo, hi));
    t = std::clamp(t, lo, hi);

    auto it = std::upper_bound(samples_.begin(), samples_.end(), t,
                               [](double x, const Sample& s) { return x < s.t; });
    if (it == samples_.end()) return samples_.back().value;
    const Sample& b = *it;
    const Sample& a = *(it - 1);
    const double u = (t - a.t) / (b.t - a.t);
    return a.value + u * (b.value - a.value);
}

double Waveform::eval_periodic(double t) const
{
    double r = std::fmod(t, period_);
    if (r < 0.0) r += period_;
    return eval(r);
}

double Waveform::integrate(double t0, double t1) const
{
    require_ordered(t0, t1);
    if (t0 == t1) return 0.0;

    if (is_parametric()) {
        double sum = 0.0;
        for (const auto& c : components_) {
            const double omega = kTwoPi * c.index / period_;
            sum += c.amplitude * integrate_sin(omega, c.phase, t0, t1);
        }
        return sum;
    }

    // Linear between samples: the trapezoid on each overlapping segment is exact.
    const double a0 = eval(t0);
    (void)eval(t1); // domain check
    double sum = 0.0;
    double prev_t = t0;
    double prev_v = a0;
    for (const auto& s : samples_) {
        if (s.t <= t0) continue;
        if (s.t >= t1) break;
        sum += 0.5 * (prev_v + s.value) * (s.t - prev_t);
        prev_t = s.t;
        prev_v = s.value;
    }
    sum += 0.5 * (prev_v + eval(t1)) * (t1 - prev_t);
    return sum;
}

double Waveform::integrate_squared_deviation(double level, double t0, double t1) const
{
    require_ordered(t0, t1);
    if (t0 == t1) return 0.0;

    if (is_parametric()) {
        const double len = t1 - t0;
        double square = 0.0;
        for (const auto& a : components_) {
            const double wa = kTwoPi * a.index / period_;
            for (const auto& b : components_) {
                const double wb = kTwoPi * b.index / period_;
                const double diff = integrate_cos(wa - wb, a.phase - b.phase, t0, t1);
                const double sum = integrate_cos(wa + wb, a.phase + b.phase, t0, t1);
                square += 0.5 * a.amplitude * b.amplitude * (diff - sum);
            }
        }
        const double value = level * level * len - 2.0 * level * integrate(t0, t1) + square;
        return std::max(value, 0.0);
    }

    // (level − b)² is quadratic on each linear segment, so Simpson is exact.
    auto simpson = [&](double a, double b) {
        const double fa = level - eval(a);
        const double fm = level - eval(0.5 * (a + b));
        const double fb = level - eval(b);
        return (b - a) / 6.0 * (fa * fa + 4.0 * fm * fm + fb * fb);
    };
    (void)eval(t0);
    (void)eval(t1);
    double sum = 0.0;
    double prev = t0;
    for (const auto& s : samples_) {
        if (s.t <= t0) continue;
        if (s.t >= t1) break;
        sum += simpson(prev, s.t);
        prev = s.t;
    }
    sum += simpson(prev, t1);
    return sum;
}

Waveform Waveform::scaled(double factor) const
{
    Waveform w = *this;
    for (auto& c : w.components_) c.amplitude *= factor;
    for (auto& s : w.samples_) s.value *= factor;
    return w;
}

SmoothnessEstimate estimate_holder(const Waveform& w, std::size_t n_grid, std::span<const double> eps_set)
{
    if (eps_set.empty()) throw invalid_argument("estimate_holder: empty eps_set");
    if (n_grid < 64) throw invalid_argument("estimate_holder: n_grid must be >= 64");
    const double T = w.period();
    for (double e : eps_set) {
        if (!(e > 0.0 && e < T)) throw invalid_argument(fmt::format("estimate_holder: eps {} outside (0, T)", e));
    }

    std::vector<double> eps(eps_set.begin(), eps_set.end());
    std::sort(eps.begin(), eps.end(), std::greater<>());

    std::vector<double> f(n_grid);
    for (std::size_t k = 0; k < n_grid; ++k) f[k] = w.eval_periodic(T * static_cast<double>(k) / n_grid);

    // Mean squared increment D(ε); H(q, ε) = D(ε)/ε^{2q}.
    std::vector<double> msi(eps.size());
    for (std::size_t e = 0; e < eps.size(); ++e) {
        double acc = 0.0;
        for (std::size_t k = 0; k < n_grid; ++k) {
            const double t = T * static_cast<double>(k) / n_grid;
            const double d = w.eval_periodic(t + eps[e]) - f[k];
            acc += d * d;
        }
        msi[e] = acc / static_cast<double>(n_grid);
    }

    if (std::all_of(msi.begin(), msi.end(), [](double d) { return d == 0.0; })) return {1.0, 0.0};

    auto holder_h = [&](double q, std::size_t e) { return msi[e] / std::pow(eps[e], 2.0 * q); };

    for (int step = 100; step >= 1; --step) {
        const double q = step / 100.0;
        bool bounded = true;
        for (std::size_t big = 0; big < eps.size() && bounded; ++big) {
            const double ref = holder_h(q, big);
            for (std::size_t small = big + 1; small < eps.size(); ++small) {
                if (holder_h(q, small) > 2.0 * ref * (1.0 + 1e-12)) {
                    bounded = false;
                    break;
                }
            }
        }
        if (bounded) {
            double worst = 0.0;
            for (std::size_t e = 0; e < eps.size(); ++e) worst = std::max(worst, holder_h(q, e));
            return {q, std::pow(T, q) * std::sqrt(worst)};
        }
    }
    double worst = 0.0;
    for (std::size_t e = 0; e < eps.size(); ++e) worst = std::max(worst, holder_h(0.01, e));
    return {0.01, std::pow(T, 0.01) * std::sqrt(worst)};
}

std::pair<double, double> SampleGrid::window(std::size_t i) const
{
    const double n = static_cast<double>(instants.size());
    const double lo = period * static_cast<double>(i) / n;
    const double hi = (i + 1 == instants.size()) ? period : period * static_cast<double>(i + 1) / n;
    return {lo, hi};
}

std::size_t SampleGrid::bin_of(double t) const
{
    if (instants.empty()) throw invalid_argument("empty grid");
    if (t < 0.0 || t > period) throw out_of_domain(fmt::format("t = {} outside [0, {}]", t, period));
    auto i = static_cast<std::size_t>(std::floor(t / spacing()));
    i = std::min(i, instants.size() - 1);
    // Nudge for rounding at window edges so the half-open convention holds.
    if (i + 1 < instants.size() && t >= window(i).second) ++i;
    if (i > 0 && t < window(i).first) --i;
    return i;
}

SampleGrid make_grid(double period, std::size_t n1)
{
    if (n1 == 0) throw invalid_argument("make_grid: n1 must be >= 1");
    if (!(period > 0.0)) throw invalid_argument("make_grid: period must be positive");
    SampleGrid g;
    g.period = period;
    g.instants.resize(n1);
    for (std::size_t i = 0; i < n1; ++i) {
        g.instants[i] = (static_cast<double>(i) + 0.5) * period / static_cast<double>(n1);
    }
    return g;
}

} // namespace wfsim
