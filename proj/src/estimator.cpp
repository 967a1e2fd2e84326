#include "wfsim/estimator.hpp"

#include "wfsim/errors.hpp"

#include <cmath>
#include <fmt/format.h>

namespace wfsim {

Reconstruction reconstruct(const PhaseEnsemble& e)
{
    e.validate();
    Reconstruction r;
    r.grid = e.grid;
    r.phi_bar.resize(e.n1());
    for (std::size_t i = 0; i < e.n1(); ++i) {
        double sum = 0.0;
        for (double v : e.row(i)) sum += v;
        r.phi_bar[i] = sum / static_cast<double>(e.columns);
    }
    return r;
}

Waveform phase_truth(const Waveform& field, const SensorParams& p, double t_s)
{
    return field.scaled(-2.0 * p.gamma_e * t_s);
}

double phase_to_field(double phase, const SensorParams& p, double t_s)
{
    return phase / (2.0 * p.gamma_e * t_s);
}

ErrorReport decompose_error(const PhaseEnsemble& e, const Waveform& truth)
{
    e.validate();
    const double T = e.grid.period;
    if (std::abs(truth.period() - T) > 1e-12 * T) {
        throw invalid_argument(fmt::format("truth period {} does not match ensemble period {}", truth.period(), T));
    }

    const auto rec = reconstruct(e);
    const std::size_t n1 = e.n1();
    const double cols = static_cast<double>(e.columns);

    ErrorReport r;
    r.per_bin_stat.resize(n1);
    r.per_bin_det.resize(n1);

    double stat = 0.0;
    double det = 0.0;
    double direct = 0.0;
    for (std::size_t i = 0; i < n1; ++i) {
        const auto [lo, hi] = e.grid.window(i);
        const double mean = rec.phi_bar[i];

        double spread = 0.0;
        for (double v : e.row(i)) spread += (v - mean) * (v - mean);
        r.per_bin_stat[i] = spread / cols;
        stat += r.per_bin_stat[i];

        r.per_bin_det[i] = truth.integrate_squared_deviation(mean, lo, hi) / T;
        det += r.per_bin_det[i];

        double cells = 0.0;
        for (double v : e.row(i)) cells += truth.integrate_squared_deviation(v, lo, hi);
        direct += cells / (cols * T);
    }

    r.delta_stat_sq = stat / static_cast<double>(n1);
    r.delta_det_sq = det;
    r.delta_sq = r.delta_stat_sq + r.delta_det_sq;
    r.delta_sq_direct = direct;
    return r;
}

ErrorReport decompose_error(const PhaseEnsemble& e, const Waveform& field_truth, const SensorParams& p)
{
    return decompose_error(e, phase_truth(field_truth, p, e.t_s));
}

std::vector<std::pair<std::size_t, double>> deterministic_error_curve(const Waveform& field_truth,
                                                                      const SensorParams& p,
                                                                      std::span<const std::size_t> n1_list,
                                                                      double t_s, BinTarget target)
{
    const Waveform phi = phase_truth(field_truth, p, t_s);
    const double T = phi.period();

    std::vector<std::pair<std::size_t, double>> curve;
    curve.reserve(n1_list.size());
    for (std::size_t n1 : n1_list) {
        const auto grid = make_grid(T, n1);
        double det = 0.0;
        for (std::size_t i = 0; i < n1; ++i) {
            const auto [lo, hi] = grid.window(i);
            const double value = target == BinTarget::Center ? phi.eval(grid.instants[i])
                                                             : phi.integrate(lo, hi) / (hi - lo);
            det += phi.integrate_squared_deviation(value, lo, hi) / T;
        }
        curve.emplace_back(n1, std::sqrt(det));
    }
    return curve;
}

} // namespace wfsim
