#include "wfsim/experiments.hpp"

#include "wfsim/errors.hpp"
#include "wfsim/parallel.hpp"

#include <cmath>
#include <fmt/format.h>
#include <limits>
#include <numbers>
#include <tuple>

namespace wfsim {

namespace {

constexpr double kZ95 = 1.959963984540054;

// Stream tags keep the experiment families statistically independent.
constexpr std::uint64_t kTagScaling = 0x5ca1;
constexpr std::uint64_t kTagStat = 0x57a7;
constexpr std::uint64_t kTagSweep = 0x5eed;

struct MeanSq {
    double mean = 0.0;
    double stderr_of_mean = 0.0;
};

MeanSq mean_and_stderr(const std::vector<double>& v)
{
    const double n = static_cast<double>(v.size());
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= n;
    double var = 0.0;
    for (double x : v) var += (x - mean) * (x - mean);
    var = v.size() > 1 ? var / (n - 1.0) : 0.0;
    return {mean, std::sqrt(var / n)};
}

struct SeedOutcome {
    double recon_sq = 0.0;
    double entry_stat_sq = 0.0;
};

SeedOutcome run_one(Scheme scheme, std::uint64_t n1, std::uint64_t n2, const ExperimentSetup& setup,
                    std::uint64_t tag, std::uint64_t seed_index)
{
    ReadoutModel m = setup.readout;
    m.seed = derive_seed(setup.readout.seed, {tag, n1, n2, seed_index});
    const auto e = acquire_ensemble(scheme, setup.truth, setup.sensor, m, n1, static_cast<int>(n2), setup.t_s,
                                    setup.hql_batches);
    const auto report = decompose_error(e, setup.truth, setup.sensor);
    return {report.delta_det_sq, report.delta_stat_sq};
}

// δ and its CI from per-seed squared errors (delta method on √mean).
std::pair<double, double> delta_from_squares(const std::vector<double>& squares)
{
    const auto ms = mean_and_stderr(squares);
    const double delta = std::sqrt(ms.mean);
    const double ci = delta > 0.0 ? kZ95 * ms.stderr_of_mean / (2.0 * delta) : 0.0;
    return {delta, ci};
}

template <typename Error>
[[noreturn]] void rethrow_with_budget(const Error& err, std::uint64_t N)
{
    throw Error(fmt::format("{} [N = {}]", err.what(), N));
}

} // namespace

Waveform calibrated_tone(double period, double t_s, const SensorParams& p, double c_det)
{
    const double phase_amplitude = c_det * std::sqrt(6.0) / std::numbers::pi;
    return Waveform::parametric(period, {{phase_to_field(phase_amplitude, p, t_s), 1, 0.0}});
}

Waveform multi_harmonic_waveform(double period, double amplitude)
{
    return Waveform::parametric(period, {{amplitude, 1, 0.0}, {0.5 * amplitude, 2, 0.0}, {0.25 * amplitude, 4, 0.0}});
}

ExperimentSetup default_setup(std::uint64_t seed)
{
    SensorParams sensor;
    return ExperimentSetup{
        .truth = calibrated_tone(kScalingPeriod, kScalingWindow, sensor),
        .sensor = sensor,
        .readout = ReadoutModel::calibrated(kFittedPhaseNoise, 2'000'000, seed),
        .t_s = kScalingWindow,
        .seeds = 100,
        .threads = 1,
        .hql_batches = 1,
    };
}

ScalingCurve run_scaling_experiment(Scheme scheme, std::span<const std::uint64_t> N_list,
                                    const ExperimentSetup& setup)
{
    if (setup.seeds < 1) throw invalid_argument("experiment needs at least one seed");
    const auto model = ErrorModel::fitted(scheme);

    ScalingCurve curve;
    curve.scheme = scheme;
    for (std::uint64_t N : N_list) {
        const auto alloc = optimize_exact(model, N, {.even_n2 = scheme == Scheme::HQL}).best;

        std::vector<SeedOutcome> outcomes(setup.seeds);
        try {
            parallel_for(setup.seeds, setup.threads, [&](std::size_t s) {
                outcomes[s] = run_one(scheme, alloc.n1, alloc.n2, setup, kTagScaling, s);
            });
        } catch (const decohered_signal& err) {
            rethrow_with_budget(err, N);
        } catch (const dynamic_range_error& err) {
            rethrow_with_budget(err, N);
        } catch (const invalid_argument& err) {
            rethrow_with_budget(err, N);
        }

        std::vector<double> squares;
        double entry = 0.0;
        for (const auto& o : outcomes) {
            squares.push_back(o.recon_sq);
            entry += o.entry_stat_sq;
        }
        const auto [delta, ci] = delta_from_squares(squares);
        curve.points.push_back({N, alloc.n1, alloc.n2, delta, ci, entry / static_cast<double>(setup.seeds)});
    }

    if (curve.points.size() >= 3) {
        std::vector<std::pair<double, double>> xy;
        for (const auto& pt : curve.points) xy.emplace_back(static_cast<double>(pt.N), pt.delta);
        curve.fit = fit_loglog(xy);
    }
    return curve;
}

StatCurve statistical_scaling(Scheme scheme, std::span<const int> n2_list, std::size_t n1,
                              const ExperimentSetup& setup)
{
    if (setup.seeds < 1) throw invalid_argument("experiment needs at least one seed");
    const auto grid = make_grid(setup.truth.period(), n1);
    const auto target = noiseless_bin_phases(setup.truth, setup.sensor, grid, setup.t_s);

    StatCurve curve;
    curve.scheme = scheme;
    for (int n2 : n2_list) {
        std::vector<double> per_seed(setup.seeds);
        parallel_for(setup.seeds, setup.threads, [&](std::size_t s) {
            ReadoutModel m = setup.readout;
            m.seed = derive_seed(setup.readout.seed, {kTagStat, n1, static_cast<std::uint64_t>(n2), s});
            const auto e = acquire_ensemble(scheme, setup.truth, setup.sensor, m, n1, n2, setup.t_s, 1);
            const auto rec = reconstruct(e);
            double acc = 0.0;
            for (std::size_t i = 0; i < n1; ++i) acc += (rec.phi_bar[i] - target[i]) * (rec.phi_bar[i] - target[i]);
            per_seed[s] = acc / static_cast<double>(n1);
        });
        const auto [delta, ci] = delta_from_squares(per_seed);
        curve.points.push_back({n2, delta, ci});
    }

    if (curve.points.size() >= 3) {
        std::vector<std::pair<double, double>> xy;
        for (const auto& pt : curve.points) xy.emplace_back(pt.n2, pt.delta_stat);
        curve.fit = fit_loglog(xy);
    }
    return curve;
}

std::vector<SweepPoint> allocation_sweep(Scheme scheme, std::uint64_t N, const ExperimentSetup& setup)
{
    if (N < 1) throw invalid_argument("budget N must be >= 1");
    if (setup.seeds < 1) throw invalid_argument("experiment needs at least one seed");
    const auto model = ErrorModel::fitted(scheme);
    constexpr double nan = std::numeric_limits<double>::quiet_NaN();

    std::vector<SweepPoint> out;
    for (std::uint64_t n1 = 1; n1 <= N; ++n1) {
        if (N % n1 != 0) continue;
        const std::uint64_t n2 = N / n1;
        SweepPoint pt{n1, n2, nan, nan,
                      std::sqrt(model.predicted_delta_sq(static_cast<double>(n1), static_cast<double>(n2))), "ok"};

        if (scheme == Scheme::HQL && n2 % 2 != 0) {
            pt.status = "odd-n2";
            out.push_back(pt);
            continue;
        }
        if (static_cast<double>(n1) * (setup.t_s + 2.0 * setup.sensor.t_pi) > setup.truth.period() * (1.0 + 1e-12)) {
            pt.status = "grid-overflow";
            out.push_back(pt);
            continue;
        }

        std::vector<double> squares(setup.seeds);
        try {
            parallel_for(setup.seeds, setup.threads, [&](std::size_t s) {
                squares[s] = run_one(scheme, n1, n2, setup, kTagSweep, s).recon_sq;
            });
            std::tie(pt.delta, pt.delta_ci) = delta_from_squares(squares);
        } catch (const decohered_signal&) {
            pt.status = "decohered";
        } catch (const dynamic_range_error&) {
            pt.status = "dynamic-range";
        }
        out.push_back(pt);
    }
    return out;
}

} // namespace wfsim
