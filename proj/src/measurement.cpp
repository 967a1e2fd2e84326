#include "wfsim/measurement.hpp"

#include "wfsim/errors.hpp"
#include "wfsim/parallel.hpp"

#include <cmath>
#include <fmt/format.h>
#include <numbers>
#include <random>

namespace wfsim {

namespace {

constexpr double kMinEnvelope = 1e-6;

struct CleanSignal {
    QuadraturePair pair;
    double envelope = 0.0;
    double total_phase = 0.0;
};

CleanSignal clean_signal(const Waveform& w, const SensorParams& p, const ProtocolConfig& c)
{
    CleanSignal s;
    s.envelope = protocol_envelope(p, c);
    s.total_phase = accumulated_phase(w, p, c);
    s.pair = signal_pair(w, p, c);
    return s;
}

// Turns a noiseless signal into a phase estimate using streams derived from `seed`.
PhaseEstimate estimate_from_clean(const CleanSignal& clean, const ProtocolConfig& c, const ReadoutModel& m,
                                  const SensorParams& p, std::uint64_t seed, const EstimateOptions& opts)
{
    if (clean.envelope < kMinEnvelope) {
        throw decohered_signal(fmt::format("signal envelope {:.3g} below {:.0e} ({} with k = {})", clean.envelope,
                                           kMinEnvelope, to_string(c.kind), c.k));
    }
    if (opts.check_dynamic_range && std::abs(clean.total_phase) >= std::numbers::pi) {
        throw dynamic_range_error(
            fmt::format("accumulated phase {:.4f} rad outside (-pi, pi) ({} with k = {})", clean.total_phase,
                        to_string(c.kind), c.k));
    }

    const double sigma_q = m.quadrature_sigma(p);
    auto noisy_phase = [&](std::uint64_t pass) {
        if (m.is_noiseless()) return phase_from_quadratures(c.kind, clean.pair);
        CounterRng rx(derive_seed(seed, {pass, 0}));
        CounterRng ry(derive_seed(seed, {pass, 1}));
        const QuadraturePair noisy{simulate_readout(clean.pair.x, m, p, rx), simulate_readout(clean.pair.y, m, p, ry)};
        return phase_from_quadratures(c.kind, noisy);
    };

    PhaseEstimate est;
    est.resources_n2 = c.resources();
    if (c.kind == Protocol::RamseySQL) {
        double sum = 0.0;
        for (int pass = 0; pass < c.k; ++pass) sum += noisy_phase(static_cast<std::uint64_t>(pass));
        est.phi_hat = 2.0 * sum / c.k;
        est.std_err = 2.0 * sigma_q / (clean.envelope * std::sqrt(static_cast<double>(c.k)));
    } else {
        est.phi_hat = noisy_phase(0) / c.k;
        est.std_err = sigma_q / (clean.envelope * c.k);
    }
    return est;
}

void check_grid_fits(const Waveform& w, const SensorParams& p, std::size_t n1, double t_s)
{
    if (n1 == 0) throw invalid_argument("n1 must be >= 1");
    if (!(t_s > 0.0)) throw invalid_argument("t_s must be positive");
    const double need = static_cast<double>(n1) * (t_s + 2.0 * p.t_pi);
    if (need > w.period() * (1.0 + 1e-12)) {
        throw invalid_argument(fmt::format("grid overflow: n1*(t_s + 2 t_pi) = {:.6g} s exceeds period {:.6g} s",
                                           need, w.period()));
    }
}

ProtocolConfig centered_config(Protocol kind, int k, const SampleGrid& grid, std::size_t i, double t_s)
{
    ProtocolConfig c;
    c.kind = kind;
    c.k = k;
    c.t_s = t_s;
    c.period = grid.period;
    c.t_i = centered_window_start(grid.instants[i], t_s);
    return c;
}

} // namespace

std::string_view to_string(NoiseMode m) noexcept
{
    return m == NoiseMode::Gaussian ? "gaussian" : "poisson";
}

NoiseMode parse_noise_mode(std::string_view name)
{
    if (name == "gaussian") return NoiseMode::Gaussian;
    if (name == "poisson") return NoiseMode::Poisson;
    throw invalid_argument(fmt::format("unknown noise mode '{}'", name));
}

ReadoutModel ReadoutModel::calibrated(double phase_noise, std::uint64_t shots, std::uint64_t seed)
{
    if (!(phase_noise >= 0.0)) throw invalid_argument("phase noise must be non-negative");
    ReadoutModel m;
    m.shots = shots;
    m.mode = NoiseMode::Gaussian;
    m.sigma_shot = 0.5 * phase_noise * std::sqrt(static_cast<double>(shots));
    m.seed = seed;
    return m;
}

ReadoutModel ReadoutModel::poisson(const SensorParams& p, std::uint64_t shots, std::uint64_t seed)
{
    ReadoutModel m;
    m.shots = shots;
    m.mode = NoiseMode::Poisson;
    m.photons_per_shot_bright = photons_per_shot(p, static_cast<double>(shots));
    m.seed = seed;
    return m;
}

ReadoutModel ReadoutModel::noiseless(std::uint64_t seed)
{
    ReadoutModel m;
    m.sigma_shot = 0.0;
    m.seed = seed;
    return m;
}

void ReadoutModel::validate() const
{
    if (shots < 1) throw invalid_argument("readout.shots must be >= 1");
    if (!(photons_per_shot_bright > 0.0)) throw invalid_argument("readout.photons_per_shot_bright must be positive");
    if (!(sigma_shot >= 0.0) || !std::isfinite(sigma_shot))
        throw invalid_argument("readout.sigma_shot must be finite and non-negative");
}

double ReadoutModel::quadrature_sigma(const SensorParams& p) const
{
    const double n = static_cast<double>(shots);
    if (mode == NoiseMode::Gaussian) return sigma_shot / std::sqrt(n);
    return 2.0 / (p.contrast * std::sqrt(n * photons_per_shot_bright)) * std::sqrt(1.0 - 0.5 * p.contrast);
}

double simulate_readout(double s_true, const ReadoutModel& m, const SensorParams& p, CounterRng& rng)
{
    if (!(std::abs(s_true) <= 1.0)) throw invalid_argument(fmt::format("signal {} outside [-1, 1]", s_true));

    const double n = static_cast<double>(m.shots);
    if (m.mode == NoiseMode::Gaussian) {
        if (m.sigma_shot == 0.0) return s_true;
        std::normal_distribution<double> noise(0.0, m.sigma_shot / std::sqrt(n));
        return s_true + noise(rng);
    }

    // P(bright) = (1 + s)/2; the dark state fluoresces at (1 − C) of the bright rate.
    const double p_bright = 0.5 * (1.0 + s_true);
    const double rate = m.photons_per_shot_bright * (p_bright + (1.0 - p.contrast) * (1.0 - p_bright));
    std::poisson_distribution<long long> counts(n * rate);
    const double normalized = static_cast<double>(counts(rng)) / (n * m.photons_per_shot_bright);
    return 1.0 - 2.0 * (1.0 - normalized) / p.contrast;
}

double simulate_readout(double s_true, const ReadoutModel& m, const SensorParams& p)
{
    CounterRng rng(derive_seed(m.seed, {}));
    return simulate_readout(s_true, m, p, rng);
}

PhaseEstimate estimate_phase(const Waveform& w, const SensorParams& p, const ProtocolConfig& c,
                             const ReadoutModel& m, EstimateOptions opts)
{
    c.validate(p);
    return estimate_from_clean(clean_signal(w, p, c), c, m, p, m.seed, opts);
}

std::string_view to_string(Scheme s) noexcept
{
    return s == Scheme::SQL ? "sql" : "hql";
}

Scheme parse_scheme(std::string_view name)
{
    if (name == "sql") return Scheme::SQL;
    if (name == "hql") return Scheme::HQL;
    throw invalid_argument(fmt::format("unknown scheme '{}'", name));
}

void PhaseEnsemble::validate() const
{
    if (grid.n1() == 0) throw invalid_argument("ensemble has no sample instants");
    if (columns == 0) throw invalid_argument("ensemble has no columns");
    if (n2 < 1) throw invalid_argument("ensemble n2 must be >= 1");
    if (estimates.size() != grid.n1() * columns)
        throw invalid_argument(fmt::format("ensemble holds {} values, expected {} x {}", estimates.size(), grid.n1(),
                                           columns));
    for (double v : estimates) {
        if (!std::isfinite(v)) throw invalid_argument("ensemble contains a non-finite estimate");
    }
}

PhaseEnsemble acquire_ensemble_sql(const Waveform& w, const SensorParams& p, const ReadoutModel& m, std::size_t n1,
                                   int n2, double t_s, AcquireOptions opts)
{
    if (n2 < 1) throw invalid_argument("n2 must be >= 1");
    check_grid_fits(w, p, n1, t_s);

    PhaseEnsemble e;
    e.scheme = Scheme::SQL;
    e.grid = make_grid(w.period(), n1);
    e.n2 = n2;
    e.columns = static_cast<std::size_t>(n2);
    e.t_s = t_s;
    e.seed = m.seed;
    e.estimates.assign(n1 * e.columns, 0.0);

    parallel_for(n1, opts.threads, [&](std::size_t i) {
        const auto c = centered_config(Protocol::RamseySQL, 1, e.grid, i, t_s);
        const auto clean = clean_signal(w, p, c);
        for (std::size_t j = 0; j < e.columns; ++j) {
            const auto seed = derive_seed(m.seed, {i, j});
            e.at(i, j) = estimate_from_clean(clean, c, m, p, seed, opts.estimate).phi_hat;
        }
    });
    return e;
}

PhaseEnsemble acquire_ensemble_hql(const Waveform& w, const SensorParams& p, const ReadoutModel& m, std::size_t n1,
                                   int n2, double t_s, std::size_t batches, AcquireOptions opts)
{
    if (n2 < 2 || n2 % 2 != 0) throw invalid_argument(fmt::format("HQL n2 must be even and >= 2, got {}", n2));
    if (batches < 1) throw invalid_argument("HQL batches must be >= 1");
    check_grid_fits(w, p, n1, t_s);

    PhaseEnsemble e;
    e.scheme = Scheme::HQL;
    e.grid = make_grid(w.period(), n1);
    e.n2 = n2;
    e.columns = batches;
    e.t_s = t_s;
    e.seed = m.seed;
    e.estimates.assign(n1 * batches, 0.0);

    parallel_for(n1, opts.threads, [&](std::size_t i) {
        const auto c = centered_config(Protocol::PddTDQD, n2 / 2, e.grid, i, t_s);
        const auto clean = clean_signal(w, p, c);
        for (std::size_t j = 0; j < batches; ++j) {
            const auto seed = derive_seed(m.seed, {i, j});
            e.at(i, j) = estimate_from_clean(clean, c, m, p, seed, opts.estimate).phi_hat;
        }
    });
    return e;
}

PhaseEnsemble acquire_ensemble(Scheme scheme, const Waveform& w, const SensorParams& p, const ReadoutModel& m,
                               std::size_t n1, int n2, double t_s, std::size_t hql_batches, AcquireOptions opts)
{
    if (scheme == Scheme::SQL) return acquire_ensemble_sql(w, p, m, n1, n2, t_s, opts);
    return acquire_ensemble_hql(w, p, m, n1, n2, t_s, hql_batches, opts);
}

std::vector<double> noiseless_bin_phases(const Waveform& w, const SensorParams& p, const SampleGrid& grid, double t_s)
{
    std::vector<double> out(grid.n1());
    for (std::size_t i = 0; i < grid.n1(); ++i) {
        out[i] = phase_exact(w, p, centered_window_start(grid.instants[i], t_s), t_s);
    }
    return out;
}

} // namespace wfsim
