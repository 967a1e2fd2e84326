#pragma once

#include "wfsim/rng.hpp"
#include "wfsim/sensor.hpp"
#include "wfsim/waveform.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace wfsim {

/// Fitted per-resource phase noise (rad) of the standard scheme.
inline constexpr double kFittedPhaseNoise = 0.0555;

enum class NoiseMode { Gaussian, Poisson };

std::string_view to_string(NoiseMode m) noexcept;
NoiseMode parse_noise_mode(std::string_view name);

/// How a signal value turns into a noisy readout.
///
/// Gaussian: ŝ = s + N(0, sigma_shot²/shots). Poisson: photon counts over
/// `shots` repetitions with photons_per_shot_bright in the bright state,
/// mapped back to signal units. sigma_shot = 0 disables noise.
struct ReadoutModel {
    std::uint64_t shots = 2'000'000;
    NoiseMode mode = NoiseMode::Gaussian;
    double photons_per_shot_bright = 0.02;
    double sigma_shot = 0.0;
    std::uint64_t seed = 0;

    /// Gaussian noise tuned so one standard-scheme resource has phase std
    /// `phase_noise` and an n2-resource TDQD estimate has phase_noise/n2.
    static ReadoutModel calibrated(double phase_noise = kFittedPhaseNoise, std::uint64_t shots = 2'000'000,
                                   std::uint64_t seed = 0);
    /// Photon-counting noise with the SNR calibration of the sensor.
    static ReadoutModel poisson(const SensorParams& p, std::uint64_t shots = 2'000'000, std::uint64_t seed = 0);
    static ReadoutModel noiseless(std::uint64_t seed = 0);

    void validate() const;

    /// Standard deviation of one readout quadrature (signal units, s ≈ 0).
    double quadrature_sigma(const SensorParams& p) const;

    bool is_noiseless() const noexcept { return mode == NoiseMode::Gaussian && sigma_shot == 0.0; }
};

/// Noisy estimate ŝ of s_true ∈ [−1, 1]; E[ŝ] = s_true, Var[ŝ] ∝ 1/shots.
double simulate_readout(double s_true, const ReadoutModel& m, const SensorParams& p, CounterRng& rng);

/// Same, drawing from the stream seeded by m.seed.
double simulate_readout(double s_true, const ReadoutModel& m, const SensorParams& p);

struct PhaseEstimate {
    double phi_hat = 0.0; // rad, on the φ(t) = −2γ_e∫b scale
    double std_err = 0.0; // rad
    int resources_n2 = 1;
};

struct EstimateOptions {
    bool check_dynamic_range = true;
};

/// Simulate both quadratures, take atan2 on the principal branch and rescale
/// to the single-pass phase φ(t_i): Φ̂/k for the TDQD family, 2Φ̂ for one
/// Ramsey pass (k Ramsey passes are averaged).
///
/// Throws decohered_signal when the envelope is below 1e-6 and
/// dynamic_range_error when |Φ| ≥ π (unless the check is disabled, in which
/// case the wrapped, biased estimate is returned).
PhaseEstimate estimate_phase(const Waveform& w, const SensorParams& p, const ProtocolConfig& c,
                             const ReadoutModel& m, EstimateOptions opts = {});

enum class Scheme { SQL, HQL };

std::string_view to_string(Scheme s) noexcept;
Scheme parse_scheme(std::string_view name);

/// Per-sample phase estimates φ_{i,j} on a bin-center grid.
///
/// Rows are sample instants. Columns are independent estimates of the same
/// instant: n2 single-resource Ramsey estimates for SQL, or independent
/// repetitions (batches) of one 2k = n2 resource estimate for HQL.
struct PhaseEnsemble {
    Scheme scheme = Scheme::SQL;
    SampleGrid grid;
    int n2 = 1;               // resources per sample
    std::size_t columns = 1;  // stored estimates per sample
    double t_s = 0.0;
    std::uint64_t seed = 0;
    std::vector<double> estimates; // row-major n1 × columns

    std::size_t n1() const noexcept { return grid.n1(); }
    double at(std::size_t i, std::size_t j) const { return estimates[i * columns + j]; }
    double& at(std::size_t i, std::size_t j) { return estimates[i * columns + j]; }
    std::span<const double> row(std::size_t i) const { return {estimates.data() + i * columns, columns}; }

    /// Throws invalid_argument if dimensions disagree or entries are not finite.
    void validate() const;
};

struct AcquireOptions {
    unsigned threads = 1;
    EstimateOptions estimate{};
};

/// Window start that centers a t_s window on instant t.
inline double centered_window_start(double t, double t_s) { return t - 0.5 * t_s; }

/// n2 independent single-pass Ramsey estimates at each of n1 bin centers.
PhaseEnsemble acquire_ensemble_sql(const Waveform& w, const SensorParams& p, const ReadoutModel& m, std::size_t n1,
                                   int n2, double t_s, AcquireOptions opts = {});

/// One PDD-enhanced TDQD estimate with k = n2/2 per bin center, repeated
/// `batches` times with independent noise.
PhaseEnsemble acquire_ensemble_hql(const Waveform& w, const SensorParams& p, const ReadoutModel& m, std::size_t n1,
                                   int n2, double t_s, std::size_t batches = 1, AcquireOptions opts = {});

PhaseEnsemble acquire_ensemble(Scheme scheme, const Waveform& w, const SensorParams& p, const ReadoutModel& m,
                               std::size_t n1, int n2, double t_s, std::size_t hql_batches = 1,
                               AcquireOptions opts = {});

/// Noiseless per-bin targets: phase_exact over each centered window.
std::vector<double> noiseless_bin_phases(const Waveform& w, const SensorParams& p, const SampleGrid& grid, double t_s);

} // namespace wfsim
