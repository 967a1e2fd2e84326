#pragma once

#include "wfsim/allocation.hpp"
#include "wfsim/estimator.hpp"
#include "wfsim/measurement.hpp"
#include "wfsim/sensor.hpp"
#include "wfsim/waveform.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace wfsim {

/// Everything a Monte Carlo experiment needs besides the budget.
struct ExperimentSetup {
    Waveform truth;       // field domain
    SensorParams sensor;
    ReadoutModel readout; // readout.seed is the root seed
    double t_s = 50e-9;
    std::size_t seeds = 100;
    unsigned threads = 1;
    std::size_t hql_batches = 1;
};

/// Period and window of the scaling experiments: T = 9.6 μs, t_s = 50 ns,
/// so n1 = T/(t_s + 2t_π) = 64 samples fit in one period.
inline constexpr double kScalingPeriod = 9.6e-6;
inline constexpr double kScalingWindow = 50e-9;

/// Single sinusoid whose bin-center ZOH error is c_det/n1 (asymptotically) in
/// phase units: phase amplitude c_det·√6/π.
Waveform calibrated_tone(double period, double t_s, const SensorParams& p, double c_det = 0.04);

/// b[sin(2πt/T) + 0.5 sin(4πt/T) + 0.25 sin(8πt/T)].
Waveform multi_harmonic_waveform(double period, double amplitude);

/// Calibrated tone, default sensor, fitted readout noise.
ExperimentSetup default_setup(std::uint64_t seed = 1);

struct ScalingPoint {
    std::uint64_t N = 0;
    std::uint64_t n1 = 0;
    std::uint64_t n2 = 0;
    double delta = 0.0;    // rad, √(seed mean of reconstruction error²)
    double delta_ci = 0.0; // rad, 95% half-width
    double entry_stat_sq = 0.0; // seed mean of the per-entry δ_stat²
};

struct ScalingCurve {
    Scheme scheme = Scheme::SQL;
    std::vector<ScalingPoint> points;
    LogLogFit fit;
};

/// For each N: allocate with optimize_exact on the fitted model, acquire,
/// reconstruct, and average the reconstruction error over seeds. Decoherence
/// or dynamic-range failures are rethrown with the offending N in the message.
ScalingCurve run_scaling_experiment(Scheme scheme, std::span<const std::uint64_t> N_list,
                                    const ExperimentSetup& setup);

struct StatPoint {
    int n2 = 0;
    double delta_stat = 0.0; // rad, RMS of φ̄_i about the noiseless bin value
    double delta_stat_ci = 0.0;
};

struct StatCurve {
    Scheme scheme = Scheme::SQL;
    std::vector<StatPoint> points;
    LogLogFit fit;
};

/// Statistical error of the per-sample estimator φ̄_i versus n2 at fixed n1.
StatCurve statistical_scaling(Scheme scheme, std::span<const int> n2_list, std::size_t n1,
                              const ExperimentSetup& setup);

struct SweepPoint {
    std::uint64_t n1 = 0;
    std::uint64_t n2 = 0;
    double delta = 0.0;
    double delta_ci = 0.0;
    double predicted_delta = 0.0; // from the fitted model
    std::string status;           // "ok" or why the split was skipped
};

/// Simulated δ for every divisor pair of N. Splits that cannot run (odd n2
/// for HQL, grid overflow, decoherence, dynamic range) are reported with
/// delta = NaN and a status.
std::vector<SweepPoint> allocation_sweep(Scheme scheme, std::uint64_t N, const ExperimentSetup& setup);

} // namespace wfsim
