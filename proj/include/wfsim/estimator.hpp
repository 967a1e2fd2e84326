#pragma once

#include "wfsim/measurement.hpp"
#include "wfsim/sensor.hpp"
#include "wfsim/waveform.hpp"

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace wfsim {

/// Zero-order hold φ̃(t) = Σ_i φ̄_i θ(t − t_i).
struct Reconstruction {
    SampleGrid grid;
    std::vector<double> phi_bar;

    /// φ̃(t) for t ∈ [0, T]; windows are half-open, t = T belongs to the last bin.
    double operator()(double t) const { return phi_bar[grid.bin_of(t)]; }
};

Reconstruction reconstruct(const PhaseEnsemble& e);

/// Phase-domain truth φ(t) = −2γ_e·b(t)·t_s.
Waveform phase_truth(const Waveform& field, const SensorParams& p, double t_s);

/// Radians on the φ scale back to tesla.
double phase_to_field(double phase, const SensorParams& p, double t_s);

/// Squared-error budget of a ZOH reconstruction, all in rad².
///
/// delta_stat_sq: mean over bins of the population variance of each row.
/// delta_det_sq:  Σ_i ∫_window (φ̄_i − φ(t))² dt/T, i.e. the error of the
///                reconstruction built from the row means.
/// delta_sq:      their sum.
/// delta_sq_direct: (1/n2)Σ_j ∫(Σ_i φ_{i,j}θ(t − t_i) − φ(t))² dt/T evaluated
///                cell by cell, without using φ̄_i.
struct ErrorReport {
    double delta_sq = 0.0;
    double delta_stat_sq = 0.0;
    double delta_det_sq = 0.0;
    double delta_sq_direct = 0.0;
    std::vector<double> per_bin_stat;
    std::vector<double> per_bin_det;
};

/// Decompose against a truth already in phase units. The truth period must
/// match the ensemble grid.
ErrorReport decompose_error(const PhaseEnsemble& e, const Waveform& phase_truth);

/// Decompose against a field-domain truth b(t), converted with the
/// ensemble's t_s.
ErrorReport decompose_error(const PhaseEnsemble& e, const Waveform& field_truth, const SensorParams& p);

/// What a noiseless, converged bin value means.
enum class BinTarget { Center, WindowMean };

/// δ_det for each n1 from exact noiseless bin values.
std::vector<std::pair<std::size_t, double>> deterministic_error_curve(const Waveform& field_truth,
                                                                      const SensorParams& p,
                                                                      std::span<const std::size_t> n1_list,
                                                                      double t_s,
                                                                      BinTarget target = BinTarget::Center);

} // namespace wfsim
