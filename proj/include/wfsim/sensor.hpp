#pragma once

#include "wfsim/waveform.hpp"

#include <numbers>
#include <string>
#include <string_view>
#include <vector>

namespace wfsim {

enum class Protocol { RamseySQL, TDQD, PddTDQD };
enum class Quadrature { X, Y };

std::string_view to_string(Protocol p) noexcept;
/// Accepts "ramsey", "ramsey-sql", "tdqd", "pdd-tdqd" (case-sensitive).
Protocol parse_protocol(std::string_view name);

/// Physical model of the spin sensor. Defaults are the NV-center values used
/// throughout the experiments; γ_e is the free-electron value.
struct SensorParams {
    double gamma_e = 2.0 * std::numbers::pi * 28.024e9; // rad s⁻¹ T⁻¹
    double T2_star = 5.2e-6;                             // s
    double T2 = 0.66e-3;                                 // s
    double contrast = 0.25;
    double rabi_freq = 10e6;         // Hz
    double t_pi = 50e-9;             // s
    double photon_rate_bright = 50e3; // Hz
    double snr_ref = 50.0;           // single-point SNR at full contrast, 2e6 shots
    double t_overhead = 0.0;         // s, per-cycle dead time in sensitivity

    /// Throws invalid_argument on non-positive fields or contrast > 1.
    /// T2_star and T2 may be +inf (decoherence disabled).
    void validate() const;

    /// Soft consistency checks (π-pulse length vs Rabi frequency).
    std::vector<std::string> warnings() const;

    /// Copy with T2* = T2 = ∞.
    SensorParams without_decoherence() const;
};

/// Shot count at which snr_ref is quoted.
inline constexpr double kReferenceShots = 2e6;

/// Mean bright-state photons per shot that make C·√(n_b·shots) = snr_ref.
double photons_per_shot(const SensorParams& p, double shots = kReferenceShots);

struct ProtocolConfig {
    Protocol kind = Protocol::PddTDQD;
    int k = 1;          // two-π-pulse passes (repeat count for RamseySQL)
    double t_s = 300e-9; // s
    double period = 2.4e-6;
    double t_i = 0.0;    // window start

    /// n2: 2k for TDQD/PddTDQD, k for RamseySQL.
    int resources() const noexcept;

    void validate(const SensorParams& p) const;
};

/// Single-pass differential phase φ(t_i) = −2γ_e ∫_{t_i}^{t_i+t_s} b dt.
double phase_exact(const Waveform& w, const SensorParams& p, double t_i, double t_s);

/// Small-window form −2γ_e b(t_i) t_s.
double phase_approx(const Waveform& w, const SensorParams& p, double t_i, double t_s);

/// exp[−(2k·t_s/T2*)²]·exp[−(2k·T/T2)²]
double envelope_tdqd(const SensorParams& p, int k, double t_s, double T);

/// exp[−(2k(T + t_s)/T2)²]
double envelope_pdd(const SensorParams& p, int k, double t_s, double T);

/// exp[−(t_s/T2*)²]
double envelope_ramsey(const SensorParams& p, double t_s);

double protocol_envelope(const SensorParams& p, const ProtocolConfig& c);

/// Noiseless total phase carried into readout: k·φ(t_i) for the TDQD family
/// (2k resources, each adding −γ_e∫b), and φ(t_i)/2 = −γ_e∫b for one Ramsey pass.
double accumulated_phase(const Waveform& w, const SensorParams& p, const ProtocolConfig& c);

struct QuadraturePair {
    double x = 0.0;
    double y = 0.0;
};

/// Both readout quadratures. TDQD: env·(sin Φ, cos Φ); PddTDQD and Ramsey:
/// env·(cos Φ, sin Φ).
QuadraturePair signal_pair(const Waveform& w, const SensorParams& p, const ProtocolConfig& c);

double signal(const Waveform& w, const SensorParams& p, const ProtocolConfig& c, Quadrature q);

/// Phase from a (possibly noisy) quadrature pair, principal branch (−π, π].
double phase_from_quadratures(Protocol kind, QuadraturePair s);

struct Sensitivity {
    double b_min = 0.0;   // T, unity-SNR field per cycle
    double t_cycle = 0.0; // s
    double eta = 0.0;     // T/√Hz
    bool finite = true;
};

/// Minimum detectable field for one cycle and η = B_min·√t_cycle.
/// σ_read = 1/√n_b (photon shot noise of normalized fluorescence) and
/// |dS/dB| = envelope·(C/2)·|dΦ/dB|. Envelope underflow gives eta = +∞ and
/// finite = false.
Sensitivity sensitivity(const SensorParams& p, const ProtocolConfig& c);

} // namespace wfsim
