#include "wfsim/sensor.hpp"

#include "wfsim/errors.hpp"

#include <cmath>
#include <fmt/format.h>
#include <limits>

namespace wfsim {

namespace {

double gaussian_decay(double x) { return std::exp(-x * x); }

void check_window(const Waveform& w, double t_i, double t_s)
{
    const double T = w.period();
    const double tol = 1e-12 * T;
    if (!(t_s >= 0.0)) throw invalid_argument(fmt::format("sampling window must be non-negative, got {}", t_s));
    if (t_i < -tol || t_i + t_s > T + tol)
        throw invalid_argument(fmt::format("window [{}, {}] outside [0, {}]", t_i, t_i + t_s, T));
}

} // namespace

std::string_view to_string(Protocol p) noexcept
{
    switch (p) {
    case Protocol::RamseySQL: return "ramsey";
    case Protocol::TDQD: return "tdqd";
    case Protocol::PddTDQD: return "pdd-tdqd";
    }
    return "unknown";
}

Protocol parse_protocol(std::string_view name)
{
    if (name == "ramsey" || name == "ramsey-sql") return Protocol::RamseySQL;
    if (name == "tdqd") return Protocol::TDQD;
    if (name == "pdd-tdqd") return Protocol::PddTDQD;
    throw invalid_argument(fmt::format("unknown protocol '{}'", name));
}

void SensorParams::validate() const
{
    auto positive = [](double v, const char* name) {
        if (!(v > 0.0)) throw invalid_argument(fmt::format("sensor.{} must be positive, got {}", name, v));
    };
    positive(gamma_e, "gamma_e");
    positive(T2_star, "T2_star");
    positive(T2, "T2");
    positive(contrast, "contrast");
    positive(rabi_freq, "rabi_freq");
    positive(t_pi, "t_pi");
    positive(photon_rate_bright, "photon_rate_bright");
    positive(snr_ref, "snr_ref");
    if (contrast > 1.0) throw invalid_argument(fmt::format("sensor.contrast must be <= 1, got {}", contrast));
    if (!(t_overhead >= 0.0)) throw invalid_argument("sensor.t_overhead must be non-negative");
}

std::vector<std::string> SensorParams::warnings() const
{
    std::vector<std::string> out;
    const double product = t_pi * rabi_freq;
    if (std::abs(product - 0.5) > 0.05) {
        out.push_back(fmt::format("t_pi * rabi_freq = {:.3f}, expected 0.5 for a pi pulse", product));
    }
    return out;
}

SensorParams SensorParams::without_decoherence() const
{
    SensorParams q = *this;
    q.T2_star = std::numeric_limits<double>::infinity();
    q.T2 = std::numeric_limits<double>::infinity();
    return q;
}

double photons_per_shot(const SensorParams& p, double shots)
{
    if (!(shots > 0.0)) throw invalid_argument("shots must be positive");
    const double total = (p.snr_ref / p.contrast) * (p.snr_ref / p.contrast);
    return total / shots;
}

int ProtocolConfig::resources() const noexcept
{
    return kind == Protocol::RamseySQL ? k : 2 * k;
}

void ProtocolConfig::validate(const SensorParams& p) const
{
    if (k < 1) throw invalid_argument(fmt::format("protocol.k must be >= 1, got {}", k));
    if (!(t_s > 0.0)) throw invalid_argument("protocol.t_s must be positive");
    if (!(period > 0.0)) throw invalid_argument("protocol.period must be positive");
    const double tol = 1e-12 * period;
    if (t_s + 2.0 * p.t_pi > period + tol)
        throw invalid_argument(fmt::format("window t_s + 2 t_pi = {} exceeds period {}", t_s + 2.0 * p.t_pi, period));
    if (t_i < -tol || t_i + t_s > period + tol)
        throw invalid_argument(fmt::format("window [{}, {}] outside [0, {}]", t_i, t_i + t_s, period));
}

double phase_exact(const Waveform& w, const SensorParams& p, double t_i, double t_s)
{
    check_window(w, t_i, t_s);
    return -2.0 * p.gamma_e * w.integrate(t_i, t_i + t_s);
}

double phase_approx(const Waveform& w, const SensorParams& p, double t_i, double t_s)
{
    check_window(w, t_i, t_s);
    return -2.0 * p.gamma_e * w.eval(t_i) * t_s;
}

double envelope_tdqd(const SensorParams& p, int k, double t_s, double T)
{
    if (k < 0) throw invalid_argument("envelope_tdqd: k must be >= 0");
    const double kk = 2.0 * k;
    return gaussian_decay(kk * t_s / p.T2_star) * gaussian_decay(kk * T / p.T2);
}

double envelope_pdd(const SensorParams& p, int k, double t_s, double T)
{
    if (k < 0) throw invalid_argument("envelope_pdd: k must be >= 0");
    return gaussian_decay(2.0 * k * (T + t_s) / p.T2);
}

double envelope_ramsey(const SensorParams& p, double t_s)
{
    return gaussian_decay(t_s / p.T2_star);
}

double protocol_envelope(const SensorParams& p, const ProtocolConfig& c)
{
    switch (c.kind) {
    case Protocol::RamseySQL: return envelope_ramsey(p, c.t_s);
    case Protocol::TDQD: return envelope_tdqd(p, c.k, c.t_s, c.period);
    case Protocol::PddTDQD: return envelope_pdd(p, c.k, c.t_s, c.period);
    }
    return 0.0;
}

double accumulated_phase(const Waveform& w, const SensorParams& p, const ProtocolConfig& c)
{
    const double single = phase_exact(w, p, c.t_i, c.t_s);
    if (c.kind == Protocol::RamseySQL) return 0.5 * single;
    return static_cast<double>(c.k) * single;
}

QuadraturePair signal_pair(const Waveform& w, const SensorParams& p, const ProtocolConfig& c)
{
    const double env = protocol_envelope(p, c);
    const double phi = accumulated_phase(w, p, c);
    if (c.kind == Protocol::TDQD) return {env * std::sin(phi), env * std::cos(phi)};
    return {env * std::cos(phi), env * std::sin(phi)};
}

double signal(const Waveform& w, const SensorParams& p, const ProtocolConfig& c, Quadrature q)
{
    const auto s = signal_pair(w, p, c);
    return q == Quadrature::X ? s.x : s.y;
}

double phase_from_quadratures(Protocol kind, QuadraturePair s)
{
    if (kind == Protocol::TDQD) return std::atan2(s.x, s.y);
    return std::atan2(s.y, s.x);
}

Sensitivity sensitivity(const SensorParams& p, const ProtocolConfig& c)
{
    if (c.k < 1) throw invalid_argument("sensitivity: k must be >= 1");

    Sensitivity out;
    double phase_per_tesla = 0.0;
    if (c.kind == Protocol::RamseySQL) {
        phase_per_tesla = p.gamma_e * c.t_s;
        out.t_cycle = c.period + p.t_overhead;
    } else {
        phase_per_tesla = 2.0 * c.k * p.gamma_e * c.t_s;
        out.t_cycle = 2.0 * c.k * (c.period + c.t_s) + p.t_overhead;
    }

    const double sigma_read = 1.0 / std::sqrt(photons_per_shot(p));
    const double slope = protocol_envelope(p, c) * 0.5 * p.contrast * phase_per_tesla;
    if (!(slope > 0.0) || !std::isfinite(sigma_read / slope)) {
        out.b_min = std::numeric_limits<double>::infinity();
        out.eta = std::numeric_limits<double>::infinity();
        out.finite = false;
        return out;
    }
    out.b_min = sigma_read / slope;
    out.eta = out.b_min * std::sqrt(out.t_cycle);
    out.finite = std::isfinite(out.eta);
    return out;
}

} // namespace wfsim
