#pragma once

#include <wfsim/measurement.hpp>
#include <wfsim/sensor.hpp>
#include <wfsim/waveform.hpp>

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace wfsim::cli {

/// Bad configuration: unparsable file, unknown key, wrong type, or a value
/// rejected by the library's own validation. Maps to exit code 2.
class config_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Waveform presets that depend on sensor settings are resolved late.
enum class WaveformPreset { None, CalibratedTone };

/// Everything a subcommand can read from the JSON config file. Command-line
/// flags are applied on top by the subcommands.
///
/// Schema (all keys optional unless a command needs the section; unknown keys
/// are rejected everywhere):
///
///   waveform:   period, and exactly one of
///                 components: [{amplitude, index, phase}]
///                 samples:    [[t_seconds, b_tesla], ...]
///                 csv:        path to a `t_seconds,b_tesla` file (relative to the config)
///                 preset:     "tone" | "multi-harmonic" | "calibrated-tone"  (+ amplitude)
///   sensor:     gamma_e, T2_star, T2, contrast, rabi_freq, t_pi,
///               photon_rate_bright, snr_ref, t_overhead, decoherence
///   readout:    noise ("gaussian" | "poisson" | "none"), phase_noise, shots,
///               photons_per_shot_bright
///   protocol:   kind, k, t_s, t_i, period
///   grid:       scheme, n1, n2, N, t_s, hql_batches
///   experiment: seeds, N_list, n2_list, n1_list, stat_n1, seed, threads
///   output:     dir, deterministic
struct Config {
    std::optional<Waveform> waveform; // field domain, tesla
    WaveformPreset preset = WaveformPreset::None;
    double preset_amplitude = 0.04; // calibrated-tone: c_det in radians
    double preset_period = 9.6e-6;

    SensorParams sensor;
    bool decoherence = true;

    std::string noise = "gaussian";
    double phase_noise = kFittedPhaseNoise;
    std::uint64_t shots = 2'000'000;
    std::optional<double> photons_per_shot_bright;

    ProtocolConfig protocol{Protocol::PddTDQD, 15, 300e-9, 2.4e-6, 450e-9};

    Scheme scheme = Scheme::HQL;
    std::optional<std::size_t> n1;
    std::optional<int> n2;
    std::optional<std::uint64_t> N;
    double t_s = 50e-9;
    std::size_t hql_batches = 1;

    std::size_t seeds = 100;
    std::vector<std::uint64_t> N_list;
    std::vector<int> n2_list;
    std::vector<std::size_t> n1_list;
    std::size_t stat_n1 = 16;
    std::uint64_t seed = 1;
    unsigned threads = 1;

    std::filesystem::path out_dir = ".";
    bool deterministic = false;

    /// Sensor with decoherence removed when `decoherence` is false.
    SensorParams effective_sensor() const;

    /// Readout model for the configured noise mode, seeded with `seed`.
    ReadoutModel readout(std::uint64_t seed) const;

    /// Field-domain truth with presets resolved, or nullopt when the config
    /// has no waveform section.
    std::optional<Waveform> truth() const;

    /// Like truth() but throws config_error when the waveform is missing.
    Waveform require_truth() const;

    /// Re-run the library validators; failures become config_error.
    void validate() const;
};

/// Parse a config document. `source` names the file in diagnostics and
/// `base_dir` resolves relative CSV paths.
Config parse_config(const std::string& text, const std::string& source = "<config>",
                    const std::filesystem::path& base_dir = ".");

Config load_config(const std::filesystem::path& path);

/// Sensor parameters from a JSON object with the `sensor` schema (null T2
/// values mean no decoherence).
SensorParams sensor_from_json(const nlohmann::json& j);

/// Two-column `t_seconds,b_tesla` CSV as a tabulated waveform.
Waveform load_waveform_csv(const std::filesystem::path& path, double period);

} // namespace wfsim::cli
