#pragma once

#include "wfsim/allocation.hpp"
#include "wfsim/estimator.hpp"
#include "wfsim/experiments.hpp"
#include "wfsim/measurement.hpp"
#include "wfsim/sensor.hpp"

#include <json.hpp>

#include <filesystem>
#include <fmt/format.h>
#include <fstream>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

namespace wfsim::io {

/// CSV with a header row, '.' decimals, LF endings and shortest round-trip
/// formatting of doubles.
class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, std::initializer_list<std::string_view> header);

    template <typename... Fields>
    void row(const Fields&... fields)
    {
        std::string line;
        bool first = true;
        ((line += (first ? "" : ","), line += fmt::format("{}", fields), first = false), ...);
        line += '\n';
        out_ << line;
    }

    void close();

private:
    std::filesystem::path path_;
    std::ofstream out_;
};

/// Rows of a CSV file split on commas; the header row is returned separately.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

CsvTable read_csv(const std::filesystem::path& path);

double parse_double(std::string_view text);

nlohmann::json to_json(const SensorParams& p);
nlohmann::json to_json(const ReadoutModel& m);
nlohmann::json to_json(const ErrorReport& r);
nlohmann::json to_json(const TableReport& r);
nlohmann::json to_json(const Allocation& a);
nlohmann::json to_json(const LogLogFit& f);

void write_json(const std::filesystem::path& path, const nlohmann::json& doc);
nlohmann::json read_json(const std::filesystem::path& path);

/// `i,j,t_i_seconds,phi_ij_rad`, 1-based indices.
void write_ensemble_csv(const std::filesystem::path& path, const PhaseEnsemble& e);

/// Sidecar for an ensemble CSV: scheme, dimensions, t_s, period, seed and the
/// parameters that produced it.
nlohmann::json ensemble_metadata(const PhaseEnsemble& e, const SensorParams& p, const ReadoutModel& m);

/// Sidecar path convention: "<csv stem>.meta.json" next to the CSV.
std::filesystem::path metadata_path_for(const std::filesystem::path& csv);

/// Rebuild an ensemble from its CSV and sidecar. Throws invalid_argument on
/// any shape or grid mismatch.
PhaseEnsemble read_ensemble(const std::filesystem::path& csv, const nlohmann::json& metadata);

/// `t_seconds,phi_tilde_rad,phi_true_rad` at `points` equispaced instants in [0, T).
void write_reconstruction_csv(const std::filesystem::path& path, const Reconstruction& rec,
                              const Waveform& phase_truth, std::size_t points);

/// `n1,delta_det_rad`
void write_deterministic_curve_csv(const std::filesystem::path& path,
                                   const std::vector<std::pair<std::size_t, double>>& curve);

/// `N,delta_rad,delta_ci_rad,n1,n2`
void write_scaling_csv(const std::filesystem::path& path, const ScalingCurve& curve);

/// Whitespace-separated columns with a '#' comment header, for plotting tools.
void write_scaling_dat(const std::filesystem::path& path, const ScalingCurve& curve);

} // namespace wfsim::io
