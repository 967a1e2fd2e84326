#include "wfsim/io.hpp"

#include "wfsim/errors.hpp"

#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <sstream>

namespace wfsim::io {

namespace {

std::vector<std::string> split_commas(const std::string& line)
{
    std::vector<std::string> out;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

nlohmann::json finite_or_null(double v)
{
    if (std::isfinite(v)) return v;
    return nullptr;
}

} // namespace

CsvWriter::CsvWriter(const std::filesystem::path& path, std::initializer_list<std::string_view> header)
    : path_(path), out_(path, std::ios::binary | std::ios::trunc)
{
    if (!out_) throw std::runtime_error(fmt::format("cannot open {} for writing", path.string()));
    std::string line;
    bool first = true;
    for (auto h : header) {
        if (!first) line += ',';
        line += h;
        first = false;
    }
    out_ << line << '\n';
}

void CsvWriter::close()
{
    out_.close();
    if (!out_) throw std::runtime_error(fmt::format("error writing {}", path_.string()));
}

CsvTable read_csv(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw invalid_argument(fmt::format("cannot open {}", path.string()));
    CsvTable t;
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (header) {
            t.header = split_commas(line);
            header = false;
        } else {
            t.rows.push_back(split_commas(line));
        }
    }
    if (header) throw invalid_argument(fmt::format("{} is empty", path.string()));
    return t;
}

double parse_double(std::string_view text)
{
    std::string s(text);
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE) {
        throw invalid_argument(fmt::format("not a number: '{}'", s));
    }
    return v;
}

nlohmann::json to_json(const SensorParams& p)
{
    return {
        {"gamma_e", p.gamma_e},
        {"T2_star", finite_or_null(p.T2_star)},
        {"T2", finite_or_null(p.T2)},
        {"contrast", p.contrast},
        {"rabi_freq", p.rabi_freq},
        {"t_pi", p.t_pi},
        {"photon_rate_bright", p.photon_rate_bright},
        {"snr_ref", p.snr_ref},
        {"t_overhead", p.t_overhead},
    };
}

nlohmann::json to_json(const ReadoutModel& m)
{
    return {
        {"shots", m.shots},
        {"noise", std::string(to_string(m.mode))},
        {"photons_per_shot_bright", m.photons_per_shot_bright},
        {"sigma_shot", m.sigma_shot},
        {"seed", m.seed},
    };
}

nlohmann::json to_json(const ErrorReport& r)
{
    return {
        {"delta_sq", r.delta_sq},
        {"delta_stat_sq", r.delta_stat_sq},
        {"delta_det_sq", r.delta_det_sq},
        {"delta_sq_direct", r.delta_sq_direct},
        {"delta_rad", std::sqrt(r.delta_sq)},
        {"per_bin_stat", r.per_bin_stat},
        {"per_bin_det", r.per_bin_det},
    };
}

nlohmann::json to_json(const Allocation& a)
{
    return {
        {"N", a.N},
        {"n1", a.n1},
        {"n2", a.n2},
        {"predicted_delta_sq", a.predicted_delta_sq},
        {"budget_mode", a.budget},
    };
}

nlohmann::json to_json(const TableReport& r)
{
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& c : r.rows) {
        rows.push_back({
            {"scheme", std::string(to_string(c.scheme))},
            {"N", c.row.N},
            {"n1", c.row.n1},
            {"n2", c.row.n2},
            {"product_ok", c.product_ok},
            {"predicted_delta_sq", c.predicted_delta_sq},
            {"optimum", to_json(c.optimum)},
            {"ratio_to_optimum", c.ratio_to_optimum},
            {"rule", to_json(c.rule)},
            {"rule_match", c.rule_match},
            {"status", c.status},
        });
    }
    return {{"rows", rows}, {"all_pass", r.all_pass}};
}

nlohmann::json to_json(const LogLogFit& f)
{
    return {
        {"slope", f.slope},
        {"intercept", f.intercept},
        {"slope_stderr", f.slope_stderr},
        {"max_abs_residual", f.max_abs_residual},
    };
}

void write_json(const std::filesystem::path& path, const nlohmann::json& doc)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error(fmt::format("cannot open {} for writing", path.string()));
    out << doc.dump(2) << '\n';
    if (!out) throw std::runtime_error(fmt::format("error writing {}", path.string()));
}

nlohmann::json read_json(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) throw invalid_argument(fmt::format("cannot open {}", path.string()));
    return nlohmann::json::parse(in);
}

void write_ensemble_csv(const std::filesystem::path& path, const PhaseEnsemble& e)
{
    e.validate();
    CsvWriter csv(path, {"i", "j", "t_i_seconds", "phi_ij_rad"});
    for (std::size_t i = 0; i < e.n1(); ++i) {
        for (std::size_t j = 0; j < e.columns; ++j) {
            csv.row(i + 1, j + 1, e.grid.instants[i], e.at(i, j));
        }
    }
    csv.close();
}

nlohmann::json ensemble_metadata(const PhaseEnsemble& e, const SensorParams& p, const ReadoutModel& m)
{
    return {
        {"format", "wfsim-ensemble"},
        {"version", 1},
        {"scheme", std::string(to_string(e.scheme))},
        {"protocol", e.scheme == Scheme::SQL ? "ramsey" : "pdd-tdqd"},
        {"n1", e.n1()},
        {"n2", e.n2},
        {"columns", e.columns},
        {"t_s", e.t_s},
        {"period", e.grid.period},
        {"seed", e.seed},
        {"sensor", to_json(p)},
        {"readout", to_json(m)},
    };
}

std::filesystem::path metadata_path_for(const std::filesystem::path& csv)
{
    auto out = csv;
    out.replace_extension(".meta.json");
    return out;
}

PhaseEnsemble read_ensemble(const std::filesystem::path& csv, const nlohmann::json& meta)
{
    PhaseEnsemble e;
    try {
        e.scheme = parse_scheme(meta.at("scheme").get<std::string>());
        const auto n1 = meta.at("n1").get<std::size_t>();
        e.n2 = meta.at("n2").get<int>();
        e.columns = meta.at("columns").get<std::size_t>();
        e.t_s = meta.at("t_s").get<double>();
        e.seed = meta.at("seed").get<std::uint64_t>();
        e.grid = make_grid(meta.at("period").get<double>(), n1);
    } catch (const nlohmann::json::exception& err) {
        throw invalid_argument(fmt::format("ensemble metadata: {}", err.what()));
    }

    const auto table = read_csv(csv);
    const std::vector<std::string> expected{"i", "j", "t_i_seconds", "phi_ij_rad"};
    if (table.header != expected) throw invalid_argument(fmt::format("{}: unexpected header", csv.string()));
    if (table.rows.size() != e.n1() * e.columns) {
        throw invalid_argument(fmt::format("{}: {} rows, metadata says {} x {}", csv.string(), table.rows.size(),
                                           e.n1(), e.columns));
    }

    e.estimates.assign(e.n1() * e.columns, std::numeric_limits<double>::quiet_NaN());
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& f = table.rows[r];
        if (f.size() != 4) throw invalid_argument(fmt::format("{}: row {} has {} fields", csv.string(), r + 2, f.size()));
        const auto i = static_cast<std::size_t>(parse_double(f[0]));
        const auto j = static_cast<std::size_t>(parse_double(f[1]));
        if (i < 1 || i > e.n1() || j < 1 || j > e.columns)
            throw invalid_argument(fmt::format("{}: row {} index ({}, {}) out of range", csv.string(), r + 2, i, j));
        const double t = parse_double(f[2]);
        if (std::abs(t - e.grid.instants[i - 1]) > 1e-9 * e.grid.period)
            throw invalid_argument(fmt::format("{}: row {} instant {} does not match grid", csv.string(), r + 2, t));
        e.at(i - 1, j - 1) = parse_double(f[3]);
    }
    e.validate();
    return e;
}

void write_reconstruction_csv(const std::filesystem::path& path, const Reconstruction& rec,
                              const Waveform& phase_truth, std::size_t points)
{
    if (points == 0) throw invalid_argument("reconstruction needs at least one output point");
    CsvWriter csv(path, {"t_seconds", "phi_tilde_rad", "phi_true_rad"});
    const double T = rec.grid.period;
    for (std::size_t k = 0; k < points; ++k) {
        const double t = T * static_cast<double>(k) / static_cast<double>(points);
        csv.row(t, rec(t), phase_truth.eval(t));
    }
    csv.close();
}

void write_deterministic_curve_csv(const std::filesystem::path& path,
                                   const std::vector<std::pair<std::size_t, double>>& curve)
{
    CsvWriter csv(path, {"n1", "delta_det_rad"});
    for (const auto& [n1, d] : curve) csv.row(n1, d);
    csv.close();
}

void write_scaling_csv(const std::filesystem::path& path, const ScalingCurve& curve)
{
    CsvWriter csv(path, {"N", "delta_rad", "delta_ci_rad", "n1", "n2"});
    for (const auto& p : curve.points) csv.row(p.N, p.delta, p.delta_ci, p.n1, p.n2);
    csv.close();
}

void write_scaling_dat(const std::filesystem::path& path, const ScalingCurve& curve)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error(fmt::format("cannot open {} for writing", path.string()));
    out << fmt::format("# {} scaling: delta = exp({}) * N^({})\n", to_string(curve.scheme), curve.fit.intercept,
                       curve.fit.slope);
    out << "# N delta_rad delta_ci_rad fit_rad\n";
    for (const auto& p : curve.points) {
        const double fit = std::exp(curve.fit.intercept) * std::pow(static_cast<double>(p.N), curve.fit.slope);
        out << fmt::format("{} {} {} {}\n", p.N, p.delta, p.delta_ci, fit);
    }
}

} // namespace wfsim::io
