#include "commands.hpp"

#include "config.hpp"

#include <wfsim/allocation.hpp>
#include <wfsim/errors.hpp>
#include <wfsim/estimator.hpp>
#include <wfsim/experiments.hpp>
#include <wfsim/io.hpp>
#include <wfsim/measurement.hpp>
#include <wfsim/sensor.hpp>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fmt/chrono.h>
#include <fmt/format.h>
#include <fmt/ostream.h>
#include <limits>
#include <optional>
#include <ostream>

namespace wfsim::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::uint64_t kTagSinglePoint = 0x51b9;

struct Globals {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<unsigned> threads;
    bool deterministic = false;
};

void setup_logging()
{
    auto logger = spdlog::get("wfsim");
    if (!logger) logger = spdlog::stderr_logger_mt("wfsim");
    spdlog::set_default_logger(logger);
    spdlog::set_level(spdlog::level::warn);
    if (const char* level = std::getenv("WFSIM_LOG")) spdlog::set_level(spdlog::level::from_str(level));
}

Config load(const Globals& g)
{
    Config c = g.config.empty() ? Config{} : load_config(g.config);
    if (g.seed) c.seed = *g.seed;
    if (g.out) c.out_dir = *g.out;
    if (g.threads) c.threads = *g.threads;
    if (g.deterministic) c.deterministic = true;
    for (const auto& w : c.effective_sensor().warnings()) spdlog::warn("sensor: {}", w);
    return c;
}

fs::path output(const Config& c, const std::string& name)
{
    fs::create_directories(c.out_dir);
    return c.out_dir / name;
}

json with_provenance(json doc, const Config& c)
{
    doc["root_seed"] = c.seed;
    if (!c.deterministic) {
        const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
        doc["created"] = fmt::format("{:%Y-%m-%dT%H:%M:%SZ}", fmt::gmtime(now));
    }
    return doc;
}

Scheme scheme_arg(const std::string& name)
{
    try {
        return parse_scheme(name);
    } catch (const std::invalid_argument& e) {
        throw config_error(e.what());
    }
}

Protocol protocol_arg(const std::string& name)
{
    try {
        return parse_protocol(name);
    } catch (const std::invalid_argument& e) {
        throw config_error(e.what());
    }
}

ExperimentSetup make_setup(const Config& c, bool no_decoherence)
{
    const auto sensor = no_decoherence ? c.sensor.without_decoherence() : c.effective_sensor();
    auto truth = c.truth();
    return ExperimentSetup{
        .truth = truth ? *truth : calibrated_tone(kScalingPeriod, c.t_s, sensor),
        .sensor = sensor,
        .readout = c.readout(c.seed),
        .t_s = c.t_s,
        .seeds = c.seeds,
        .threads = c.threads,
        .hql_batches = c.hql_batches,
    };
}

// ---- simulate --------------------------------------------------------------

struct SimulateArgs {
    std::optional<std::string> scheme;
    std::optional<std::size_t> n1;
    std::optional<int> n2;
    std::optional<std::uint64_t> N;
    std::optional<double> t_s;
    std::optional<std::size_t> batches;
    std::optional<std::string> protocol;
    std::optional<int> k;
    std::optional<double> t_i;
    std::optional<std::size_t> seeds;
};

int simulate_single_point(Config& c, const SimulateArgs& a, std::ostream& out)
{
    const auto truth = c.require_truth();
    const auto sensor = c.effective_sensor();
    ProtocolConfig pc = c.protocol;
    if (a.protocol) pc.kind = protocol_arg(*a.protocol);
    if (a.k) pc.k = *a.k;
    if (a.t_i) pc.t_i = *a.t_i;
    if (a.t_s) pc.t_s = *a.t_s;
    pc.period = truth.period();
    try {
        pc.validate(sensor);
    } catch (const std::invalid_argument& e) {
        throw config_error(fmt::format("protocol: {}", e.what()));
    }

    const double exact = phase_exact(truth, sensor, pc.t_i, pc.t_s);
    const auto path = output(c, "single_point.csv");
    io::CsvWriter csv(path, {"seed_index", "t_i_seconds", "t_s_seconds", "k", "n2", "phi_hat_rad", "std_err_rad",
                             "phi_exact_rad"});
    std::size_t covered = 0;
    for (std::size_t s = 0; s < c.seeds; ++s) {
        const auto m = c.readout(derive_seed(c.seed, {kTagSinglePoint, s}));
        const auto est = estimate_phase(truth, sensor, pc, m);
        if (std::abs(est.phi_hat - exact) <= 3.0 * est.std_err) ++covered;
        csv.row(s, pc.t_i, pc.t_s, pc.k, est.resources_n2, est.phi_hat, est.std_err, exact);
    }
    csv.close();

    json meta{{"format", "wfsim-single-point"},
              {"version", 1},
              {"protocol", std::string(to_string(pc.kind))},
              {"k", pc.k},
              {"t_i", pc.t_i},
              {"t_s", pc.t_s},
              {"period", pc.period},
              {"seeds", c.seeds},
              {"sensor", io::to_json(sensor)},
              {"readout", io::to_json(c.readout(c.seed))}};
    io::write_json(io::metadata_path_for(path), with_provenance(meta, c));

    out << fmt::format("wrote {} ({} estimates)\n", path.string(), c.seeds);
    out << fmt::format("phi_exact_rad={} within_3_sigma={}/{}\n", exact, covered, c.seeds);
    return kExitOk;
}

int cmd_simulate(const Globals& g, const SimulateArgs& a, std::ostream& out)
{
    Config c = load(g);
    if (a.seeds) c.seeds = *a.seeds;
    if (a.protocol || a.k || a.t_i) return simulate_single_point(c, a, out);

    const auto truth = c.require_truth();
    const auto sensor = c.effective_sensor();
    Scheme scheme = a.scheme ? scheme_arg(*a.scheme) : c.scheme;
    auto n1 = a.n1 ? a.n1 : c.n1;
    auto n2 = a.n2 ? a.n2 : c.n2;
    const auto N = a.N ? a.N : c.N;
    const double t_s = a.t_s.value_or(c.t_s);
    const std::size_t batches = a.batches.value_or(c.hql_batches);
    if ((!n1 || !n2) && N) {
        const auto alloc = optimize_exact(ErrorModel::fitted(scheme), *N, {.even_n2 = scheme == Scheme::HQL}).best;
        n1 = static_cast<std::size_t>(alloc.n1);
        n2 = static_cast<int>(alloc.n2);
        spdlog::info("allocated N = {} as n1 = {}, n2 = {}", *N, *n1, *n2);
    }
    if (!n1 || !n2) throw config_error("grid: need n1 and n2, or a budget N");

    const auto m = c.readout(c.seed);
    const auto e = acquire_ensemble(scheme, truth, sensor, m, *n1, *n2, t_s, batches, {.threads = c.threads});

    const auto path = output(c, "ensemble.csv");
    io::write_ensemble_csv(path, e);
    io::write_json(io::metadata_path_for(path), with_provenance(io::ensemble_metadata(e, sensor, m), c));
    out << fmt::format("wrote {} (scheme={} n1={} n2={} columns={})\n", path.string(), to_string(scheme), e.n1(),
                       e.n2, e.columns);
    return kExitOk;
}

// ---- reconstruct -----------------------------------------------------------

struct ReconstructArgs {
    std::string ensemble;
    std::optional<std::string> meta;
    std::size_t points = 1000;
};

int cmd_reconstruct(const Globals& g, const ReconstructArgs& a, std::ostream& out)
{
    Config c = load(g);
    const auto truth = c.require_truth();
    const fs::path csv = a.ensemble;
    const fs::path meta_path = a.meta ? fs::path(*a.meta) : io::metadata_path_for(csv);
    const auto meta = io::read_json(meta_path);
    const auto sensor = meta.contains("sensor") ? sensor_from_json(meta.at("sensor")) : c.effective_sensor();
    const auto e = io::read_ensemble(csv, meta);

    const auto rec = reconstruct(e);
    const auto report = decompose_error(e, truth, sensor);
    const auto phi = phase_truth(truth, sensor, e.t_s);

    const auto rec_path = output(c, "reconstruction.csv");
    io::write_reconstruction_csv(rec_path, rec, phi, a.points);
    json doc = io::to_json(report);
    doc["n1"] = e.n1();
    doc["n2"] = e.n2;
    doc["scheme"] = std::string(to_string(e.scheme));
    io::write_json(output(c, "error_report.json"), with_provenance(doc, c));

    out << fmt::format("delta_rad={} delta_stat_rad={} delta_det_rad={}\n", std::sqrt(report.delta_sq),
                       std::sqrt(report.delta_stat_sq), std::sqrt(report.delta_det_sq));
    return kExitOk;
}

// ---- allocate --------------------------------------------------------------

struct AllocateArgs {
    std::optional<std::string> scheme;
    std::optional<std::uint64_t> N;
    std::string rule = "exact";
    bool sweep = false;
    std::optional<std::size_t> seeds;
};

int cmd_allocate(const Globals& g, const AllocateArgs& a, std::ostream& out)
{
    Config c = load(g);
    if (a.seeds) c.seeds = *a.seeds;
    const Scheme scheme = a.scheme ? scheme_arg(*a.scheme) : c.scheme;
    const auto N = a.N ? a.N : c.N;
    if (!N) throw config_error("allocate: need a budget (--n or grid.N)");
    if (*N < 1) throw config_error("allocate: budget must be >= 1");
    const auto model = ErrorModel::fitted(scheme);
    const AllocationOptions opts{.even_n2 = scheme == Scheme::HQL};

    Allocation alloc;
    std::optional<Allocation> budget_alt;
    if (a.rule == "exact") {
        const auto r = optimize_exact(model, *N, opts);
        alloc = r.best;
        budget_alt = r.budget;
    } else if (a.rule == "budget") {
        alloc = optimize_budget(model, *N, opts);
    } else if (a.rule == "rounded") {
        alloc = rounded_allocation(model, *N);
    } else if (a.rule == "paper-rule") {
        if (scheme != Scheme::SQL) throw config_error("allocate: paper-rule applies to the sql scheme only");
        alloc = paper_rule_sql(model, *N);
    } else {
        throw config_error(fmt::format("allocate: unknown rule '{}' (exact, budget, rounded, paper-rule)", a.rule));
    }

    out << fmt::format("n1={},n2={}\n", alloc.n1, alloc.n2);
    out << fmt::format("predicted_delta_rad={}\n", std::sqrt(alloc.predicted_delta_sq));
    if (budget_alt) {
        out << fmt::format("budget_alternative: n1={},n2={} predicted_delta_rad={}\n", budget_alt->n1, budget_alt->n2,
                           std::sqrt(budget_alt->predicted_delta_sq));
    }

    if (a.sweep) {
        const auto setup = make_setup(c, false);
        const auto points = allocation_sweep(scheme, *N, setup);
        const auto path = output(c, fmt::format("sweep_{}_N{}.csv", to_string(scheme), *N));
        io::CsvWriter csv(path, {"n1", "n2", "delta_rad", "delta_ci_rad", "predicted_delta_rad", "status"});
        for (const auto& p : points) csv.row(p.n1, p.n2, p.delta, p.delta_ci, p.predicted_delta, p.status);
        csv.close();
        out << fmt::format("wrote {} ({} splits)\n", path.string(), points.size());
    }
    return kExitOk;
}

// ---- scaling ---------------------------------------------------------------

struct ScalingArgs {
    std::string scheme = "both";
    std::string kind = "overall";
    bool no_decoherence = false;
    std::optional<std::size_t> seeds;
    std::vector<std::uint64_t> N_list;
};

std::vector<std::uint64_t> table_budgets(Scheme s)
{
    std::vector<std::uint64_t> out;
    if (s == Scheme::SQL) {
        for (const auto& r : kPaperTableSql) out.push_back(r.N);
    } else {
        for (const auto& r : kPaperTableHql) out.push_back(r.N);
    }
    return out;
}

std::vector<Scheme> schemes_of(const std::string& name)
{
    if (name == "both") return {Scheme::SQL, Scheme::HQL};
    return {scheme_arg(name)};
}

double fitted_delta(const LogLogFit& f, double N)
{
    return std::exp(f.intercept) * std::pow(N, f.slope);
}

int cmd_scaling(const Globals& g, const ScalingArgs& a, std::ostream& out)
{
    Config c = load(g);
    if (a.seeds) c.seeds = *a.seeds;
    auto setup = make_setup(c, a.no_decoherence);
    json summary{{"kind", a.kind}, {"seeds", c.seeds}, {"decoherence", !a.no_decoherence && c.decoherence}};

    if (a.kind == "det") {
        std::vector<std::size_t> n1_list = c.n1_list;
        if (n1_list.empty()) n1_list = {4, 8, 16, 32, 64};
        const auto curve = deterministic_error_curve(setup.truth, setup.sensor, n1_list, setup.t_s);
        const auto path = output(c, "deterministic.csv");
        io::write_deterministic_curve_csv(path, curve);
        std::vector<std::pair<double, double>> xy;
        for (const auto& [n1, d] : curve) xy.emplace_back(static_cast<double>(n1), d);
        const auto fit = fit_loglog(xy);
        summary["fit"] = io::to_json(fit);
        io::write_json(output(c, "scaling_summary.json"), with_provenance(summary, c));
        out << fmt::format("kind=det slope={:.4f} slope_stderr={:.4f} points={}\n", fit.slope, fit.slope_stderr,
                           curve.size());
        return kExitOk;
    }

    if (a.kind == "stat") {
        std::vector<int> n2_list = c.n2_list;
        if (n2_list.empty()) n2_list = {4, 8, 16, 32, 64};
        for (Scheme s : schemes_of(a.scheme)) {
            const auto curve = statistical_scaling(s, n2_list, c.stat_n1, setup);
            const auto path = output(c, fmt::format("stat_{}.csv", to_string(s)));
            io::CsvWriter csv(path, {"n2", "delta_stat_rad", "delta_stat_ci_rad"});
            for (const auto& p : curve.points) csv.row(p.n2, p.delta_stat, p.delta_stat_ci);
            csv.close();
            summary[std::string(to_string(s))] = io::to_json(curve.fit);
            out << fmt::format("kind=stat scheme={} slope={:.4f} slope_stderr={:.4f} points={}\n", to_string(s),
                               curve.fit.slope, curve.fit.slope_stderr, curve.points.size());
        }
        io::write_json(output(c, "scaling_summary.json"), with_provenance(summary, c));
        return kExitOk;
    }

    if (a.kind != "overall") throw config_error(fmt::format("scaling: unknown kind '{}' (overall, stat, det)", a.kind));

    std::vector<ScalingCurve> curves;
    for (Scheme s : schemes_of(a.scheme)) {
        std::vector<std::uint64_t> N_list = !a.N_list.empty() ? a.N_list : c.N_list;
        if (N_list.empty()) N_list = table_budgets(s);
        auto curve = run_scaling_experiment(s, N_list, setup);
        io::write_scaling_csv(output(c, fmt::format("scaling_{}.csv", to_string(s))), curve);
        io::write_scaling_dat(output(c, fmt::format("scaling_{}.dat", to_string(s))), curve);
        json entry{{"points", curve.points.size()}};
        if (curve.points.size() >= 3) {
            entry["fit"] = io::to_json(curve.fit);
            out << fmt::format("scheme={} slope={:.4f} slope_stderr={:.4f} points={}\n", to_string(s),
                               curve.fit.slope, curve.fit.slope_stderr, curve.points.size());
        } else {
            out << fmt::format("scheme={} points={} (too few for a fit)\n", to_string(s), curve.points.size());
        }
        summary[std::string(to_string(s))] = entry;
        curves.push_back(std::move(curve));
    }

    if (curves.size() == 2 && curves[0].points.size() >= 3 && curves[1].points.size() >= 3) {
        constexpr double kReferenceBudget = 2000.0;
        const double gain = 20.0 * std::log10(fitted_delta(curves[0].fit, kReferenceBudget) /
                                              fitted_delta(curves[1].fit, kReferenceBudget));
        summary["gain_db_at_N2000"] = gain;
        out << fmt::format("gain_db_at_N2000={:.2f}\n", gain);
    }
    io::write_json(output(c, "scaling_summary.json"), with_provenance(summary, c));
    return kExitOk;
}

// ---- sensitivity -----------------------------------------------------------

struct SensitivityArgs {
    std::string protocol = "all";
    int k_max = 128;
    std::optional<double> t_s;
    std::optional<double> period;
};

int cmd_sensitivity(const Globals& g, const SensitivityArgs& a, std::ostream& out)
{
    Config c = load(g);
    if (a.k_max < 1) throw config_error("sensitivity: --k-max must be >= 1");
    const auto sensor = c.effective_sensor();
    std::vector<Protocol> kinds;
    if (a.protocol == "all") {
        kinds = {Protocol::RamseySQL, Protocol::TDQD, Protocol::PddTDQD};
    } else {
        kinds = {protocol_arg(a.protocol)};
    }

    const auto path = output(c, "sensitivity.csv");
    io::CsvWriter csv(path, {"protocol", "k", "envelope", "b_min_tesla", "t_cycle_seconds", "eta_tesla_per_sqrt_hz"});
    json summary = json::object();
    std::optional<double> best_tdqd, best_pdd;
    for (Protocol kind : kinds) {
        ProtocolConfig pc{kind, 1, a.t_s.value_or(c.protocol.t_s), a.period.value_or(c.protocol.period), 0.0};
        const int k_max = kind == Protocol::RamseySQL ? 1 : a.k_max;
        int best_k = 0;
        Sensitivity best{};
        best.eta = std::numeric_limits<double>::infinity();
        for (int k = 1; k <= k_max; ++k) {
            pc.k = k;
            const auto s = sensitivity(sensor, pc);
            csv.row(to_string(kind), k, protocol_envelope(sensor, pc), s.b_min, s.t_cycle, s.eta);
            if (s.finite && s.eta < best.eta) {
                best = s;
                best_k = k;
            }
        }
        summary[std::string(to_string(kind))] = {{"k_opt", best_k}, {"eta", best.eta}, {"b_min", best.b_min}};
        out << fmt::format("protocol={} k_opt={} eta_tesla_per_sqrt_hz={:.4g} b_min_tesla={:.4g}\n", to_string(kind),
                           best_k, best.eta, best.b_min);
        if (kind == Protocol::TDQD) best_tdqd = best.eta;
        if (kind == Protocol::PddTDQD) best_pdd = best.eta;
    }
    csv.close();
    if (best_tdqd && best_pdd) {
        summary["improvement_pdd_over_tdqd"] = *best_tdqd / *best_pdd;
        out << fmt::format("improvement_pdd_over_tdqd={:.3f}\n", *best_tdqd / *best_pdd);
    }
    io::write_json(output(c, "sensitivity_summary.json"), with_provenance(summary, c));
    return kExitOk;
}

// ---- compare-tables --------------------------------------------------------

int cmd_compare_tables(const Globals& g, std::ostream& out)
{
    Config c = load(g);
    const auto report = validate_paper_tables(ErrorModel::sql_fitted(), ErrorModel::hql_fitted());

    const auto path = output(c, "tables.csv");
    io::CsvWriter csv(path, {"scheme", "N", "n1", "n2", "predicted_delta_sq", "opt_n1", "opt_n2", "ratio_to_optimum",
                             "rule_n1", "rule_n2", "rule_match", "status"});
    out << fmt::format("{:<6}{:>6}{:>5}{:>5}{:>8}{:>8}{:>10}  {}\n", "scheme", "N", "n1", "n2", "opt_n1", "opt_n2",
                       "ratio", "status");
    for (const auto& r : report.rows) {
        csv.row(to_string(r.scheme), r.row.N, r.row.n1, r.row.n2, r.predicted_delta_sq, r.optimum.n1, r.optimum.n2,
                r.ratio_to_optimum, r.rule.n1, r.rule.n2, r.rule_match ? "true" : "false", r.status);
        out << fmt::format("{:<6}{:>6}{:>5}{:>5}{:>8}{:>8}{:>10.4f}  {}\n", to_string(r.scheme), r.row.N, r.row.n1,
                           r.row.n2, r.optimum.n1, r.optimum.n2, r.ratio_to_optimum, r.status);
    }
    csv.close();
    io::write_json(output(c, "tables.json"), with_provenance(io::to_json(report), c));
    out << fmt::format("rows={} all_pass={}\n", report.rows.size(), report.all_pass);
    return report.all_pass ? kExitOk : kExitRuntime;
}

// ---- holder ----------------------------------------------------------------

struct HolderArgs {
    std::size_t n_grid = 4096;
    std::vector<double> eps;
};

int cmd_holder(const Globals& g, const HolderArgs& a, std::ostream& out)
{
    Config c = load(g);
    const auto truth = c.require_truth();
    std::vector<double> eps = a.eps;
    if (eps.empty()) {
        for (int p = 4; p <= 10; ++p) eps.push_back(truth.period() / std::ldexp(1.0, p));
    }
    const auto est = estimate_holder(truth, a.n_grid, eps);
    io::write_json(output(c, "holder.json"),
                   with_provenance({{"q", est.q}, {"M", est.M}, {"n_grid", a.n_grid}, {"eps", eps}}, c));
    out << fmt::format("q={} M={}\n", est.q, est.M);
    return kExitOk;
}

} // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    setup_logging();

    CLI::App app{"Waveform sampling simulator for spin-qubit quantum sensors", "wfsim"};
    app.require_subcommand(1);
    app.fallthrough();

    Globals g;
    app.add_option("--config", g.config, "JSON configuration file");
    app.add_option("--seed", g.seed, "Root random seed");
    app.add_option("--out", g.out, "Output directory");
    app.add_option("--threads", g.threads, "Worker threads (0 = all cores); never changes results");
    app.add_flag("--deterministic", g.deterministic, "Omit timestamps from metadata");

    SimulateArgs sim;
    auto* simulate = app.add_subcommand("simulate", "Acquire a phase ensemble, or single-point estimates");
    simulate->add_option("--scheme", sim.scheme, "sql or hql");
    simulate->add_option("--n1", sim.n1, "Sample instants per period");
    simulate->add_option("--n2", sim.n2, "Resources per sample");
    simulate->add_option("--N,--budget", sim.N, "Total budget (allocated optimally when n1/n2 are not given)");
    simulate->add_option("--t-s", sim.t_s, "Sampling window, seconds");
    simulate->add_option("--batches", sim.batches, "Independent HQL repetitions per sample");
    simulate->add_option("--protocol", sim.protocol, "Single-point mode: ramsey, tdqd or pdd-tdqd");
    simulate->add_option("--k", sim.k, "Single-point mode: pass count");
    simulate->add_option("--t-i", sim.t_i, "Single-point mode: window start, seconds");
    simulate->add_option("--seeds", sim.seeds, "Single-point mode: number of estimates");

    ReconstructArgs rec;
    auto* reconstruct_cmd = app.add_subcommand("reconstruct", "Reconstruct a waveform from an ensemble CSV");
    reconstruct_cmd->add_option("--ensemble", rec.ensemble, "Ensemble CSV")->required();
    reconstruct_cmd->add_option("--meta", rec.meta, "Metadata sidecar (default: <ensemble>.meta.json)");
    reconstruct_cmd->add_option("--points", rec.points, "Output points per period");

    AllocateArgs alloc;
    auto* allocate = app.add_subcommand("allocate", "Split a resource budget between n1 and n2");
    allocate->add_option("--scheme", alloc.scheme, "sql or hql");
    allocate->add_option("--n,--N", alloc.N, "Total budget N");
    allocate->add_option("--rule", alloc.rule, "exact, budget, rounded or paper-rule");
    allocate->add_flag("--sweep", alloc.sweep, "Simulate every divisor split of N");
    allocate->add_option("--seeds", alloc.seeds, "Seeds per split in --sweep");

    ScalingArgs sc;
    auto* scaling = app.add_subcommand("scaling", "Error scaling experiments");
    scaling->add_option("--scheme", sc.scheme, "sql, hql or both");
    scaling->add_option("--kind", sc.kind, "overall (delta vs N), stat (vs n2) or det (vs n1)");
    scaling->add_flag("--no-decoherence", sc.no_decoherence, "Disable T2* and T2 decay");
    scaling->add_option("--seeds", sc.seeds, "Seeds per point");
    scaling->add_option("--budgets", sc.N_list, "Comma-separated budgets N")->delimiter(',');

    SensitivityArgs sens;
    auto* sensitivity_cmd = app.add_subcommand("sensitivity", "Sensitivity versus pass count k");
    sensitivity_cmd->add_option("--protocol", sens.protocol, "all, ramsey, tdqd or pdd-tdqd");
    sensitivity_cmd->add_option("--k-max", sens.k_max, "Largest k");
    sensitivity_cmd->add_option("--t-s", sens.t_s, "Sampling window, seconds");
    sensitivity_cmd->add_option("--period", sens.period, "Pulse spacing T, seconds");

    auto* compare = app.add_subcommand("compare-tables", "Check the published allocation tables");

    HolderArgs hold;
    auto* holder = app.add_subcommand("holder", "Estimate the Hölder smoothness of the waveform");
    holder->add_option("--n-grid", hold.n_grid, "Quadrature grid size");
    holder->add_option("--eps", hold.eps, "Comma-separated increments, seconds")->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return kExitConfig;
    }

    try {
        if (*simulate) return cmd_simulate(g, sim, out);
        if (*reconstruct_cmd) return cmd_reconstruct(g, rec, out);
        if (*allocate) return cmd_allocate(g, alloc, out);
        if (*scaling) return cmd_scaling(g, sc, out);
        if (*sensitivity_cmd) return cmd_sensitivity(g, sens, out);
        if (*compare) return cmd_compare_tables(g, out);
        if (*holder) return cmd_holder(g, hold, out);
    } catch (const config_error& e) {
        err << "configuration error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitRuntime;
}

} // namespace wfsim::cli
