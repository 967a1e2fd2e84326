#include "wfsim/allocation.hpp"

#include "wfsim/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>

namespace wfsim {

namespace {

Allocation make_allocation(const ErrorModel& m, std::uint64_t N, std::uint64_t n1, std::uint64_t n2)
{
    Allocation a;
    a.N = N;
    a.n1 = n1;
    a.n2 = n2;
    a.predicted_delta_sq = m.predicted_delta_sq(static_cast<double>(n1), static_cast<double>(n2));
    a.budget = n1 * n2 < N;
    return a;
}

bool n2_allowed(std::uint64_t n2, const AllocationOptions& opts)
{
    return n2 >= 1 && (!opts.even_n2 || n2 % 2 == 0);
}

} // namespace

ErrorModel ErrorModel::sql_fitted()
{
    return {kFittedPhaseNoise, 0.5, 0.04, 1.0};
}

ErrorModel ErrorModel::hql_fitted()
{
    return {kFittedPhaseNoise, 1.0, 0.04, 1.0};
}

ErrorModel ErrorModel::fitted(Scheme s)
{
    return s == Scheme::SQL ? sql_fitted() : hql_fitted();
}

void ErrorModel::validate() const
{
    if (!(a_stat > 0.0)) throw invalid_argument("error model a_stat must be positive");
    if (!(c_det > 0.0)) throw invalid_argument("error model c_det must be positive");
    if (!(p_stat > 0.0)) throw invalid_argument("error model p_stat must be positive");
    if (!(q > 0.0 && q <= 1.0)) throw invalid_argument("error model q must lie in (0, 1]");
}

double ErrorModel::predicted_delta_sq(double n1, double n2) const
{
    const double stat = a_stat / std::pow(n2, p_stat);
    const double det = c_det / std::pow(n1, q);
    return stat * stat + det * det;
}

double continuous_optimum(const ErrorModel& m, std::uint64_t N)
{
    m.validate();
    if (N < 1) throw invalid_argument("budget N must be >= 1");
    const double p = m.p_stat;
    const double ratio = m.q * m.c_det * m.c_det / (p * m.a_stat * m.a_stat);
    const double n1 = std::pow(ratio, 1.0 / (2.0 * p + 2.0 * m.q)) * std::pow(static_cast<double>(N), p / (p + m.q));
    return std::clamp(n1, 1.0, static_cast<double>(N));
}

Allocation optimize_budget(const ErrorModel& m, std::uint64_t N, AllocationOptions opts)
{
    m.validate();
    if (N < 1) throw invalid_argument("budget N must be >= 1");
    std::optional<Allocation> best;
    for (std::uint64_t n1 = 1; n1 <= N; ++n1) {
        std::uint64_t n2 = N / n1;
        if (opts.even_n2) n2 -= n2 % 2;
        if (!n2_allowed(n2, opts)) continue;
        auto cand = make_allocation(m, N, n1, n2);
        if (!best || cand.predicted_delta_sq < best->predicted_delta_sq) best = cand;
    }
    if (!best) throw invalid_argument(fmt::format("no allocation fits budget N = {}", N));
    return *best;
}

AllocationResult optimize_exact(const ErrorModel& m, std::uint64_t N, AllocationOptions opts)
{
    m.validate();
    if (N < 1) throw invalid_argument("budget N must be >= 1");

    std::optional<Allocation> best;
    auto consider = [&](std::uint64_t n1, std::uint64_t n2) {
        if (!n2_allowed(n2, opts)) return;
        auto cand = make_allocation(m, N, n1, n2);
        if (!best || cand.predicted_delta_sq < best->predicted_delta_sq ||
            (cand.predicted_delta_sq == best->predicted_delta_sq && cand.n1 < best->n1)) {
            best = cand;
        }
    };
    for (std::uint64_t d = 1; d * d <= N; ++d) {
        if (N % d != 0) continue;
        consider(d, N / d);
        if (d != N / d) consider(N / d, d);
    }
    if (!best) throw invalid_argument(fmt::format("no divisor pair of N = {} satisfies the allocation constraints", N));

    AllocationResult result;
    result.best = *best;
    const auto budget = optimize_budget(m, N, opts);
    if (budget.predicted_delta_sq < best->predicted_delta_sq * (1.0 - 1e-12)) result.budget = budget;
    return result;
}

Allocation rounded_allocation(const ErrorModel& m, std::uint64_t N)
{
    const auto n1 = static_cast<std::uint64_t>(std::llround(continuous_optimum(m, N)));
    return make_allocation(m, N, n1, N / n1);
}

Allocation paper_rule_sql(const ErrorModel& m, std::uint64_t N)
{
    if (N < 1) throw invalid_argument("budget N must be >= 1");
    auto n1 = static_cast<std::uint64_t>(std::llround(std::cbrt(2.0 * static_cast<double>(N))));
    n1 = std::clamp<std::uint64_t>(n1, 1, N);
    return make_allocation(m, N, n1, N / n1);
}

TableReport validate_paper_tables(const ErrorModel& m_sql, const ErrorModel& m_hql)
{
    TableReport report;
    report.all_pass = true;

    auto check = [&](Scheme scheme, const TableEntry& row, const ErrorModel& m) {
        TableRowCheck c;
        c.scheme = scheme;
        c.row = row;
        c.product_ok = row.n1 * row.n2 == row.N;
        c.predicted_delta_sq = m.predicted_delta_sq(static_cast<double>(row.n1), static_cast<double>(row.n2));
        c.optimum = optimize_exact(m, row.N, {.even_n2 = scheme == Scheme::HQL}).best;
        c.ratio_to_optimum = c.predicted_delta_sq / c.optimum.predicted_delta_sq;
        c.rule = scheme == Scheme::HQL ? rounded_allocation(m, row.N) : paper_rule_sql(m, row.N);
        c.rule_match = c.rule.n1 == row.n1 && c.rule.n2 == row.n2;

        if (scheme == Scheme::HQL) {
            c.pass = c.product_ok && c.rule_match;
            c.status = c.pass ? "exact-match" : "FAIL";
        } else {
            c.pass = c.product_ok && c.ratio_to_optimum <= 1.0 + kSqlTableTolerance;
            c.status = c.pass ? "within-6%" : "FAIL";
        }
        report.all_pass = report.all_pass && c.pass;
        report.rows.push_back(std::move(c));
    };

    for (const auto& row : kPaperTableSql) check(Scheme::SQL, row, m_sql);
    for (const auto& row : kPaperTableHql) check(Scheme::HQL, row, m_hql);
    return report;
}

LogLogFit fit_loglog(std::span<const std::pair<double, double>> points)
{
    if (points.size() < 3) throw invalid_argument("fit_loglog needs at least 3 points");
    for (const auto& [x, y] : points) {
        if (!(x > 0.0) || !(y > 0.0))
            throw invalid_argument(fmt::format("fit_loglog needs positive values, got ({}, {})", x, y));
    }

    const double n = static_cast<double>(points.size());
    double mx = 0.0;
    double my = 0.0;
    for (const auto& [x, y] : points) {
        mx += std::log(x);
        my += std::log(y);
    }
    mx /= n;
    my /= n;

    double sxx = 0.0;
    double sxy = 0.0;
    for (const auto& [x, y] : points) {
        const double dx = std::log(x) - mx;
        sxx += dx * dx;
        sxy += dx * (std::log(y) - my);
    }
    if (sxx == 0.0) throw invalid_argument("fit_loglog needs at least two distinct x values");

    LogLogFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    double ssr = 0.0;
    for (const auto& [x, y] : points) {
        const double r = std::log(y) - (fit.intercept + fit.slope * std::log(x));
        ssr += r * r;
        fit.max_abs_residual = std::max(fit.max_abs_residual, std::abs(r));
    }
    fit.slope_stderr = std::sqrt(ssr / (n - 2.0) / sxx);
    return fit;
}

} // namespace wfsim
