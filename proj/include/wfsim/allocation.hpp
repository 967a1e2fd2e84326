#pragma once

#include "wfsim/measurement.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace wfsim {

/// Two-term power law δ² = (a/n2^p)² + (c/n1^q)².
struct ErrorModel {
    double a_stat = kFittedPhaseNoise;
    double p_stat = 0.5;
    double c_det = 0.04;
    double q = 1.0;

    /// Fitted constants of the standard scheme: a = 0.0555, p = 1/2, c = 0.04, q = 1.
    static ErrorModel sql_fitted();
    /// Fitted constants of the correlated scheme: a = 0.0555, p = 1, c = 0.04, q = 1.
    static ErrorModel hql_fitted();
    static ErrorModel fitted(Scheme s);

    void validate() const;
    double predicted_delta_sq(double n1, double n2) const;
};

struct Allocation {
    std::uint64_t n1 = 1;
    std::uint64_t n2 = 1;
    std::uint64_t N = 1;        // budget; n1·n2 == N unless `budget` is set
    double predicted_delta_sq = 0.0;
    bool budget = false;        // n1·n2 < N
};

struct AllocationOptions {
    bool even_n2 = false; // correlated scheme: n2 = 2k
};

/// Real-valued stationary point of f(n1) = a²(n1/N)^{2p} + c²n1^{−2q}, clamped to [1, N].
double continuous_optimum(const ErrorModel& m, std::uint64_t N);

struct AllocationResult {
    Allocation best;                // minimizer over divisor pairs n1·n2 = N
    std::optional<Allocation> budget; // set when some n1·n2 ≤ N beats `best`
};

/// Exhaustive search over divisor pairs, plus the best budget-mode pair
/// (n1·n2 ≤ N) when it predicts a lower error. Throws invalid_argument when
/// no divisor pair satisfies the options (e.g. odd N with even_n2).
AllocationResult optimize_exact(const ErrorModel& m, std::uint64_t N, AllocationOptions opts = {});

/// Best pair with n1·n2 ≤ N.
Allocation optimize_budget(const ErrorModel& m, std::uint64_t N, AllocationOptions opts = {});

/// Round the continuous optimum: n1 = round(n1*), n2 = N / n1 (integer division).
Allocation rounded_allocation(const ErrorModel& m, std::uint64_t N);

/// Asymptotic rule used for the published SQL table: n1 = round((2N)^{1/3}).
Allocation paper_rule_sql(const ErrorModel& m, std::uint64_t N);

struct TableEntry {
    std::uint64_t N, n1, n2;
};

/// Published optimal allocations.
inline constexpr std::array<TableEntry, 9> kPaperTableSql{{
    {4, 2, 2}, {32, 4, 8}, {60, 5, 12}, {168, 7, 24}, {480, 10, 48},
    {840, 12, 70}, {1066, 13, 82}, {1984, 16, 124}, {2380, 17, 140},
}};
inline constexpr std::array<TableEntry, 12> kPaperTableHql{{
    {12, 3, 4}, {140, 10, 14}, {234, 13, 18}, {408, 17, 24}, {560, 20, 28}, {736, 23, 32},
    {1026, 27, 38}, {1260, 30, 42}, {1518, 33, 46}, {1924, 37, 52}, {2240, 40, 56}, {2580, 43, 60},
}};

/// Relative δ² slack allowed for the published SQL rows.
inline constexpr double kSqlTableTolerance = 0.06;

struct TableRowCheck {
    Scheme scheme = Scheme::SQL;
    TableEntry row{};
    bool product_ok = false;
    double predicted_delta_sq = 0.0;
    Allocation optimum;          // exhaustive divisor-pair optimum
    double ratio_to_optimum = 0.0;
    Allocation rule;             // rounded continuous optimum (HQL) or cube-root rule (SQL)
    bool rule_match = false;
    std::string status;          // "exact-match", "within-6%", or "FAIL"
    bool pass = false;
};

struct TableReport {
    std::vector<TableRowCheck> rows;
    bool all_pass = false;
};

TableReport validate_paper_tables(const ErrorModel& m_sql, const ErrorModel& m_hql);

struct LogLogFit {
    double slope = 0.0;
    double intercept = 0.0;
    double slope_stderr = 0.0;
    double max_abs_residual = 0.0;
};

/// Ordinary least squares on (log x, log y). Needs ≥ 3 points, all positive.
LogLogFit fit_loglog(std::span<const std::pair<double, double>> points);

} // namespace wfsim
