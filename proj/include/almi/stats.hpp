#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "almi/optimizer.hpp"

namespace almi::stats {

/// Cross-run statistics for one (algorithm, function) cell.
///
/// fv: mean final best value. sr: fraction of successful runs. sp: mean
/// evaluations-to-success among successful runs divided by sr, +inf when no
/// run succeeded.
struct AggregateReport {
    std::string algorithm_id;
    std::string function_id;
    int runs = 0;
    double fv = 0.0;
    double sp = 0.0;
    double sr = 0.0;
    std::optional<int> rank;
};

/// Aggregate run summaries into FV/SP/SR. When known_optimum is given,
/// success is re-judged from each trace at `threshold` above it; otherwise
/// the flags recorded by the run are used as-is.
AggregateReport aggregate(const std::vector<RunSummary>& results, double threshold,
                          std::optional<double> known_optimum = {});

struct TestResult {
    double statistic = 0.0;
    double p_value = 1.0;
    /// Set when the input carried no signal (all-tied rows, zero differences).
    bool degenerate = false;
};

/// Friedman rank test over an n-blocks x k-treatments score matrix, with
/// average ranks for ties and the tie-corrected statistic. p from the
/// chi-squared distribution with k-1 degrees of freedom.
TestResult friedman_test(const std::vector<std::vector<double>>& scores);

/// Two-sided Wilcoxon signed-rank test on paired samples. Zero differences
/// are dropped; the statistic is the smaller signed-rank sum. Exact p (over
/// all sign assignments) for n <= 20, normal approximation with tie
/// correction above.
TestResult wilcoxon_signed_rank(const std::vector<double>& a, const std::vector<double>& b);

/// Average (mid) ranks of a row, ascending; ties share the mean rank.
std::vector<double> average_ranks(const std::vector<double>& values);

/// Fill competition ranks (1 = best fv, ties share, next skips) per
/// function_id group.
void rank_table(std::vector<AggregateReport>& reports);

/// Report CSV: function,algorithm,runs,fv,sp,sr,rank with sp=inf spelled
/// "inf". round-trips through read_report_csv.
void write_report_csv(std::ostream& out, const std::vector<AggregateReport>& reports);
std::vector<AggregateReport> read_report_csv(std::istream& in);

/// Per-function markdown tables with FV/SP/SR/Rank statistic rows, one
/// column per algorithm.
std::string report_markdown(const std::vector<AggregateReport>& reports);

} // namespace almi::stats
