#include "almi/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include <boost/math/special_functions/gamma.hpp>

namespace almi::stats {

namespace {

double chi_squared_upper_tail(double statistic, int degrees_of_freedom) {
    if (statistic <= 0.0) return 1.0;
    return boost::math::gamma_q(degrees_of_freedom / 2.0, statistic / 2.0);
}

double normal_upper_tail(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

std::string format_double(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

AggregateReport aggregate(const std::vector<RunSummary>& results, double threshold,
                          std::optional<double> known_optimum) {
    if (results.empty()) throw std::invalid_argument("aggregate: no runs");
    if (!(threshold > 0.0)) throw std::invalid_argument("aggregate: threshold must be positive");

    AggregateReport report;
    report.runs = static_cast<int>(results.size());

    double fv_sum = 0.0;
    double success_eval_sum = 0.0;
    int successes = 0;
    for (const RunSummary& run : results) {
        fv_sum += run.best_fitness;
        bool success = run.success;
        std::uint64_t evals = run.evaluations_to_success.value_or(run.evaluations_used);
        if (known_optimum) {
            // Re-judge at this threshold from the improvement trace.
            success = false;
            for (const TracePoint& point : run.fitness_trace)
                if (point.best_so_far <= *known_optimum + threshold) {
                    success = true;
                    evals = point.evaluation_count;
                    break;
                }
        }
        if (success) {
            ++successes;
            success_eval_sum += static_cast<double>(evals);
        }
    }

    report.fv = fv_sum / static_cast<double>(report.runs);
    report.sr = static_cast<double>(successes) / static_cast<double>(report.runs);
    report.sp = successes == 0 ? std::numeric_limits<double>::infinity()
                               : (success_eval_sum / successes) / report.sr;
    return report;
}

std::vector<double> average_ranks(const std::vector<double>& values) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&values](std::size_t a, std::size_t b) { return values[a] < values[b]; });

    std::vector<double> ranks(n, 0.0);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
        const double shared = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = shared;
        i = j + 1;
    }
    return ranks;
}

TestResult friedman_test(const std::vector<std::vector<double>>& scores) {
    const std::size_t n = scores.size();
    if (n < 2) throw std::invalid_argument("friedman_test: need at least 2 blocks");
    const std::size_t k = scores.front().size();
    if (k < 2) throw std::invalid_argument("friedman_test: need at least 2 treatments");
    for (const auto& row : scores)
        if (row.size() != k) throw std::invalid_argument("friedman_test: ragged matrix");

    std::vector<double> column_rank_sums(k, 0.0);
    double rank_square_sum = 0.0;
    for (const auto& row : scores) {
        const std::vector<double> ranks = average_ranks(row);
        for (std::size_t j = 0; j < k; ++j) {
            column_rank_sums[j] += ranks[j];
            rank_square_sum += ranks[j] * ranks[j];
        }
    }

    const double nd = static_cast<double>(n);
    const double kd = static_cast<double>(k);
    const double mean_rank_sum = nd * (kd + 1.0) / 2.0;
    double deviation_sq = 0.0;
    for (double rj : column_rank_sums) {
        const double d = rj - mean_rank_sum;
        deviation_sq += d * d;
    }
    // Tie-corrected form; reduces to the classic statistic when no ties.
    const double denominator = rank_square_sum - nd * kd * (kd + 1.0) * (kd + 1.0) / 4.0;

    TestResult result;
    if (denominator <= 1e-12) {
        result.statistic = 0.0;
        result.p_value = 1.0;
        result.degenerate = true;
        return result;
    }
    result.statistic = (kd - 1.0) * deviation_sq / denominator;
    result.p_value = chi_squared_upper_tail(result.statistic, static_cast<int>(k) - 1);
    return result;
}

TestResult wilcoxon_signed_rank(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size() || a.empty())
        throw std::invalid_argument("wilcoxon_signed_rank: paired samples of equal length required");

    std::vector<double> differences;
    differences.reserve(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        if (d != 0.0) differences.push_back(d);
    }

    TestResult result;
    if (differences.empty()) {
        result.degenerate = true;
        result.statistic = 0.0;
        result.p_value = 1.0;
        return result;
    }

    const std::size_t n = differences.size();
    std::vector<double> magnitudes(n);
    for (std::size_t i = 0; i < n; ++i) magnitudes[i] = std::abs(differences[i]);
    const std::vector<double> ranks = average_ranks(magnitudes);

    double positive_sum = 0.0;
    double negative_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        (differences[i] > 0.0 ? positive_sum : negative_sum) += ranks[i];
    const double statistic = std::min(positive_sum, negative_sum);
    result.statistic = statistic;

    if (n <= 20) {
        // Exact two-sided p: distribution of the rank sum over all sign
        // assignments, counted with half-rank resolution so average ranks
        // from ties stay exact.
        std::vector<double> doubled(n);
        for (std::size_t i = 0; i < n; ++i) doubled[i] = 2.0 * ranks[i];
        const std::size_t total = static_cast<std::size_t>(
            std::llround(std::accumulate(doubled.begin(), doubled.end(), 0.0)));
        std::vector<double> count(total + 1, 0.0);
        count[0] = 1.0;
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t step = static_cast<std::size_t>(std::llround(doubled[i]));
            for (std::size_t s = total + 1; s-- > step;) count[s] += count[s - step];
        }
        const std::size_t observed = static_cast<std::size_t>(std::llround(2.0 * statistic));
        double favorable = 0.0;
        for (std::size_t s = 0; s <= total; ++s) {
            const std::size_t mirrored = total - s;
            if (std::min(s, mirrored) <= observed) favorable += count[s];
        }
        result.p_value = std::min(1.0, favorable / std::pow(2.0, static_cast<double>(n)));
    } else {
        // Normal approximation with tie correction.
        const double nd = static_cast<double>(n);
        const double mean = nd * (nd + 1.0) / 4.0;
        double tie_term = 0.0;
        std::vector<double> sorted = magnitudes;
        std::sort(sorted.begin(), sorted.end());
        std::size_t i = 0;
        while (i < n) {
            std::size_t j = i;
            while (j + 1 < n && sorted[j + 1] == sorted[i]) ++j;
            const double t = static_cast<double>(j - i + 1);
            tie_term += t * t * t - t;
            i = j + 1;
        }
        const double variance = nd * (nd + 1.0) * (2.0 * nd + 1.0) / 24.0 - tie_term / 48.0;
        const double z = (statistic - mean) / std::sqrt(variance);
        result.p_value = std::min(1.0, 2.0 * normal_upper_tail(std::abs(z)));
    }
    return result;
}

void rank_table(std::vector<AggregateReport>& reports) {
    std::map<std::string, std::vector<AggregateReport*>> by_function;
    for (AggregateReport& report : reports) by_function[report.function_id].push_back(&report);

    for (auto& [function_id, group] : by_function) {
        std::vector<std::size_t> order(group.size());
        std::iota(order.begin(), order.end(), 0);
        std::stable_sort(order.begin(), order.end(), [&group](std::size_t x, std::size_t y) {
            return group[x]->fv < group[y]->fv;
        });
        // Competition ranking: ties share, following rank skips.
        for (std::size_t i = 0; i < order.size(); ++i) {
            if (i > 0 && group[order[i]]->fv == group[order[i - 1]]->fv)
                group[order[i]]->rank = group[order[i - 1]]->rank;
            else
                group[order[i]]->rank = static_cast<int>(i) + 1;
        }
    }
}

void write_report_csv(std::ostream& out, const std::vector<AggregateReport>& reports) {
    out << "function,algorithm,runs,fv,sp,sr,rank\r\n";
    for (const AggregateReport& r : reports) {
        out << r.function_id << ',' << r.algorithm_id << ',' << r.runs << ','
            << format_double(r.fv) << ',' << format_double(r.sp) << ',' << format_double(r.sr)
            << ',' << (r.rank ? std::to_string(*r.rank) : std::string{}) << "\r\n";
    }
}

std::vector<AggregateReport> read_report_csv(std::istream& in) {
    std::vector<AggregateReport> reports;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (first) {
            first = false;
            if (line.rfind("function,", 0) == 0) continue;
        }
        std::stringstream row(line);
        std::string field;
        AggregateReport r;
        std::getline(row, r.function_id, ',');
        std::getline(row, r.algorithm_id, ',');
        std::getline(row, field, ',');
        r.runs = std::stoi(field);
        std::getline(row, field, ',');
        r.fv = std::stod(field);
        std::getline(row, field, ',');
        r.sp = std::stod(field);
        std::getline(row, field, ',');
        r.sr = std::stod(field);
        if (std::getline(row, field, ',') && !field.empty()) r.rank = std::stoi(field);
        reports.push_back(std::move(r));
    }
    return reports;
}

std::string report_markdown(const std::vector<AggregateReport>& reports) {
    // Keep first-seen order of functions and algorithms.
    std::vector<std::string> functions;
    std::vector<std::string> algorithms;
    for (const AggregateReport& r : reports) {
        if (std::find(functions.begin(), functions.end(), r.function_id) == functions.end())
            functions.push_back(r.function_id);
        if (std::find(algorithms.begin(), algorithms.end(), r.algorithm_id) == algorithms.end())
            algorithms.push_back(r.algorithm_id);
    }

    auto find_cell = [&reports](const std::string& fn, const std::string& algo) {
        for (const AggregateReport& r : reports)
            if (r.function_id == fn && r.algorithm_id == algo) return &r;
        return static_cast<const AggregateReport*>(nullptr);
    };
    auto scientific = [](double v) {
        if (std::isinf(v)) return std::string("Inf");
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.3E", v);
        return std::string(buf);
    };

    std::ostringstream out;
    for (const std::string& fn : functions) {
        out << "## " << fn << "\n\n|Statistic|";
        for (const std::string& algo : algorithms) out << algo << '|';
        out << "\n|---|";
        for (std::size_t i = 0; i < algorithms.size(); ++i) out << "---|";
        out << '\n';

        const char* row_names[] = {"FV", "SP", "SR", "Rank"};
        for (const char* row : row_names) {
            out << '|' << row << '|';
            for (const std::string& algo : algorithms) {
                const AggregateReport* cell = find_cell(fn, algo);
                if (!cell) {
                    out << "n/a|";
                    continue;
                }
                const std::string name(row);
                if (name == "FV") out << scientific(cell->fv);
                else if (name == "SP") out << scientific(cell->sp);
                else if (name == "SR") {
                    char buf[16];
                    std::snprintf(buf, sizeof buf, "%.2f%%", 100.0 * cell->sr);
                    out << buf;
                } else {
                    out << (cell->rank ? std::to_string(*cell->rank) : std::string("-"));
                }
                out << '|';
            }
            out << '\n';
        }
        out << '\n';
    }
    return out.str();
}

} // namespace almi::stats
