#include "almi/trace_io.hpp"

#include <cmath>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace almi {

namespace {

std::string format_double(double v) {
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

nlohmann::json history_to_json(const PreservedHistory& history) {
    nlohmann::json entries = nlohmann::json::array();
    for (const PreservedEntry& e : history.entries())
        entries.push_back({{"coords", e.coords},
                           {"fitness", e.fitness},
                           {"birth_iteration", e.birth_iteration}});
    return entries;
}

nlohmann::json config_to_json(const OptimizerConfig& cfg) {
    nlohmann::json weight_names = nlohmann::json::array();
    for (const WeightFunctionSpec& f : cfg.weight_functions) weight_names.push_back(f.name);
    return {{"swarm_size", cfg.swarm_size},
            {"memory_size", cfg.memory_size},
            {"alpha", cfg.alpha},
            {"weight_functions", weight_names},
            {"max_evaluations", cfg.max_evaluations},
            {"success_threshold", cfg.success_threshold},
            {"flip_individual_signs", cfg.flip_individual_signs},
            {"history_spacing_fraction", cfg.history_spacing_fraction},
            {"stagnation_generations", cfg.stagnation_generations},
            {"baseline_pso_params",
             {{"inertia", cfg.baseline_pso_params.inertia},
              {"c1", cfg.baseline_pso_params.c1},
              {"c2", cfg.baseline_pso_params.c2}}}};
}

nlohmann::json run_to_json(const OptimizerConfig& cfg, const RunSummary& summary) {
    nlohmann::json trace = nlohmann::json::array();
    for (const TracePoint& point : summary.fitness_trace)
        trace.push_back({point.evaluation_count, point.best_so_far});

    nlohmann::json summary_json = {
        {"best_position", summary.best_position},
        {"best_fitness", summary.best_fitness},
        {"evaluations_used", summary.evaluations_used},
        {"success", summary.success},
        {"diagnostics",
         {{"non_finite_evaluations", summary.diagnostics.non_finite_evaluations},
          {"rejected_history_candidates", summary.diagnostics.rejected_history_candidates},
          {"degenerate_restarts", summary.diagnostics.degenerate_restarts},
          {"revivals", summary.diagnostics.revivals}}}};
    if (summary.evaluations_to_success)
        summary_json["evaluations_to_success"] = *summary.evaluations_to_success;

    return {{"config", config_to_json(cfg)},
            {"seed", cfg.seed},
            {"trace", trace},
            {"summary", summary_json}};
}

void write_trace_csv(std::ostream& out, const RunSummary& summary) {
    out << "evaluation_count,best_so_far\r\n";
    for (const TracePoint& point : summary.fitness_trace)
        out << point.evaluation_count << ',' << format_double(point.best_so_far) << "\r\n";
}

std::vector<TracePoint> read_trace_csv(std::istream& in) {
    std::vector<TracePoint> trace;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (first) {
            first = false;
            if (line.rfind("evaluation_count", 0) == 0) continue;
        }
        const std::size_t comma = line.find(',');
        if (comma == std::string::npos)
            throw std::invalid_argument("trace csv: malformed row: " + line);
        TracePoint point;
        point.evaluation_count = std::stoull(line.substr(0, comma));
        point.best_so_far = std::stod(line.substr(comma + 1));
        trace.push_back(point);
    }
    return trace;
}

void write_series_csv(std::ostream& out, const std::vector<double>& series) {
    out << "value\r\n";
    for (double v : series) out << format_double(v) << "\r\n";
}

std::vector<double> read_series_csv(std::istream& in) {
    std::vector<double> series;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (first) {
            first = false;
            try {
                std::size_t used = 0;
                const double v = std::stod(line, &used);
                if (used == line.size()) series.push_back(v);
                continue; // non-numeric first line is a header
            } catch (const std::exception&) {
                continue;
            }
        }
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(line, &used);
        } catch (const std::exception&) {
            throw std::invalid_argument("series csv: non-numeric row: " + line);
        }
        if (used != line.size())
            throw std::invalid_argument("series csv: malformed row: " + line);
        series.push_back(v);
    }
    return series;
}

} // namespace almi
