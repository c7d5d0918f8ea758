#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "almi/history.hpp"
#include "almi/optimizer.hpp"

namespace almi {

nlohmann::json history_to_json(const PreservedHistory& history);

nlohmann::json config_to_json(const OptimizerConfig& cfg);

/// Full run record: {config, seed, trace, summary}.
nlohmann::json run_to_json(const OptimizerConfig& cfg, const RunSummary& summary);

/// Trace CSV: evaluation_count,best_so_far. Round-trips via read_trace_csv.
void write_trace_csv(std::ostream& out, const RunSummary& summary);
std::vector<TracePoint> read_trace_csv(std::istream& in);

/// Single-column series CSV, one value per line with a "value" header.
/// read_series_csv also accepts headerless files.
void write_series_csv(std::ostream& out, const std::vector<double>& series);
std::vector<double> read_series_csv(std::istream& in);

} // namespace almi
