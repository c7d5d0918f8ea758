#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "almi/optimizer.hpp"

namespace almi::cli {

/// One algorithm column of an experiment: engine id plus the optimizer
/// parameters it runs with.
struct AlgorithmSpec {
    std::string id;    // "almi" or "baseline-pso"
    std::string label; // column name in reports; defaults to id
    OptimizerConfig config;
};

struct ExperimentConfig {
    std::vector<std::string> functions;
    std::vector<AlgorithmSpec> algorithms;
    int dimension = 10;
    int runs = 30;
    std::uint64_t budget = 0; // 0 -> 10000 * dimension
    double threshold = 1e-8;
    std::uint64_t base_seed = 1;
    std::uint64_t rotation_seed = 2024;
    std::string output_dir = "bench_out";

    static ExperimentConfig from_json(const nlohmann::json& j);
    void validate() const;

    /// Position-derived seed: independent of execution order.
    std::uint64_t run_seed(const std::string& function_id, const std::string& algorithm_label,
                           int run_index) const;
};

/// Entry point used by both the binary and the tests. Returns the process
/// exit code (0 ok, 2 invalid configuration or input).
int run_cli(int argc, const char* const* argv);

} // namespace almi::cli
