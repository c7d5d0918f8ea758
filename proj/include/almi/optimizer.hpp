#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "almi/history.hpp"
#include "almi/objective.hpp"
#include "almi/rng.hpp"

namespace almi {

struct BaselinePsoParams {
    double inertia = 0.729;
    double c1 = 1.49445;
    double c2 = 1.49445;
};

struct OptimizerConfig {
    int swarm_size = 10;
    int memory_size = 60;
    double alpha = 1.0;
    /// Weight shaping functions; the pair count f_n drives how many
    /// collective candidates (2 * f_n) each generation emits.
    std::vector<WeightFunctionSpec> weight_functions;
    /// 0 means "use 10000 * dimension", resolved at run start.
    std::uint64_t max_evaluations = 0;
    double success_threshold = 1e-8;
    std::uint64_t seed = 0;
    BaselinePsoParams baseline_pso_params;
    /// Individual update uses the verbatim repulsive velocity terms by
    /// default; this flips them to attraction (the alternate reading).
    bool flip_individual_signs = false;
    /// Crowding gate for archive feeding, as a fraction of the archive's
    /// span: an evaluated point within that L-inf distance of an entry is
    /// offered only when strictly better than it. Keeps the memory spatially
    /// informative instead of flooding it with near-duplicate refinements.
    /// 0 feeds every evaluated point.
    double history_spacing_fraction = 0.35;
    /// Generations without a new run best before the swarm is revived: the
    /// next individual step re-seeds every particle but the best uniformly
    /// and the archive restarts. 0 disables revival.
    int stagnation_generations = 100;

    OptimizerConfig();

    int weight_function_count() const { return static_cast<int>(weight_functions.size()); }
    std::uint64_t resolved_budget(int dimension) const {
        return max_evaluations == 0 ? 10000ull * static_cast<std::uint64_t>(dimension)
                                    : max_evaluations;
    }
    void validate(int dimension) const;
};

/// Counters for recoverable oddities seen during a run.
struct RunDiagnostics {
    std::uint64_t non_finite_evaluations = 0;
    std::uint64_t rejected_history_candidates = 0;
    std::uint64_t degenerate_restarts = 0;
    std::uint64_t revivals = 0;
};

struct TracePoint {
    std::uint64_t evaluation_count = 0;
    double best_so_far = 0.0;
};

struct RunSummary {
    std::vector<double> best_position;
    double best_fitness = 0.0;
    std::uint64_t evaluations_used = 0;
    std::optional<std::uint64_t> evaluations_to_success;
    bool success = false;
    /// Best-so-far improvements, strictly decreasing in value.
    std::vector<TracePoint> fitness_trace;
    RunDiagnostics diagnostics;
};

/// Thrown by collective_reproject when the two centers coincide and no
/// projection direction exists. The generation step handles it by
/// substituting a uniform random point.
struct DegenerateDirection : std::runtime_error {
    DegenerateDirection() : std::runtime_error("reprojection direction is degenerate") {}
};

/// Badness-weighted swarm mean: worse particles pull harder. Falls back to
/// the plain mean when all fitness values coincide.
std::vector<double> backward_center(const std::vector<Particle>& swarm);

/// Project the bad mean across the weighted center, stretched by the span
/// measure: x = mu_b + r * (1 + sigma / |r|), r = mu_w - mu_b.
std::vector<double> collective_reproject(const std::vector<double>& mu_b,
                                         const std::vector<double>& mu_w, double sigma);

/// Per weight function, emit the history's weighted center and its
/// reprojection from the swarm's bad mean (2 * f_n candidates total, all
/// clamped to bounds; degenerate directions become random restarts).
std::vector<std::vector<double>> generate_collective(const PreservedHistory& history,
                                                     const std::vector<Particle>& swarm,
                                                     const OptimizerConfig& cfg,
                                                     const ObjectiveFunction& objective,
                                                     int iteration, Rng& rng,
                                                     RunDiagnostics* diagnostics = nullptr);

/// Velocity-negating individual move reprojected across the best ring
/// neighbor. Returns the moved particle with stale fitness; the caller
/// re-evaluates and refreshes the personal best.
Particle individual_update(const Particle& particle,
                           const std::vector<double>& best_neighbor_position,
                           const std::vector<double>& global_best_position,
                           const ObjectiveFunction& objective, Rng& rng,
                           bool flip_signs = false);

/// Keep the |swarm| best of swarm + newcomers; equal fitness keeps the
/// younger particle. Survivor order follows the original sequence.
std::vector<Particle> natural_selection(const std::vector<Particle>& swarm,
                                        const std::vector<Particle>& newcomers);

/// Run the history-informed optimizer until the evaluation budget is spent
/// or the best value reaches known_optimum + success_threshold.
RunSummary optimize(const ObjectiveFunction& objective, const OptimizerConfig& cfg);

/// Canonical global-best PSO under the same init/clamp/budget/success
/// contracts; the comparison baseline.
RunSummary baseline_pso(const ObjectiveFunction& objective, const OptimizerConfig& cfg);

/// Monte-Carlo means of the objective over L2 balls of radius epsilon around
/// the forward and backward centers. Diagnostic only; samples are clamped to
/// bounds before evaluation.
std::pair<double, double> assumption1_diagnostic(const ObjectiveFunction& objective,
                                                 const std::vector<double>& mu_b,
                                                 const std::vector<double>& mu_w, double epsilon,
                                                 int samples, Rng& rng);

} // namespace almi
