#include "almi/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace almi {

OptimizerConfig::OptimizerConfig()
    : weight_functions{WeightFunctionSpec::inverse_exponential(),
                       WeightFunctionSpec::inverse_cubic()} {}

void OptimizerConfig::validate(int dimension) const {
    if (swarm_size < 1) throw std::invalid_argument("config: swarm_size must be positive");
    if (memory_size < 1) throw std::invalid_argument("config: memory_size must be positive");
    if (!(alpha > 0.0)) throw std::invalid_argument("config: alpha must be positive");
    if (weight_functions.empty())
        throw std::invalid_argument("config: at least one weight function required");
    if (2 * weight_function_count() >= swarm_size)
        throw std::invalid_argument("config: need 2 * f_n < swarm_size so selection leaves survivors");
    if (!(success_threshold > 0.0))
        throw std::invalid_argument("config: success_threshold must be positive");
    if (resolved_budget(dimension) < static_cast<std::uint64_t>(swarm_size))
        throw std::invalid_argument("config: budget below one full swarm evaluation");
    if (history_spacing_fraction < 0.0)
        throw std::invalid_argument("config: history_spacing_fraction must be >= 0");
    if (stagnation_generations < 0)
        throw std::invalid_argument("config: stagnation_generations must be >= 0");
}

std::vector<double> backward_center(const std::vector<Particle>& swarm) {
    if (swarm.empty()) throw std::invalid_argument("backward_center: empty swarm");

    const std::size_t dim = swarm.front().position.size();
    double c_min = std::numeric_limits<double>::infinity();
    double c_max = -std::numeric_limits<double>::infinity();
    for (const Particle& p : swarm) {
        c_min = std::min(c_min, p.fitness);
        c_max = std::max(c_max, p.fitness);
    }

    std::vector<double> center(dim, 0.0);
    double weight_sum = 0.0;
    const bool uniform = !(c_max > c_min);
    for (const Particle& p : swarm) {
        // delta keeps the best particle's weight positive so the sum stays a
        // true convex combination.
        const double badness = uniform ? 1.0 : (p.fitness - c_min) / (c_max - c_min) + 1e-12;
        weight_sum += badness;
        for (std::size_t d = 0; d < dim; ++d) center[d] += badness * p.position[d];
    }
    for (double& v : center) v /= weight_sum;
    return center;
}

std::vector<double> collective_reproject(const std::vector<double>& mu_b,
                                         const std::vector<double>& mu_w, double sigma) {
    if (mu_b.size() != mu_w.size())
        throw std::invalid_argument("collective_reproject: center dimension mismatch");

    double norm_sq = 0.0;
    for (std::size_t d = 0; d < mu_b.size(); ++d) {
        const double r = mu_w[d] - mu_b[d];
        norm_sq += r * r;
    }
    const double norm = std::sqrt(norm_sq);
    if (norm < 1e-300) throw DegenerateDirection{};

    const double stretch = 1.0 + sigma / norm;
    std::vector<double> projected(mu_b.size());
    for (std::size_t d = 0; d < mu_b.size(); ++d)
        projected[d] = mu_b[d] + (mu_w[d] - mu_b[d]) * stretch;
    return projected;
}

namespace {

std::vector<double> random_point_in_bounds(const ObjectiveFunction& objective, Rng& rng) {
    std::vector<double> x(objective.dimension);
    for (int d = 0; d < objective.dimension; ++d)
        x[d] = rng.uniform(objective.lower_bounds[d], objective.upper_bounds[d]);
    return x;
}

} // namespace

std::vector<std::vector<double>> generate_collective(const PreservedHistory& history,
                                                     const std::vector<Particle>& swarm,
                                                     const OptimizerConfig& cfg,
                                                     const ObjectiveFunction& objective,
                                                     int iteration, Rng& rng,
                                                     RunDiagnostics* diagnostics) {
    if (history.empty()) throw std::invalid_argument("generate_collective: empty history");

    const std::vector<double> mu_b = backward_center(swarm);
    const double sigma = history.span_sigma();

    std::vector<std::vector<double>> candidates;
    candidates.reserve(2 * cfg.weight_functions.size());
    for (const WeightFunctionSpec& f : cfg.weight_functions) {
        std::vector<double> mu_w = history.weighted_center(f, cfg.alpha, iteration);
        std::vector<double> pair_second;
        try {
            pair_second = collective_reproject(mu_b, mu_w, sigma);
        } catch (const DegenerateDirection&) {
            pair_second = random_point_in_bounds(objective, rng);
            if (diagnostics) ++diagnostics->degenerate_restarts;
        }
        objective.clamp(mu_w);
        objective.clamp(pair_second);
        candidates.push_back(std::move(mu_w));
        candidates.push_back(std::move(pair_second));
    }
    return candidates;
}

Particle individual_update(const Particle& particle,
                           const std::vector<double>& best_neighbor_position,
                           const std::vector<double>& global_best_position,
                           const ObjectiveFunction& objective, Rng& rng, bool flip_signs) {
    const std::size_t dim = particle.position.size();
    if (best_neighbor_position.size() != dim || global_best_position.size() != dim)
        throw std::invalid_argument("individual_update: reference dimension mismatch");

    const double sign = flip_signs ? -1.0 : 1.0;
    Particle moved = particle;
    for (std::size_t d = 0; d < dim; ++d) {
        const double r_global = rng.uniform01();
        const double r_personal = rng.uniform01();
        const double velocity =
            -particle.velocity[d] +
            sign * 2.0 * r_global * (particle.position[d] - global_best_position[d]) +
            sign * 2.0 * r_personal * (particle.position[d] - particle.personal_best_position[d]);
        moved.velocity[d] = velocity;
        moved.position[d] = particle.position[d] + velocity +
                            2.0 * (best_neighbor_position[d] - particle.position[d]);
    }
    objective.clamp(moved.position, &moved.velocity);
    return moved;
}

std::vector<Particle> natural_selection(const std::vector<Particle>& swarm,
                                        const std::vector<Particle>& newcomers) {
    const std::size_t keep = swarm.size();
    std::vector<const Particle*> pool;
    pool.reserve(swarm.size() + newcomers.size());
    for (const Particle& p : swarm) pool.push_back(&p);
    for (const Particle& p : newcomers) pool.push_back(&p);

    std::vector<std::size_t> order(pool.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&pool](std::size_t a, std::size_t b) {
        if (pool[a]->fitness != pool[b]->fitness) return pool[a]->fitness < pool[b]->fitness;
        return pool[a]->birth_iteration > pool[b]->birth_iteration;
    });

    std::vector<bool> survives(pool.size(), false);
    for (std::size_t i = 0; i < keep && i < order.size(); ++i) survives[order[i]] = true;

    std::vector<Particle> result;
    result.reserve(keep);
    for (std::size_t i = 0; i < pool.size(); ++i)
        if (survives[i]) result.push_back(*pool[i]);
    return result;
}

namespace {

/// Budget, trace, and success bookkeeping shared by both engines.
class RunState {
public:
    RunState(const ObjectiveFunction& objective, std::uint64_t budget, double threshold)
        : objective_(objective), budget_(budget), threshold_(threshold) {
        summary_.best_fitness = std::numeric_limits<double>::infinity();
    }

    bool stopped() const { return evaluations_ >= budget_ || summary_.success; }

    /// Evaluate one point, charging the budget and folding the result into
    /// the best-so-far trace. Non-finite objective output becomes +inf.
    double evaluate(const std::vector<double>& x) {
        double value = objective_.evaluate(x);
        ++evaluations_;
        if (!std::isfinite(value)) {
            value = std::numeric_limits<double>::infinity();
            ++summary_.diagnostics.non_finite_evaluations;
        }
        if (value < summary_.best_fitness || summary_.fitness_trace.empty()) {
            summary_.best_fitness = value;
            summary_.best_position = x;
            summary_.fitness_trace.push_back({evaluations_, value});
            check_success(x, value);
        }
        return value;
    }

    RunSummary take_summary() {
        summary_.evaluations_used = evaluations_;
        return std::move(summary_);
    }

    double best_fitness() const { return summary_.best_fitness; }
    RunDiagnostics& diagnostics() { return summary_.diagnostics; }

private:
    void check_success(const std::vector<double>& x, double recorded_value) {
        if (summary_.success || !objective_.known_optimum_value) return;
        const double judged =
            objective_.success_evaluate ? objective_.success_evaluate(x) : recorded_value;
        if (judged <= *objective_.known_optimum_value + threshold_) {
            summary_.success = true;
            summary_.evaluations_to_success = evaluations_;
        }
    }

    const ObjectiveFunction& objective_;
    std::uint64_t budget_;
    double threshold_;
    std::uint64_t evaluations_ = 0;
    RunSummary summary_;
};

std::vector<Particle> init_swarm(const ObjectiveFunction& objective, int swarm_size,
                                 RunState& state, Rng& rng) {
    std::vector<Particle> swarm;
    swarm.reserve(swarm_size);
    for (int i = 0; i < swarm_size && !state.stopped(); ++i) {
        Particle p;
        p.position = random_point_in_bounds(objective, rng);
        p.velocity.assign(objective.dimension, 0.0);
        p.fitness = state.evaluate(p.position);
        p.personal_best_position = p.position;
        p.personal_best_fitness = p.fitness;
        p.birth_iteration = 0;
        swarm.push_back(std::move(p));
    }
    return swarm;
}

/// Personal-best position of the better ring neighbor of particle i.
const std::vector<double>& ring_neighbor_best(const std::vector<Particle>& swarm, std::size_t i) {
    const std::size_t n = swarm.size();
    const Particle& prev = swarm[(i + n - 1) % n];
    const Particle& next = swarm[(i + 1) % n];
    return prev.personal_best_fitness <= next.personal_best_fitness
               ? prev.personal_best_position
               : next.personal_best_position;
}

} // namespace

RunSummary optimize(const ObjectiveFunction& objective, const OptimizerConfig& cfg) {
    objective.validate();
    cfg.validate(objective.dimension);

    Rng rng(cfg.seed);
    RunState state(objective, cfg.resolved_budget(objective.dimension), cfg.success_threshold);
    PreservedHistory history(static_cast<std::size_t>(cfg.memory_size));
    std::uint64_t rejected_candidates = 0;

    std::vector<Particle> swarm = init_swarm(objective, cfg.swarm_size, state, rng);
    std::vector<ScoredPoint> evaluated_this_generation;
    for (const Particle& p : swarm) evaluated_this_generation.push_back({p.position, p.fitness});

    // Reference best for the individual updates. Scoped to the current
    // epoch: revival resets it so a revived swarm is not dragged straight
    // back to the abandoned region. The run-level best lives in RunState.
    std::vector<double> reference_best =
        swarm.empty() ? std::vector<double>{} : swarm.front().position;
    double reference_best_fitness = std::numeric_limits<double>::infinity();
    auto refresh_reference = [&](const std::vector<double>& pos, double fit) {
        if (fit < reference_best_fitness) {
            reference_best_fitness = fit;
            reference_best = pos;
        }
    };
    for (const Particle& p : swarm) refresh_reference(p.position, p.fitness);

    double stall_best = std::numeric_limits<double>::infinity();
    int last_improvement_generation = 0;

    // Feed the archive, skipping points that crowd an existing entry
    // without beating it; near-duplicate refinements carry no geometric
    // information and would flush the span the reprojection relies on.
    auto feed_history = [&](int generation) {
        if (cfg.history_spacing_fraction <= 0.0 || history.empty()) {
            history.update(evaluated_this_generation, generation);
        } else {
            const double gate = cfg.history_spacing_fraction * history.span_sigma();
            std::vector<ScoredPoint> spaced;
            for (ScoredPoint& point : evaluated_this_generation) {
                bool crowded = false;
                for (const PreservedEntry& entry : history.entries()) {
                    double distance = 0.0;
                    for (int d = 0; d < objective.dimension; ++d)
                        distance = std::max(distance, std::abs(point.coords[d] - entry.coords[d]));
                    if (distance < gate && point.fitness >= entry.fitness) {
                        crowded = true;
                        break;
                    }
                }
                if (!crowded) spaced.push_back(std::move(point));
            }
            history.update(spaced, generation);
        }
        evaluated_this_generation.clear();
    };

    for (int generation = 1; !state.stopped(); ++generation) {
        feed_history(generation);

        // Collective step: weighted centers and their reprojections.
        std::vector<Particle> newcomers;
        const auto candidates =
            generate_collective(history, swarm, cfg, objective, generation, rng,
                                &state.diagnostics());
        for (const auto& position : candidates) {
            if (state.stopped()) break;
            Particle p;
            p.position = position;
            p.velocity.assign(objective.dimension, 0.0);
            p.fitness = state.evaluate(position);
            p.personal_best_position = p.position;
            p.personal_best_fitness = p.fitness;
            p.birth_iteration = generation;
            refresh_reference(p.position, p.fitness);
            evaluated_this_generation.push_back({p.position, p.fitness});
            newcomers.push_back(std::move(p));
        }
        if (state.stopped()) break;

        swarm = natural_selection(swarm, newcomers);

        if (state.best_fitness() < stall_best) {
            stall_best = state.best_fitness();
            last_improvement_generation = generation;
        }
        const bool stalled = cfg.stagnation_generations > 0 &&
                             generation - last_improvement_generation >
                                 cfg.stagnation_generations;
        if (stalled) {
            // Revival generation: the individual step re-seeds every
            // particle but the best uniformly and the memory restarts. The
            // literal dynamics are absorbing once swarm, archive, and
            // centers coincide; this is the diversity injection that the
            // degenerate-direction restart was meant to provide.
            std::size_t elite = 0;
            for (std::size_t i = 1; i < swarm.size(); ++i)
                if (swarm[i].personal_best_fitness < swarm[elite].personal_best_fitness)
                    elite = i;
            for (std::size_t i = 0; i < swarm.size(); ++i) {
                if (i == elite || state.stopped()) continue;
                Particle p;
                p.position = random_point_in_bounds(objective, rng);
                p.velocity.assign(objective.dimension, 0.0);
                p.fitness = state.evaluate(p.position);
                p.personal_best_position = p.position;
                p.personal_best_fitness = p.fitness;
                p.birth_iteration = generation;
                evaluated_this_generation.push_back({p.position, p.fitness});
                swarm[i] = std::move(p);
            }
            rejected_candidates += history.rejected_candidates();
            history = PreservedHistory(static_cast<std::size_t>(cfg.memory_size));
            reference_best_fitness = std::numeric_limits<double>::infinity();
            for (const Particle& p : swarm) refresh_reference(p.position, p.fitness);
            last_improvement_generation = generation;
            ++state.diagnostics().revivals;
            continue;
        }

        // Individual step: every particle moves across its best ring neighbor.
        for (std::size_t i = 0; i < swarm.size(); ++i) {
            if (state.stopped()) break;
            const std::vector<double> neighbor = ring_neighbor_best(swarm, i);
            Particle moved =
                individual_update(swarm[i], neighbor, reference_best, objective, rng,
                                  cfg.flip_individual_signs);
            moved.fitness = state.evaluate(moved.position);
            if (moved.fitness < moved.personal_best_fitness) {
                moved.personal_best_fitness = moved.fitness;
                moved.personal_best_position = moved.position;
            }
            refresh_reference(moved.position, moved.fitness);
            evaluated_this_generation.push_back({moved.position, moved.fitness});
            swarm[i] = std::move(moved);
        }
    }

    RunSummary summary = state.take_summary();
    summary.diagnostics.rejected_history_candidates =
        rejected_candidates + history.rejected_candidates();
    return summary;
}

RunSummary baseline_pso(const ObjectiveFunction& objective, const OptimizerConfig& cfg) {
    objective.validate();
    cfg.validate(objective.dimension);

    Rng rng(cfg.seed);
    RunState state(objective, cfg.resolved_budget(objective.dimension), cfg.success_threshold);
    const BaselinePsoParams& params = cfg.baseline_pso_params;

    std::vector<Particle> swarm = init_swarm(objective, cfg.swarm_size, state, rng);
    std::vector<double> global_best;
    double global_best_fitness = std::numeric_limits<double>::infinity();
    for (const Particle& p : swarm)
        if (p.fitness < global_best_fitness) {
            global_best_fitness = p.fitness;
            global_best = p.position;
        }

    while (!state.stopped()) {
        for (Particle& p : swarm) {
            if (state.stopped()) break;
            for (int d = 0; d < objective.dimension; ++d) {
                const double r_social = rng.uniform01();
                const double r_personal = rng.uniform01();
                p.velocity[d] = params.inertia * p.velocity[d] +
                                params.c1 * r_social * (global_best[d] - p.position[d]) +
                                params.c2 * r_personal *
                                    (p.personal_best_position[d] - p.position[d]);
                p.position[d] += p.velocity[d];
            }
            objective.clamp(p.position, &p.velocity);
            p.fitness = state.evaluate(p.position);
            if (p.fitness < p.personal_best_fitness) {
                p.personal_best_fitness = p.fitness;
                p.personal_best_position = p.position;
            }
            if (p.fitness < global_best_fitness) {
                global_best_fitness = p.fitness;
                global_best = p.position;
            }
        }
    }
    return state.take_summary();
}

std::pair<double, double> assumption1_diagnostic(const ObjectiveFunction& objective,
                                                 const std::vector<double>& mu_b,
                                                 const std::vector<double>& mu_w, double epsilon,
                                                 int samples, Rng& rng) {
    if (!(epsilon > 0.0)) throw std::invalid_argument("assumption1: epsilon must be positive");
    if (samples < 100) throw std::invalid_argument("assumption1: need at least 100 samples");

    const int dim = objective.dimension;
    auto ball_mean = [&](const std::vector<double>& center) {
        double total = 0.0;
        std::vector<double> point(dim);
        std::vector<double> direction(dim);
        for (int s = 0; s < samples; ++s) {
            double norm_sq = 0.0;
            for (int d = 0; d < dim; ++d) {
                direction[d] = rng.normal();
                norm_sq += direction[d] * direction[d];
            }
            const double norm = std::sqrt(norm_sq);
            const double radius =
                epsilon * std::pow(rng.uniform01(), 1.0 / static_cast<double>(dim));
            for (int d = 0; d < dim; ++d)
                point[d] = center[d] + (norm > 0.0 ? direction[d] / norm * radius : 0.0);
            objective.clamp(point);
            total += objective.evaluate(point);
        }
        return total / static_cast<double>(samples);
    };

    const double forward = ball_mean(mu_w);
    const double backward = ball_mean(mu_b);
    return {forward, backward};
}

} // namespace almi
