#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace almi {

/// Swarm member. Minimization convention throughout: lower fitness is better.
struct Particle {
    std::vector<double> position;
    std::vector<double> velocity;
    double fitness = 0.0;
    std::vector<double> personal_best_position;
    double personal_best_fitness = 0.0;
    int birth_iteration = 0;
};

/// One archived elite: where it was found, how good it was, and when.
struct PreservedEntry {
    std::vector<double> coords;
    double fitness = 0.0;
    int birth_iteration = 0;
};

/// (coords, fitness) candidate offered to the archive.
struct ScoredPoint {
    std::vector<double> coords;
    double fitness = 0.0;
};

/// Weight shaping function applied to guarded standardized fitness when
/// computing history centers. Must be strictly decreasing and positive on
/// [1, inf) so that better entries always weigh more.
struct WeightFunctionSpec {
    enum class Kind { InverseExponential, InverseCubic, Custom };

    Kind kind = Kind::InverseExponential;
    std::string name = "inv_exp";
    std::function<double(double)> evaluator;

    static WeightFunctionSpec inverse_exponential();
    static WeightFunctionSpec inverse_cubic();
    static WeightFunctionSpec custom(std::string name, std::function<double(double)> fn);
};

/// Bounded archive of the best points ever offered, with the statistics the
/// optimizer derives from it.
///
/// The archive keeps the `capacity` best-fitness candidates seen so far;
/// equal fitness is resolved in favor of the younger entry (larger
/// birth_iteration). Candidates with non-finite fitness are skipped and
/// counted in rejected_candidates(). Single-writer: only the owning run
/// mutates it, the derived statistics are pure reads.
class PreservedHistory {
public:
    explicit PreservedHistory(std::size_t capacity);

    /// Merge candidates into the archive; new entries are stamped with
    /// `iteration` as their birth. `iteration` must not go backwards.
    void update(const std::vector<ScoredPoint>& candidates, int iteration);

    /// Standardized fitness t_i = (c_i - mean) / population-std for every
    /// entry; all zeros when the stored fitness values have zero variance.
    std::vector<double> standardized_fitness() const;

    /// Weighted center of the archived coordinates. Entry i weighs
    /// f(t~_i) / age_i^alpha, where t~_i is standardized fitness shifted by
    /// (1 - min t) so the shaping function only ever sees values >= 1, and
    /// age_i = iteration - birth_iteration + 1.
    std::vector<double> weighted_center(const WeightFunctionSpec& f, double alpha,
                                        int iteration) const;

    /// Span measure: the largest per-dimension population standard deviation
    /// of the archived coordinates.
    double span_sigma() const;

    const std::vector<PreservedEntry>& entries() const { return entries_; }
    std::size_t capacity() const { return capacity_; }
    std::size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }
    int current_iteration() const { return current_iteration_; }
    /// Count of candidates skipped for non-finite fitness.
    std::uint64_t rejected_candidates() const { return rejected_; }

private:
    std::size_t capacity_;
    std::vector<PreservedEntry> entries_;
    int current_iteration_ = 0;
    std::uint64_t rejected_ = 0;
};

} // namespace almi
