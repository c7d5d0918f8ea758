#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "almi/objective.hpp"
#include "almi/rng.hpp"

namespace almi::bench {

enum class Family : int {
    Sphere = 1,       // stf1
    SchwefelP222 = 2, // stf2
    Quadric = 3,      // stf3
    Step = 4,         // stf4
    NoisyQuartic = 5, // stf5
    Rastrigin = 6,    // stf6
    Ackley = 7,       // stf7
    Griewank = 8,     // stf8
};

struct BenchmarkId {
    Family family = Family::Sphere;
    bool rotated = false;
    int dimension = 10;
    std::optional<std::uint64_t> rotation_seed;

    void validate() const;
    std::string name() const; // "stf3" / "rf3"
};

/// Proper rotation (orthogonal, det +1), stored row-major.
struct RotationMatrix {
    int dim = 0;
    std::vector<double> entries;

    std::vector<double> apply(const std::vector<double>& x) const;
    /// max-norm of Q^T Q - I.
    double orthogonality_error() const;
    double determinant() const;
};

/// Seeded rotation: orthogonalized standard-Gaussian matrix with the sign of
/// one column corrected so the determinant is +1.
RotationMatrix random_orthogonal(int dimension, std::uint64_t seed);

/// Noisy quartic with an injectable noise source; one draw per coordinate.
/// With a constant-1 source this is exactly sum(x_i^4).
double noisy_quartic(const std::vector<double>& x, const std::function<double()>& noise);

/// Per-family box bounds, identical in every dimension.
std::pair<double, double> family_bounds(Family family);

/// Callable benchmark. Owns the rotation (when rotated) and, for the noisy
/// quartic, its own seeded noise stream.
class BenchmarkFunction {
public:
    explicit BenchmarkFunction(BenchmarkId id, std::uint64_t noise_seed = 0);

    /// Evaluate at x; throws if x is outside bounds or of the wrong length.
    double operator()(const std::vector<double>& x);

    /// Value with the noise stream held at 1 (identity for deterministic
    /// families). Used to judge success on the noisy quartic.
    double noise_free_value(const std::vector<double>& x) const;

    const BenchmarkId& id() const { return id_; }

private:
    BenchmarkId id_;
    RotationMatrix rotation_; // dim 0 when not rotated
    Rng noise_;
};

/// Wrap a benchmark as a run-ready objective. The noisy quartic gets its own
/// stream seeded with noise_seed, so concurrent runs must use distinct seeds.
ObjectiveFunction make_objective(const BenchmarkId& id, std::uint64_t noise_seed = 0);

/// One-shot evaluation; convenience for tests and spot checks.
double evaluate_benchmark(const BenchmarkId& id, const std::vector<double>& x);

/// Parse "stf1".."stf8" / "rf1".."rf8" into an id. Rotated ids require a
/// rotation seed. Throws std::invalid_argument for unknown names.
BenchmarkId parse_benchmark_id(const std::string& name, int dimension,
                               std::optional<std::uint64_t> rotation_seed = {});

/// All addressable function names.
std::vector<std::string> registry_ids();

} // namespace almi::bench
