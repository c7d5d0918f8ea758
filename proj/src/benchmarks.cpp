#include "almi/benchmarks.hpp"

#include <cmath>
#include <stdexcept>

namespace almi::bench {

void BenchmarkId::validate() const {
    if (dimension < 1) throw std::invalid_argument("benchmark: dimension must be >= 1");
    if (rotated && !rotation_seed)
        throw std::invalid_argument("benchmark: rotated variant requires a rotation seed");
}

std::string BenchmarkId::name() const {
    return (rotated ? "rf" : "stf") + std::to_string(static_cast<int>(family));
}

std::vector<double> RotationMatrix::apply(const std::vector<double>& x) const {
    std::vector<double> y(dim, 0.0);
    for (int i = 0; i < dim; ++i) {
        double acc = 0.0;
        for (int j = 0; j < dim; ++j) acc += entries[i * dim + j] * x[j];
        y[i] = acc;
    }
    return y;
}

double RotationMatrix::orthogonality_error() const {
    double worst = 0.0;
    for (int i = 0; i < dim; ++i)
        for (int j = 0; j < dim; ++j) {
            double dot = 0.0;
            for (int k = 0; k < dim; ++k) dot += entries[k * dim + i] * entries[k * dim + j];
            worst = std::max(worst, std::abs(dot - (i == j ? 1.0 : 0.0)));
        }
    return worst;
}

double RotationMatrix::determinant() const {
    // LU with partial pivoting on a scratch copy.
    std::vector<double> m = entries;
    double det = 1.0;
    for (int col = 0; col < dim; ++col) {
        int pivot = col;
        for (int row = col + 1; row < dim; ++row)
            if (std::abs(m[row * dim + col]) > std::abs(m[pivot * dim + col])) pivot = row;
        if (m[pivot * dim + col] == 0.0) return 0.0;
        if (pivot != col) {
            for (int j = 0; j < dim; ++j) std::swap(m[col * dim + j], m[pivot * dim + j]);
            det = -det;
        }
        det *= m[col * dim + col];
        for (int row = col + 1; row < dim; ++row) {
            const double factor = m[row * dim + col] / m[col * dim + col];
            for (int j = col; j < dim; ++j) m[row * dim + j] -= factor * m[col * dim + j];
        }
    }
    return det;
}

RotationMatrix random_orthogonal(int dimension, std::uint64_t seed) {
    if (dimension < 1) throw std::invalid_argument("random_orthogonal: dimension must be >= 1");

    Rng rng(seed);
    RotationMatrix q;
    q.dim = dimension;
    q.entries.assign(static_cast<std::size_t>(dimension) * dimension, 0.0);
    for (double& v : q.entries) v = rng.normal();

    // Modified Gram-Schmidt over columns, run twice for orthogonality well
    // below the 1e-10 contract.
    auto column_dot = [&](int a, int b) {
        double acc = 0.0;
        for (int r = 0; r < dimension; ++r) acc += q.entries[r * dimension + a] * q.entries[r * dimension + b];
        return acc;
    };
    for (int pass = 0; pass < 2; ++pass) {
        for (int col = 0; col < dimension; ++col) {
            for (int prev = 0; prev < col; ++prev) {
                const double proj = column_dot(col, prev);
                for (int r = 0; r < dimension; ++r)
                    q.entries[r * dimension + col] -= proj * q.entries[r * dimension + prev];
            }
            const double norm = std::sqrt(column_dot(col, col));
            if (norm < 1e-12) {
                // A dependent draw is astronomically unlikely; re-roll the column.
                for (int r = 0; r < dimension; ++r) q.entries[r * dimension + col] = rng.normal();
                --col;
                continue;
            }
            for (int r = 0; r < dimension; ++r) q.entries[r * dimension + col] /= norm;
        }
    }

    if (q.determinant() < 0.0)
        for (int r = 0; r < dimension; ++r) q.entries[r * dimension + (dimension - 1)] *= -1.0;
    return q;
}

double noisy_quartic(const std::vector<double>& x, const std::function<double()>& noise) {
    double total = 0.0;
    for (double v : x) {
        const double sq = v * v;
        total += noise() * sq * sq;
    }
    return total;
}

std::pair<double, double> family_bounds(Family family) {
    switch (family) {
        case Family::Sphere: return {-100.0, 100.0};
        case Family::SchwefelP222: return {-10.0, 10.0};
        case Family::Quadric: return {-100.0, 100.0};
        case Family::Step: return {-100.0, 100.0};
        case Family::NoisyQuartic: return {-500.0, 500.0};
        case Family::Rastrigin: return {-5.12, 5.12};
        case Family::Ackley: return {-32.0, 32.0};
        case Family::Griewank: return {-600.0, 600.0};
    }
    throw std::invalid_argument("family_bounds: unknown family");
}

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

double sphere(const std::vector<double>& x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return s;
}

double schwefel_p222(const std::vector<double>& x) {
    double sum = 0.0;
    double prod = 1.0;
    for (double v : x) {
        sum += std::abs(v);
        prod *= std::abs(v);
    }
    return sum + prod;
}

double quadric(const std::vector<double>& x) {
    double total = 0.0;
    double prefix = 0.0;
    for (double v : x) {
        prefix += v;
        total += prefix * prefix;
    }
    return total;
}

double step(const std::vector<double>& x) {
    double total = 0.0;
    for (double v : x) {
        const double t = std::floor(v + 0.5);
        total += t * t;
    }
    return total;
}

double rastrigin(const std::vector<double>& x) {
    const double n = static_cast<double>(x.size());
    double total = 10.0 * n;
    for (double v : x) total += v * v - 10.0 * std::cos(kTwoPi * v);
    return total;
}

double ackley(const std::vector<double>& x) {
    const double n = static_cast<double>(x.size());
    double sq = 0.0;
    double cs = 0.0;
    for (double v : x) {
        sq += v * v;
        cs += std::cos(kTwoPi * v);
    }
    return -20.0 * std::exp(-0.2 * std::sqrt(sq / n)) - std::exp(cs / n) + 20.0 + std::exp(1.0);
}

double griewank(const std::vector<double>& x) {
    double sq = 0.0;
    double prod = 1.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sq += x[i] * x[i];
        prod *= std::cos(x[i] / std::sqrt(static_cast<double>(i + 1)));
    }
    return 1.0 + sq / 4000.0 - prod;
}

} // namespace

BenchmarkFunction::BenchmarkFunction(BenchmarkId id, std::uint64_t noise_seed)
    : id_(id), noise_(noise_seed) {
    id_.validate();
    if (id_.rotated) rotation_ = random_orthogonal(id_.dimension, *id_.rotation_seed);
}

double BenchmarkFunction::operator()(const std::vector<double>& x) {
    if (static_cast<int>(x.size()) != id_.dimension)
        throw std::invalid_argument("benchmark: input dimension mismatch");
    const auto [lo, hi] = family_bounds(id_.family);
    for (double v : x)
        if (v < lo || v > hi) throw std::invalid_argument("benchmark: input outside bounds");

    const std::vector<double>& z = id_.rotated ? rotation_.apply(x) : x;
    switch (id_.family) {
        case Family::Sphere: return sphere(z);
        case Family::SchwefelP222: return schwefel_p222(z);
        case Family::Quadric: return quadric(z);
        case Family::Step: return step(z);
        case Family::NoisyQuartic: return noisy_quartic(z, [this] { return noise_.uniform01(); });
        case Family::Rastrigin: return rastrigin(z);
        case Family::Ackley: return ackley(z);
        case Family::Griewank: return griewank(z);
    }
    throw std::invalid_argument("benchmark: unknown family");
}

double BenchmarkFunction::noise_free_value(const std::vector<double>& x) const {
    const std::vector<double>& z = id_.rotated ? rotation_.apply(x) : x;
    if (id_.family == Family::NoisyQuartic) return noisy_quartic(z, [] { return 1.0; });
    switch (id_.family) {
        case Family::Sphere: return sphere(z);
        case Family::SchwefelP222: return schwefel_p222(z);
        case Family::Quadric: return quadric(z);
        case Family::Step: return step(z);
        case Family::Rastrigin: return rastrigin(z);
        case Family::Ackley: return ackley(z);
        case Family::Griewank: return griewank(z);
        default: break;
    }
    throw std::invalid_argument("benchmark: unknown family");
}

ObjectiveFunction make_objective(const BenchmarkId& id, std::uint64_t noise_seed) {
    id.validate();
    auto fn = std::make_shared<BenchmarkFunction>(id, noise_seed);
    const auto [lo, hi] = family_bounds(id.family);

    ObjectiveFunction objective;
    objective.dimension = id.dimension;
    objective.lower_bounds.assign(id.dimension, lo);
    objective.upper_bounds.assign(id.dimension, hi);
    objective.known_optimum_value = 0.0;
    objective.stochastic = id.family == Family::NoisyQuartic;
    objective.evaluate = [fn](const std::vector<double>& x) { return (*fn)(x); };
    if (objective.stochastic)
        objective.success_evaluate = [fn](const std::vector<double>& x) {
            return fn->noise_free_value(x);
        };
    return objective;
}

double evaluate_benchmark(const BenchmarkId& id, const std::vector<double>& x) {
    return BenchmarkFunction(id)(x);
}

BenchmarkId parse_benchmark_id(const std::string& name, int dimension,
                               std::optional<std::uint64_t> rotation_seed) {
    bool rotated = false;
    std::size_t digits = 0;
    if (name.rfind("stf", 0) == 0) {
        digits = 3;
    } else if (name.rfind("rf", 0) == 0) {
        rotated = true;
        digits = 2;
    } else {
        throw std::invalid_argument("unknown benchmark id: " + name);
    }
    if (name.size() != digits + 1 || name[digits] < '1' || name[digits] > '8')
        throw std::invalid_argument("unknown benchmark id: " + name);

    BenchmarkId id;
    id.family = static_cast<Family>(name[digits] - '0');
    id.rotated = rotated;
    id.dimension = dimension;
    id.rotation_seed = rotated ? rotation_seed : std::nullopt;
    id.validate();
    return id;
}

std::vector<std::string> registry_ids() {
    std::vector<std::string> ids;
    for (int i = 1; i <= 8; ++i) ids.push_back("stf" + std::to_string(i));
    for (int i = 1; i <= 8; ++i) ids.push_back("rf" + std::to_string(i));
    return ids;
}

} // namespace almi::bench
