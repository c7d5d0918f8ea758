#include <doctest.h>

#include <cmath>
#include <vector>

#include "almi/benchmarks.hpp"
#include "almi/rng.hpp"

using namespace almi;
using namespace almi::bench;

namespace {

BenchmarkId plain(Family family, int dimension) {
    BenchmarkId id;
    id.family = family;
    id.dimension = dimension;
    return id;
}

BenchmarkId rotated(Family family, int dimension, std::uint64_t seed) {
    BenchmarkId id;
    id.family = family;
    id.rotated = true;
    id.dimension = dimension;
    id.rotation_seed = seed;
    return id;
}

} // namespace

TEST_CASE("hand-checked function values") {
    CHECK(evaluate_benchmark(plain(Family::Sphere, 3), {1.0, 2.0, 3.0}) == 14.0);
    CHECK(evaluate_benchmark(plain(Family::Step, 2), {0.4, -0.4}) == 0.0);
    CHECK(evaluate_benchmark(plain(Family::Step, 1), {0.6}) == 1.0);
    // Schwefel 2.22 at (1,-2,3): sum 6, product 6.
    CHECK(evaluate_benchmark(plain(Family::SchwefelP222, 3), {1.0, -2.0, 3.0}) == 12.0);
    // Quadric at (1,2,3): 1 + 9 + 36.
    CHECK(evaluate_benchmark(plain(Family::Quadric, 3), {1.0, 2.0, 3.0}) == 46.0);
    CHECK(evaluate_benchmark(plain(Family::Griewank, 1), {0.0}) == 0.0);
}

TEST_CASE("every deterministic family is optimal at the origin") {
    const Family families[] = {Family::Sphere,    Family::SchwefelP222, Family::Quadric,
                               Family::Step,      Family::Rastrigin,    Family::Ackley,
                               Family::Griewank};
    for (Family family : families) {
        for (int dim : {1, 2, 10}) {
            const std::vector<double> origin(dim, 0.0);
            CHECK(std::abs(evaluate_benchmark(plain(family, dim), origin)) <= 1e-12);
        }
    }
    // The noisy quartic is 0 at the origin for any noise draw.
    CHECK(evaluate_benchmark(plain(Family::NoisyQuartic, 5), std::vector<double>(5, 0.0)) == 0.0);
}

TEST_CASE("every family is non-negative over its box") {
    Rng rng(101);
    for (int f = 1; f <= 8; ++f) {
        const Family family = static_cast<Family>(f);
        const auto [lo, hi] = family_bounds(family);
        BenchmarkFunction fn(plain(family, 5), 7);
        for (int trial = 0; trial < 10000; ++trial) {
            std::vector<double> x(5);
            for (double& v : x) v = rng.uniform(lo, hi);
            CHECK(fn(x) >= 0.0);
        }
    }
}

TEST_CASE("inputs outside bounds or of the wrong length are rejected") {
    BenchmarkFunction sphere(plain(Family::Sphere, 2));
    CHECK_THROWS_AS(sphere({101.0, 0.0}), std::invalid_argument);
    CHECK_THROWS_AS(sphere({0.0}), std::invalid_argument);
    BenchmarkId bad = rotated(Family::Sphere, 2, 1);
    bad.rotation_seed.reset();
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("noisy quartic with unit noise is the plain quartic") {
    Rng rng(5);
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<double> x(4);
        for (double& v : x) v = rng.uniform(-500, 500);
        double expected = 0.0;
        for (double v : x) {
            const double sq = v * v;
            expected += sq * sq;
        }
        CHECK(noisy_quartic(x, [] { return 1.0; }) == expected);
    }
}

TEST_CASE("noisy quartic draws fresh noise per call") {
    BenchmarkFunction fn(plain(Family::NoisyQuartic, 3), 99);
    const std::vector<double> x{1.0, 2.0, 3.0};
    const double first = fn(x);
    const double second = fn(x);
    CHECK(first != second);
    CHECK(fn.noise_free_value(x) == 1.0 + 16.0 + 81.0);
}

TEST_CASE("random orthogonal matrices") {
    SUBCASE("dimension 1 is the identity") {
        const RotationMatrix q = random_orthogonal(1, 42);
        CHECK(q.entries == std::vector<double>{1.0});
    }
    SUBCASE("orthogonality, proper determinant, determinism") {
        for (std::uint64_t seed : {1ull, 7ull, 1234ull}) {
            for (int dim : {2, 5, 10, 20}) {
                const RotationMatrix q = random_orthogonal(dim, seed);
                CHECK(q.orthogonality_error() <= 1e-10);
                CHECK(q.determinant() == doctest::Approx(1.0).epsilon(1e-8));
                const RotationMatrix again = random_orthogonal(dim, seed);
                CHECK(q.entries == again.entries);
            }
        }
    }
    SUBCASE("rotation preserves the sphere") {
        const RotationMatrix q = random_orthogonal(6, 11);
        Rng rng(3);
        for (int trial = 0; trial < 100; ++trial) {
            std::vector<double> x(6);
            for (double& v : x) v = rng.uniform(-10, 10);
            const std::vector<double> y = q.apply(x);
            double nx = 0.0, ny = 0.0;
            for (int d = 0; d < 6; ++d) {
                nx += x[d] * x[d];
                ny += y[d] * y[d];
            }
            CHECK(ny == doctest::Approx(nx).epsilon(1e-10));
        }
    }
}

TEST_CASE("rotated variants") {
    SUBCASE("rotated sphere equals the unrotated sphere pointwise") {
        BenchmarkFunction plain_fn(plain(Family::Sphere, 4));
        BenchmarkFunction rotated_fn(rotated(Family::Sphere, 4, 77));
        Rng rng(9);
        for (int trial = 0; trial < 200; ++trial) {
            std::vector<double> x(4);
            for (double& v : x) v = rng.uniform(-100, 100);
            CHECK(rotated_fn(x) == doctest::Approx(plain_fn(x)).epsilon(1e-9));
        }
    }
    SUBCASE("rotated Rastrigin keeps its optimum at the origin") {
        CHECK(std::abs(evaluate_benchmark(rotated(Family::Rastrigin, 7, 13),
                                          std::vector<double>(7, 0.0))) <= 1e-12);
    }
}

TEST_CASE("registry ids") {
    CHECK(registry_ids().size() == 16);
    const BenchmarkId stf6 = parse_benchmark_id("stf6", 10);
    CHECK(stf6.family == Family::Rastrigin);
    CHECK_FALSE(stf6.rotated);
    const BenchmarkId rf3 = parse_benchmark_id("rf3", 5, 123);
    CHECK(rf3.family == Family::Quadric);
    CHECK(rf3.rotated);
    CHECK(rf3.rotation_seed == 123);
    CHECK(rf3.name() == "rf3");
    CHECK_THROWS_AS(parse_benchmark_id("stf99", 10), std::invalid_argument);
    CHECK_THROWS_AS(parse_benchmark_id("stf0", 10), std::invalid_argument);
    CHECK_THROWS_AS(parse_benchmark_id("nope", 10), std::invalid_argument);
    CHECK_THROWS_AS(parse_benchmark_id("rf1", 10), std::invalid_argument); // missing seed
}

TEST_CASE("objective wrapper carries bounds, optimum, and the noise-free judge") {
    const ObjectiveFunction obj = make_objective(plain(Family::NoisyQuartic, 3), 5);
    CHECK(obj.dimension == 3);
    CHECK(obj.lower_bounds == std::vector<double>(3, -500.0));
    CHECK(obj.upper_bounds == std::vector<double>(3, 500.0));
    CHECK(obj.known_optimum_value == 0.0);
    CHECK(obj.stochastic);
    REQUIRE(obj.success_evaluate);
    CHECK(obj.success_evaluate({1.0, 1.0, 1.0}) == 3.0);

    const ObjectiveFunction sphere = make_objective(plain(Family::Sphere, 2));
    CHECK_FALSE(sphere.stochastic);
    CHECK_FALSE(sphere.success_evaluate);
    CHECK(sphere.evaluate({3.0, 4.0}) == 25.0);
}
