#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "almi/history.hpp"
#include "almi/rng.hpp"

using namespace almi;

namespace {

PreservedHistory history_of(std::size_t capacity,
                            const std::vector<std::pair<std::vector<double>, double>>& points,
                            int iteration = 0) {
    PreservedHistory h(capacity);
    std::vector<ScoredPoint> candidates;
    for (const auto& [coords, fitness] : points) candidates.push_back({coords, fitness});
    h.update(candidates, iteration);
    return h;
}

std::vector<double> fitness_values(const PreservedHistory& h) {
    std::vector<double> values;
    for (const auto& e : h.entries()) values.push_back(e.fitness);
    std::sort(values.begin(), values.end());
    return values;
}

/// Independent evaluation of the weighted-center formula: standardize the
/// stored fitness, shift it above 1, shape, divide by age^alpha, average.
std::vector<double> oracle_center(const std::vector<PreservedEntry>& entries,
                                  const std::function<double(double)>& shape, double alpha,
                                  int iteration) {
    const std::size_t n = entries.size();
    double mean = 0.0;
    for (const auto& e : entries) mean += e.fitness / static_cast<double>(n);
    double variance = 0.0;
    for (const auto& e : entries)
        variance += (e.fitness - mean) * (e.fitness - mean) / static_cast<double>(n);
    const double sigma = std::sqrt(variance);

    std::vector<double> t(n, 0.0);
    if (sigma > 0.0)
        for (std::size_t i = 0; i < n; ++i) t[i] = (entries[i].fitness - mean) / sigma;
    const double t_min = *std::min_element(t.begin(), t.end());

    const std::size_t dim = entries.front().coords.size();
    std::vector<double> numerator(dim, 0.0);
    double denominator = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double age = iteration - entries[i].birth_iteration + 1.0;
        const double w = shape(t[i] - t_min + 1.0) / std::pow(age, alpha);
        denominator += w;
        for (std::size_t d = 0; d < dim; ++d) numerator[d] += w * entries[i].coords[d];
    }
    for (double& v : numerator) v /= denominator;
    return numerator;
}

} // namespace

TEST_CASE("history keeps the best candidates") {
    auto h = history_of(3, {{{0.0}, 5.0}, {{1.0}, 2.0}, {{2.0}, 9.0}, {{3.0}, 1.0}});
    CHECK(h.size() == 3);
    CHECK(fitness_values(h) == std::vector<double>{1.0, 2.0, 5.0});
}

TEST_CASE("dominated candidate leaves a full history unchanged") {
    auto h = history_of(3, {{{0.0}, 1.0}, {{1.0}, 2.0}, {{2.0}, 3.0}});
    h.update({{{9.0}, 10.0}}, 1);
    CHECK(fitness_values(h) == std::vector<double>{1.0, 2.0, 3.0});
    CHECK(h.current_iteration() == 1);
}

TEST_CASE("equal fitness evicts the older entry") {
    auto h = history_of(2, {{{0.0}, 1.0}, {{1.0}, 2.0}}, 0);
    h.update({{{5.0}, 2.0}}, 5);
    REQUIRE(h.size() == 2);
    for (const auto& e : h.entries()) {
        if (e.fitness == 2.0) {
            CHECK(e.birth_iteration == 5);
            CHECK(e.coords == std::vector<double>{5.0});
        }
    }
}

TEST_CASE("eviction comparator matches brute force on all small orderings") {
    // A 4-candidate pool with tied fitness, offered one per iteration in
    // every possible order; capacity-2 survivors must match a full sort.
    const std::vector<double> pool = {1.0, 1.0, 2.0, 2.0};
    std::vector<int> index{0, 1, 2, 3};
    do {
        PreservedHistory h(2);
        std::vector<PreservedEntry> offered;
        for (int step = 0; step < 4; ++step) {
            const double fitness = pool[index[step]];
            h.update({{{static_cast<double>(index[step])}, fitness}}, step);
            offered.push_back({{static_cast<double>(index[step])}, fitness, step});
        }
        std::stable_sort(offered.begin(), offered.end(),
                         [](const PreservedEntry& a, const PreservedEntry& b) {
                             if (a.fitness != b.fitness) return a.fitness < b.fitness;
                             return a.birth_iteration > b.birth_iteration;
                         });
        std::vector<std::pair<double, int>> expected;
        for (std::size_t i = 0; i < 2; ++i)
            expected.push_back({offered[i].fitness, offered[i].birth_iteration});
        std::sort(expected.begin(), expected.end());

        std::vector<std::pair<double, int>> got;
        for (const auto& e : h.entries()) got.push_back({e.fitness, e.birth_iteration});
        std::sort(got.begin(), got.end());
        CHECK(got == expected);
    } while (std::next_permutation(index.begin(), index.end()));
}

TEST_CASE("non-finite fitness is skipped and tallied") {
    PreservedHistory h(3);
    h.update({{{0.0}, 1.0},
              {{1.0}, std::numeric_limits<double>::quiet_NaN()},
              {{2.0}, std::numeric_limits<double>::infinity()}},
             0);
    CHECK(h.size() == 1);
    CHECK(h.rejected_candidates() == 2);
}

TEST_CASE("dimension mismatch and backwards iteration are structural errors") {
    auto h = history_of(3, {{{0.0, 0.0}, 1.0}}, 2);
    CHECK_THROWS_AS(h.update({{{1.0}, 2.0}}, 3), std::invalid_argument);
    CHECK_THROWS_AS(h.update({{{1.0, 1.0}, 2.0}}, 1), std::invalid_argument);
}

TEST_CASE("standardized fitness") {
    SUBCASE("zero variance gives zeros") {
        auto h = history_of(4, {{{0.0}, 7.0}, {{1.0}, 7.0}, {{2.0}, 7.0}});
        for (double t : h.standardized_fitness()) CHECK(t == 0.0);
    }
    SUBCASE("population standardization of {1,2,3}") {
        auto h = history_of(4, {{{0.0}, 1.0}, {{1.0}, 2.0}, {{2.0}, 3.0}});
        const auto t = h.standardized_fitness();
        REQUIRE(t.size() == 3);
        CHECK(t[0] == doctest::Approx(-1.224744871391589).epsilon(1e-12));
        CHECK(t[1] == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(t[2] == doctest::Approx(1.224744871391589).epsilon(1e-12));
    }
    SUBCASE("single entry") {
        auto h = history_of(4, {{{0.0}, 4.0}});
        CHECK(h.standardized_fitness() == std::vector<double>{0.0});
    }
    SUBCASE("empty history is a precondition error") {
        PreservedHistory h(4);
        CHECK_THROWS_AS(h.standardized_fitness(), std::invalid_argument);
    }
}

TEST_CASE("standardized fitness has mean 0 and population variance 1") {
    Rng rng(11);
    for (int trial = 0; trial < 150; ++trial) {
        const int n = 2 + static_cast<int>(rng.uniform01() * 20);
        std::vector<std::pair<std::vector<double>, double>> points;
        for (int i = 0; i < n; ++i) points.push_back({{rng.uniform(-5, 5)}, rng.uniform(-100, 100)});
        auto h = history_of(64, points);
        const auto t = h.standardized_fitness();
        double mean = 0.0, var = 0.0;
        for (double v : t) mean += v / t.size();
        for (double v : t) var += (v - mean) * (v - mean) / t.size();
        const bool degenerate = std::all_of(t.begin(), t.end(), [](double v) { return v == 0.0; });
        CHECK(std::abs(mean) < 1e-12);
        if (!degenerate) CHECK(std::abs(var - 1.0) < 1e-12);
    }
}

TEST_CASE("weighted center basics") {
    SUBCASE("symmetry forces the midpoint") {
        auto h = history_of(4, {{{0.0, 0.0}, 3.0}, {{2.0, 0.0}, 3.0}});
        const auto c = h.weighted_center(WeightFunctionSpec::inverse_exponential(), 1.0, 0);
        CHECK(c[0] == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(c[1] == doctest::Approx(0.0).epsilon(1e-12));
    }
    SUBCASE("single entry is its own center") {
        auto h = history_of(4, {{{3.0, -1.0}, 8.0}});
        const auto c = h.weighted_center(WeightFunctionSpec::inverse_cubic(), 2.0, 7);
        CHECK(c == std::vector<double>{3.0, -1.0});
    }
    SUBCASE("three entries pull toward the best, matching the oracle") {
        auto h = history_of(4, {{{0.0}, 1.0}, {{1.0}, 2.0}, {{2.0}, 3.0}});
        const auto c = h.weighted_center(WeightFunctionSpec::inverse_exponential(), 1.0, 0);
        CHECK(c[0] < 1.0);
        const auto expected =
            oracle_center(h.entries(), [](double t) { return std::exp(-t); }, 1.0, 0);
        CHECK(c[0] == doctest::Approx(expected[0]).epsilon(1e-12));
        // Frozen oracle output.
        CHECK(c[0] == doctest::Approx(0.3380075053686596).epsilon(1e-12));
    }
    SUBCASE("empty history is a precondition error") {
        PreservedHistory h(4);
        CHECK_THROWS_AS(h.weighted_center(WeightFunctionSpec::inverse_exponential(), 1.0, 0),
                        std::invalid_argument);
    }
    SUBCASE("non-finite custom weight names the offending entry") {
        auto h = history_of(4, {{{0.0}, 1.0}, {{1.0}, 2.0}});
        auto bad = WeightFunctionSpec::custom("bad", [](double) { return std::nan(""); });
        CHECK_THROWS_WITH_AS(h.weighted_center(bad, 1.0, 0),
                             doctest::Contains("entry 0"), std::runtime_error);
    }
}

TEST_CASE("weighted center agrees with the oracle and stays in the bounding box") {
    Rng rng(23);
    const WeightFunctionSpec shapes[] = {WeightFunctionSpec::inverse_exponential(),
                                         WeightFunctionSpec::inverse_cubic()};
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 1 + static_cast<int>(rng.uniform01() * 12);
        const int dim = 1 + static_cast<int>(rng.uniform01() * 4);
        const int iteration = 5 + static_cast<int>(rng.uniform01() * 10);
        PreservedHistory h(32);
        int birth = 0;
        for (int i = 0; i < n; ++i) {
            std::vector<double> coords(dim);
            for (double& v : coords) v = rng.uniform(-10, 10);
            h.update({{coords, rng.uniform(-50, 50)}}, birth);
            if (birth < iteration && rng.uniform01() < 0.5) ++birth;
        }
        const auto& shape = shapes[trial % 2];
        const double alpha = rng.uniform(0.1, 3.0);
        const auto c = h.weighted_center(shape, alpha, iteration);
        const auto expected = oracle_center(h.entries(), shape.evaluator, alpha, iteration);
        for (int d = 0; d < dim; ++d) {
            CHECK(c[d] == doctest::Approx(expected[d]).epsilon(1e-9));
            double lo = 1e300, hi = -1e300;
            for (const auto& e : h.entries()) {
                lo = std::min(lo, e.coords[d]);
                hi = std::max(hi, e.coords[d]);
            }
            CHECK(c[d] >= lo - 1e-9);
            CHECK(c[d] <= hi + 1e-9);
        }
    }
}

TEST_CASE("raising alpha shrinks an aged entry's relative weight") {
    Rng rng(37);
    for (int trial = 0; trial < 120; ++trial) {
        // Two entries: a young one at 0 and an older one at 1. The center's
        // coordinate equals the older entry's relative weight.
        const int old_birth = 0;
        const int iteration = 1 + static_cast<int>(rng.uniform01() * 20); // age > 1
        PreservedHistory h(4);
        h.update({{{1.0}, rng.uniform(-5, 5)}}, old_birth);
        h.update({{{0.0}, rng.uniform(-5, 5)}}, iteration);
        const double alpha_low = rng.uniform(0.1, 1.5);
        const double alpha_high = alpha_low + rng.uniform(0.1, 2.0);
        const auto& shape = trial % 2 ? WeightFunctionSpec::inverse_cubic()
                                      : WeightFunctionSpec::inverse_exponential();
        const double weight_low = h.weighted_center(shape, alpha_low, iteration)[0];
        const double weight_high = h.weighted_center(shape, alpha_high, iteration)[0];
        CHECK(weight_high < weight_low);
    }
}

TEST_CASE("span sigma") {
    SUBCASE("coincident entries span zero") {
        auto h = history_of(4, {{{1.0, 2.0}, 0.0}, {{1.0, 2.0}, 1.0}});
        CHECK(h.span_sigma() == 0.0);
    }
    SUBCASE("hand-checked two-point spans") {
        CHECK(history_of(4, {{{0.0, 0.0}, 0.0}, {{2.0, 0.0}, 1.0}}).span_sigma() ==
              doctest::Approx(1.0).epsilon(1e-12));
        CHECK(history_of(4, {{{0.0, 0.0}, 0.0}, {{0.0, 6.0}, 1.0}}).span_sigma() ==
              doctest::Approx(3.0).epsilon(1e-12));
    }
    SUBCASE("empty history is a precondition error") {
        PreservedHistory h(4);
        CHECK_THROWS_AS(h.span_sigma(), std::invalid_argument);
    }
}

TEST_CASE("span sigma is translation invariant and scales linearly") {
    Rng rng(53);
    for (int trial = 0; trial < 150; ++trial) {
        const int n = 1 + static_cast<int>(rng.uniform01() * 10);
        const int dim = 1 + static_cast<int>(rng.uniform01() * 4);
        std::vector<double> shift(dim);
        for (double& v : shift) v = rng.uniform(-100, 100);
        const double scale = rng.uniform(0.1, 10.0);

        PreservedHistory base(32), shifted(32), scaled(32);
        for (int i = 0; i < n; ++i) {
            std::vector<double> coords(dim), moved(dim), grown(dim);
            for (int d = 0; d < dim; ++d) {
                coords[d] = rng.uniform(-10, 10);
                moved[d] = coords[d] + shift[d];
                grown[d] = coords[d] * scale;
            }
            base.update({{coords, 0.0}}, 0);
            shifted.update({{moved, 0.0}}, 0);
            scaled.update({{grown, 0.0}}, 0);
        }
        CHECK(shifted.span_sigma() == doctest::Approx(base.span_sigma()).epsilon(1e-9));
        CHECK(scaled.span_sigma() == doctest::Approx(base.span_sigma() * scale).epsilon(1e-9));
    }
}

TEST_CASE("capacity and best-multiset hold under random replay") {
    Rng rng(71);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t capacity = 1 + static_cast<std::size_t>(rng.uniform01() * 8);
        PreservedHistory h(capacity);
        std::vector<double> offered_finite;
        const int batches = 1 + static_cast<int>(rng.uniform01() * 6);
        int iteration = 0;
        for (int b = 0; b < batches; ++b) {
            std::vector<ScoredPoint> batch;
            const int count = static_cast<int>(rng.uniform01() * 18);
            for (int i = 0; i < count; ++i) {
                double fitness = rng.uniform(-10, 10);
                if (rng.uniform01() < 0.05) fitness = std::nan("");
                batch.push_back({{rng.uniform(-1, 1)}, fitness});
                if (std::isfinite(fitness)) offered_finite.push_back(fitness);
            }
            h.update(batch, iteration++);
            CHECK(h.size() <= capacity);
        }
        std::sort(offered_finite.begin(), offered_finite.end());
        if (offered_finite.size() > capacity) offered_finite.resize(capacity);
        CHECK(fitness_values(h) == offered_finite);
    }
}
