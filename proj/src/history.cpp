#include "almi/history.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace almi {

WeightFunctionSpec WeightFunctionSpec::inverse_exponential() {
    return {Kind::InverseExponential, "inv_exp", [](double t) { return std::exp(-t); }};
}

WeightFunctionSpec WeightFunctionSpec::inverse_cubic() {
    return {Kind::InverseCubic, "inv_cubic", [](double t) { return 1.0 / (t * t * t); }};
}

WeightFunctionSpec WeightFunctionSpec::custom(std::string name, std::function<double(double)> fn) {
    return {Kind::Custom, std::move(name), std::move(fn)};
}

namespace {

/// Archive ordering: lower fitness wins, equal fitness keeps the younger entry.
bool better_entry(const PreservedEntry& a, const PreservedEntry& b) {
    if (a.fitness != b.fitness) return a.fitness < b.fitness;
    return a.birth_iteration > b.birth_iteration;
}

} // namespace

PreservedHistory::PreservedHistory(std::size_t capacity) : capacity_(capacity) {
    if (capacity == 0)
        throw std::invalid_argument("PreservedHistory: capacity must be positive");
}

void PreservedHistory::update(const std::vector<ScoredPoint>& candidates, int iteration) {
    if (iteration < current_iteration_)
        throw std::invalid_argument("PreservedHistory::update: iteration went backwards");

    const std::size_t dim = entries_.empty()
        ? (candidates.empty() ? 0 : candidates.front().coords.size())
        : entries_.front().coords.size();

    for (const ScoredPoint& c : candidates) {
        if (c.coords.size() != dim)
            throw std::invalid_argument("PreservedHistory::update: candidate dimension mismatch");
        if (!std::isfinite(c.fitness)) {
            ++rejected_;
            continue;
        }
        entries_.push_back({c.coords, c.fitness, iteration});
    }

    if (entries_.size() > capacity_) {
        std::stable_sort(entries_.begin(), entries_.end(), better_entry);
        entries_.resize(capacity_);
    }
    current_iteration_ = iteration;
}

std::vector<double> PreservedHistory::standardized_fitness() const {
    if (entries_.empty())
        throw std::invalid_argument("standardized_fitness: empty history");

    const std::size_t n = entries_.size();
    double mean = 0.0;
    for (const auto& e : entries_) mean += e.fitness;
    mean /= static_cast<double>(n);

    double var = 0.0;
    for (const auto& e : entries_) {
        const double d = e.fitness - mean;
        var += d * d;
    }
    var /= static_cast<double>(n);
    const double sigma = std::sqrt(var);

    std::vector<double> t(n, 0.0);
    if (sigma > 0.0)
        for (std::size_t i = 0; i < n; ++i) t[i] = (entries_[i].fitness - mean) / sigma;
    return t;
}

std::vector<double> PreservedHistory::weighted_center(const WeightFunctionSpec& f, double alpha,
                                                      int iteration) const {
    if (entries_.empty())
        throw std::invalid_argument("weighted_center: empty history");
    if (!(alpha > 0.0))
        throw std::invalid_argument("weighted_center: alpha must be positive");

    const std::size_t n = entries_.size();
    const std::size_t dim = entries_.front().coords.size();

    std::vector<double> t = standardized_fitness();
    const double t_min = *std::min_element(t.begin(), t.end());

    std::vector<double> center(dim, 0.0);
    double weight_sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        // Shift so the shaping function sees values >= 1: keeps every weight
        // positive and finite, including for the inverse cubic.
        const double guarded = t[i] - t_min + 1.0;
        const double age = static_cast<double>(iteration - entries_[i].birth_iteration) + 1.0;
        const double w = f.evaluator(guarded) / std::pow(age, alpha);
        if (!std::isfinite(w) || w <= 0.0)
            throw std::runtime_error("weighted_center: non-finite or non-positive weight for entry " +
                                     std::to_string(i));
        weight_sum += w;
        for (std::size_t d = 0; d < dim; ++d) center[d] += w * entries_[i].coords[d];
    }
    if (!std::isfinite(weight_sum) || weight_sum <= 0.0)
        throw std::runtime_error("weighted_center: degenerate weight sum");

    for (double& v : center) v /= weight_sum;
    return center;
}

double PreservedHistory::span_sigma() const {
    if (entries_.empty())
        throw std::invalid_argument("span_sigma: empty history");

    const std::size_t n = entries_.size();
    const std::size_t dim = entries_.front().coords.size();
    double max_sigma = 0.0;
    for (std::size_t d = 0; d < dim; ++d) {
        double mean = 0.0;
        for (const auto& e : entries_) mean += e.coords[d];
        mean /= static_cast<double>(n);
        double var = 0.0;
        for (const auto& e : entries_) {
            const double diff = e.coords[d] - mean;
            var += diff * diff;
        }
        var /= static_cast<double>(n);
        max_sigma = std::max(max_sigma, std::sqrt(var));
    }
    return max_sigma;
}

} // namespace almi
