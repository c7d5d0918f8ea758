#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <vector>

namespace almi {

/// Box-constrained objective to minimize.
struct ObjectiveFunction {
    int dimension = 0;
    std::vector<double> lower_bounds;
    std::vector<double> upper_bounds;
    std::optional<double> known_optimum_value;
    bool stochastic = false;
    std::function<double(const std::vector<double>&)> evaluate;
    /// Optional noise-free value used only for success judgment on stochastic
    /// objectives; never counts against the evaluation budget.
    std::function<double(const std::vector<double>&)> success_evaluate;

    void validate() const {
        if (dimension < 1)
            throw std::invalid_argument("objective: dimension must be >= 1");
        if (static_cast<int>(lower_bounds.size()) != dimension ||
            static_cast<int>(upper_bounds.size()) != dimension)
            throw std::invalid_argument("objective: bounds length != dimension");
        for (int d = 0; d < dimension; ++d)
            if (!(lower_bounds[d] < upper_bounds[d]))
                throw std::invalid_argument("objective: lower bound must be < upper bound");
        if (!evaluate)
            throw std::invalid_argument("objective: missing evaluator");
    }

    bool in_bounds(const std::vector<double>& x) const {
        for (int d = 0; d < dimension; ++d)
            if (x[d] < lower_bounds[d] || x[d] > upper_bounds[d]) return false;
        return true;
    }

    /// Clamp position into the box. When a velocity is given, its component is
    /// zeroed on every clamped dimension.
    void clamp(std::vector<double>& position, std::vector<double>* velocity = nullptr) const {
        for (int d = 0; d < dimension; ++d) {
            if (position[d] < lower_bounds[d]) {
                position[d] = lower_bounds[d];
                if (velocity) (*velocity)[d] = 0.0;
            } else if (position[d] > upper_bounds[d]) {
                position[d] = upper_bounds[d];
                if (velocity) (*velocity)[d] = 0.0;
            }
        }
    }
};

} // namespace almi
