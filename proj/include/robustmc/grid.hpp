#pragma once

#include <cmath>
#include <string>
#include <utility>
#include <vector>

#include "robustmc/errors.hpp"
#include "robustmc/scalar_function.hpp"

namespace robustmc {

struct Grid {
    double x_min = 0.0;
    double x_max = 1.0;
    int n_points = 2;

    void validate(const std::string& where = "grid") const {
        if (!(x_min < x_max)) throw ConfigError(where + ": x_min must be < x_max");
        if (n_points < 2) throw ConfigError(where + ".n_points: must be >= 2");
    }

    double spacing() const { return (x_max - x_min) / (n_points - 1); }
    double node(int i) const { return x_min + spacing() * i; }

    int nearest_node(double x) const {
        double u = (x - x_min) / spacing();
        int i = static_cast<int>(std::lround(u));
        return std::clamp(i, 0, n_points - 1);
    }

    bool contains(double x) const { return x >= x_min && x <= x_max; }
};

enum class BoundaryPolicy { ClampToEdge, LinearExtrapolate };

// Interpolation stencil: value = (1 - frac) * v[idx] + frac * v[idx + 1]
// with idx in [0, n-2]. Clamping forces frac to {0, 1} at the edges;
// extrapolation leaves frac unclamped on the edge segment.
struct InterpStencil {
    int idx;
    double frac;
};

inline InterpStencil interp_stencil(const Grid& g, BoundaryPolicy bp, double x) {
    double u = (x - g.x_min) / g.spacing();
    if (bp == BoundaryPolicy::ClampToEdge) {
        if (u <= 0.0) return {0, 0.0};
        if (u >= g.n_points - 1) return {g.n_points - 2, 1.0};
    }
    int i = static_cast<int>(std::floor(u));
    i = std::clamp(i, 0, g.n_points - 2);
    return {i, u - i};
}

// Value vector over a uniform grid with linear interpolation in between.
class ValueFunction {
 public:
    ValueFunction() = default;

    ValueFunction(Grid grid, std::vector<double> values,
                  BoundaryPolicy bp = BoundaryPolicy::ClampToEdge)
        : grid_(grid), values_(std::move(values)), bp_(bp) {
        grid_.validate();
        if (values_.size() != static_cast<std::size_t>(grid_.n_points))
            throw ContractViolation("ValueFunction: value count does not match grid");
    }

    static ValueFunction from_function(const Grid& grid, const ScalarFunction& f,
                                       BoundaryPolicy bp = BoundaryPolicy::ClampToEdge) {
        std::vector<double> v(static_cast<std::size_t>(grid.n_points));
        for (int i = 0; i < grid.n_points; ++i) v[static_cast<std::size_t>(i)] = f(grid.node(i));
        return ValueFunction(grid, std::move(v), bp);
    }

    const Grid& grid() const { return grid_; }
    BoundaryPolicy boundary_policy() const { return bp_; }
    const std::vector<double>& values() const { return values_; }
    std::vector<double>& values() { return values_; }

    double operator()(double x) const {
        InterpStencil s = interp_stencil(grid_, bp_, x);
        std::size_t i = static_cast<std::size_t>(s.idx);
        return (1.0 - s.frac) * values_[i] + s.frac * values_[i + 1];
    }

 private:
    Grid grid_{};
    std::vector<double> values_;
    BoundaryPolicy bp_ = BoundaryPolicy::ClampToEdge;
};

}  // namespace robustmc
