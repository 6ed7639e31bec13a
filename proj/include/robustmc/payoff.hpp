#pragma once

#include <cmath>
#include <span>
#include <string>

#include "robustmc/errors.hpp"
#include "robustmc/scalar_function.hpp"

namespace robustmc {

// A claim with running payoff g and terminal payoff l over horizon T:
// the discrete counterpart is sum_{i < floor(T/h)} h g(Y_i) + l(Y_{floor(T/h)}).
struct PayoffSpec {
    ScalarFunction g = ScalarFunction::zero();
    ScalarFunction l = ScalarFunction::zero();
    double T = 1.0;

    int n_steps(double h) const {
        if (!(h > 0.0)) throw ContractViolation("PayoffSpec: h must be positive");
        return static_cast<int>(std::floor(T / h + 1e-9));
    }
};

inline double discrete_payoff(const PayoffSpec& spec, double h, std::span<const double> states) {
    int n = spec.n_steps(h);
    if (states.size() < static_cast<std::size_t>(n) + 1)
        throw ContractViolation("discrete_payoff: path has " + std::to_string(states.size()) +
                                " states, need at least " + std::to_string(n + 1));
    double acc = 0.0;
    for (int i = 0; i < n; ++i) acc += h * spec.g(states[static_cast<std::size_t>(i)]);
    return acc + spec.l(states[static_cast<std::size_t>(n)]);
}

// T * ||g||_inf + ||l||_inf over the declared state interval; sizes value
// function clamps and sanity-checks the backward recursion output.
inline double payoff_bound(const PayoffSpec& spec, double x_min, double x_max) {
    return spec.T * spec.g.max_abs_on(x_min, x_max) + spec.l.max_abs_on(x_min, x_max);
}

}  // namespace robustmc
