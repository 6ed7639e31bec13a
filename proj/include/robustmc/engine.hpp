#pragma once

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <mutex>
#include <span>
#include <string>
#include <vector>

#include "robustmc/errors.hpp"
#include "robustmc/grid.hpp"
#include "robustmc/kernels.hpp"
#include "robustmc/model.hpp"
#include "robustmc/parallel.hpp"
#include "robustmc/payoff.hpp"

namespace robustmc {

enum class ArgmaxRecord { None, FirstStep, AllSteps };

struct PricingResult {
    double price = 0.0;
    double h = 0.0;
    int n_steps = 0;
    int lambda_count = 0;
    ValueFunction value_curve;
    double wall_seconds = 0.0;
    // argmax[k-1][node] is the control index chosen while computing the
    // k-th backward iterate (k = 1 is the first step applied to the
    // terminal payoff). FirstStep keeps only k = 1.
    std::vector<std::vector<std::uint16_t>> argmax;
    bool argmax_all_steps = false;
};

namespace detail {

// Precomputed one-step stencil for a single (node, control) pair:
// new J contribution = c1a*J[i1] + c1b*J[i1+1] + c2a*J[i2] + c2b*J[i2+1].
// All four coefficients are nonnegative, so a backward step is exactly
// monotone in the previous iterate even in floating point.
struct PlanEntry {
    std::int32_t i1, i2;
    double c1a, c1b, c2a, c2b;
};

inline std::vector<PlanEntry> build_step_plan(const KernelSpec& spec, const Grid& grid,
                                              std::span<const ControlPoint> controls,
                                              BoundaryPolicy bp, int threads) {
    std::vector<PlanEntry> plan(static_cast<std::size_t>(grid.n_points) * controls.size());
    std::atomic<bool> failed{false};
    std::string error;
    std::mutex err_mutex;
    parallel_for(static_cast<std::size_t>(grid.n_points), threads, [&](std::size_t node) {
        if (failed.load(std::memory_order_relaxed)) return;
        try {
            Vec2 x{0.0, grid.node(static_cast<int>(node))};
            for (std::size_t c = 0; c < controls.size(); ++c) {
                WeightedSupport sup = support(spec, controls[c], x);
                InterpStencil s1 = interp_stencil(grid, bp, sup.atoms[0].point[1]);
                InterpStencil s2 = interp_stencil(grid, bp, sup.atoms[1].point[1]);
                double w1 = sup.atoms[0].weight, w2 = sup.atoms[1].weight;
                plan[node * controls.size() + c] = {
                    s1.idx, s2.idx,
                    w1 * (1.0 - s1.frac), w1 * s1.frac,
                    w2 * (1.0 - s2.frac), w2 * s2.frac};
            }
        } catch (const std::exception& e) {
            std::lock_guard<std::mutex> lock(err_mutex);
            failed = true;
            if (error.empty()) error = e.what();
        }
    });
    if (failed) throw InvalidKernelError(error);
    return plan;
}

// One backward step over all grid nodes. Reads `in`, writes `out`;
// each node depends only on `in`, so output is worker-count independent.
// Ties in the control scan break to the smallest flat index.
inline void backward_step(std::span<const PlanEntry> plan, std::size_t n_controls,
                          std::span<const double> g_times_h, std::span<const double> in,
                          std::span<double> out, std::uint16_t* argmax_out, int threads,
                          std::atomic<int>& bad_node) {
    std::size_t n_nodes = in.size();
    parallel_for(n_nodes, threads, [&](std::size_t node) {
        const PlanEntry* pe = plan.data() + node * n_controls;
        double best = -std::numeric_limits<double>::infinity();
        std::size_t best_c = 0;
        for (std::size_t c = 0; c < n_controls; ++c) {
            const PlanEntry& e = pe[c];
            double val = e.c1a * in[static_cast<std::size_t>(e.i1)] +
                         e.c1b * in[static_cast<std::size_t>(e.i1) + 1] +
                         e.c2a * in[static_cast<std::size_t>(e.i2)] +
                         e.c2b * in[static_cast<std::size_t>(e.i2) + 1];
            if (val > best) {
                best = val;
                best_c = c;
            }
        }
        double v = g_times_h[node] + best;
        if (!std::isfinite(v)) {
            int expected = -1;
            bad_node.compare_exchange_strong(expected, static_cast<int>(node));
        }
        out[node] = v;
        if (argmax_out) argmax_out[node] = static_cast<std::uint16_t>(best_c);
    });
}

}  // namespace detail

// Generic finite-kernel worst-case backward recursion on the state grid.
// All v1 kernels have a state marginal that depends only on the state
// coordinate, so the driver coordinate never enters the grid.
inline PricingResult backward_recursion(const KernelSpec& spec, const PayoffSpec& payoff,
                                        double x0, const Grid& grid,
                                        std::span<const ControlPoint> controls,
                                        ArgmaxRecord record = ArgmaxRecord::FirstStep,
                                        int threads = 0,
                                        BoundaryPolicy bp = BoundaryPolicy::ClampToEdge) {
    auto t0 = std::chrono::steady_clock::now();
    grid.validate();
    spec.validate();
    if (controls.empty()) throw ContractViolation("backward_recursion: no controls");
    if (controls.size() > 65535)
        throw ContractViolation("backward_recursion: control lattice too large");
    for (const ControlPoint& c : controls)
        if (c.dim() != spec.control_dim())
            throw ContractViolation("backward_recursion: control dimension mismatch for kernel " +
                                    std::string(kernel_kind_name(spec.kind)));
    if (!grid.contains(x0))
        throw ContractViolation("backward_recursion: x0=" + std::to_string(x0) +
                                " outside the grid domain");
    if (!(spec.h <= payoff.T))
        throw ContractViolation("backward_recursion: h must be <= T");

    int n_steps = payoff.n_steps(spec.h);
    std::size_t n_nodes = static_cast<std::size_t>(grid.n_points);

    std::vector<detail::PlanEntry> plan = detail::build_step_plan(spec, grid, controls, bp, threads);

    std::vector<double> g_times_h(n_nodes);
    for (std::size_t i = 0; i < n_nodes; ++i)
        g_times_h[i] = spec.h * payoff.g(grid.node(static_cast<int>(i)));

    std::vector<double> cur(n_nodes), next(n_nodes);
    for (std::size_t i = 0; i < n_nodes; ++i)
        cur[i] = payoff.l(grid.node(static_cast<int>(i)));

    PricingResult result;
    result.h = spec.h;
    result.n_steps = n_steps;
    result.lambda_count = static_cast<int>(controls.size());
    result.argmax_all_steps = (record == ArgmaxRecord::AllSteps);
    if (record == ArgmaxRecord::AllSteps)
        result.argmax.assign(static_cast<std::size_t>(n_steps),
                             std::vector<std::uint16_t>(n_nodes));
    else if (record == ArgmaxRecord::FirstStep)
        result.argmax.assign(1, std::vector<std::uint16_t>(n_nodes));

    std::atomic<int> bad_node{-1};
    for (int k = 1; k <= n_steps; ++k) {
        std::uint16_t* arg_out = nullptr;
        if (record == ArgmaxRecord::AllSteps)
            arg_out = result.argmax[static_cast<std::size_t>(k - 1)].data();
        else if (record == ArgmaxRecord::FirstStep && k == 1)
            arg_out = result.argmax[0].data();
        detail::backward_step(plan, controls.size(), g_times_h, cur, next, arg_out, threads,
                              bad_node);
        if (bad_node.load() >= 0)
            throw NumericError("backward_recursion: non-finite value at node " +
                               std::to_string(bad_node.load()) + " (x=" +
                               std::to_string(grid.node(bad_node.load())) + "), step " +
                               std::to_string(k));
        cur.swap(next);
    }

    result.value_curve = ValueFunction(grid, std::move(cur), bp);
    result.price = result.value_curve(x0);
    result.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return result;
}

// One application of the worst-case operator:
// S_h(J)(x) = h g(x) + sup_lambda { J(x + sqrt(h) sigma) + J(x - sqrt(h) sigma) } / 2.
inline ValueFunction apply_S_h(const ValueFunction& J, double h, const CoefficientBand& band,
                               const ScalarFunction& g, const ControlGrid& lam_grid,
                               int threads = 0) {
    if (lam_grid.dim() != 1)
        throw ContractViolation("apply_S_h: the one-step operator uses a one-dimensional "
                                "control lattice");
    KernelSpec spec{KernelKind::SymmetricRademacher, band, h};
    const Grid& grid = J.grid();
    std::vector<ControlPoint> controls = lam_grid.enumerate();
    std::vector<detail::PlanEntry> plan =
        detail::build_step_plan(spec, grid, controls, J.boundary_policy(), threads);
    std::size_t n_nodes = static_cast<std::size_t>(grid.n_points);
    std::vector<double> g_times_h(n_nodes);
    for (std::size_t i = 0; i < n_nodes; ++i)
        g_times_h[i] = h * g(grid.node(static_cast<int>(i)));
    std::vector<double> out(n_nodes);
    std::atomic<int> bad_node{-1};
    detail::backward_step(plan, controls.size(), g_times_h, J.values(), out, nullptr, threads,
                          bad_node);
    if (bad_node.load() >= 0)
        throw NumericError("apply_S_h: non-finite value at node " +
                           std::to_string(bad_node.load()) + " (x=" +
                           std::to_string(grid.node(bad_node.load())) + ")");
    return ValueFunction(grid, std::move(out), J.boundary_policy());
}

// N-fold composition S_h^{floor(T/h)}(l)(x0) with the Rademacher kernel.
inline PricingResult price(const CoefficientBand& band, const PayoffSpec& payoff, double x0,
                           double h, const Grid& grid, const ControlGrid& lam_grid,
                           ArgmaxRecord record = ArgmaxRecord::FirstStep, int threads = 0,
                           BoundaryPolicy bp = BoundaryPolicy::ClampToEdge) {
    if (lam_grid.dim() != 1)
        throw ContractViolation("price: the S_h recursion uses a one-dimensional control lattice");
    KernelSpec spec{KernelKind::SymmetricRademacher, band, h};
    std::vector<ControlPoint> controls = lam_grid.enumerate();
    return backward_recursion(spec, payoff, x0, grid, controls, record, threads, bp);
}

// Worst-case expectation of f^h under an arbitrary v1 kernel; identical to
// price() when the kernel is SymmetricRademacher (same code path).
inline PricingResult worst_case_expectation(const KernelSpec& spec, const PayoffSpec& payoff,
                                            double x0, const Grid& grid,
                                            const ControlGrid& lam_grid,
                                            ArgmaxRecord record = ArgmaxRecord::FirstStep,
                                            int threads = 0,
                                            BoundaryPolicy bp = BoundaryPolicy::ClampToEdge) {
    if (lam_grid.dim() != spec.control_dim())
        throw ContractViolation("worst_case_expectation: control grid dimension mismatch");
    std::vector<ControlPoint> controls = lam_grid.enumerate();
    return backward_recursion(spec, payoff, x0, grid, controls, record, threads, bp);
}

// Linear recursion with one frozen control; a lower bound for the sup
// recursion node by node.
inline PricingResult frozen_control_value(const KernelSpec& spec, const PayoffSpec& payoff,
                                          double x0, const Grid& grid,
                                          const ControlPoint& frozen, int threads = 0,
                                          BoundaryPolicy bp = BoundaryPolicy::ClampToEdge) {
    std::array<ControlPoint, 1> one{frozen};
    return backward_recursion(spec, payoff, x0, grid, one, ArgmaxRecord::None, threads, bp);
}

struct SweepRow {
    double h = 0.0;
    int n_steps = 0;
    double price = 0.0;
    double diff = 0.0;   // |price - price at the finest h|
    double order = std::numeric_limits<double>::quiet_NaN();
    bool order_defined = false;
};

struct SweepReport {
    std::vector<SweepRow> rows;  // ordered as h_list (decreasing h)
    bool cauchy = true;          // successive diffs non-increasing
    // Distance from x0 to the nearer grid edge, in units of sqrt(a_upper_max * T).
    double boundary_margin_sd = 0.0;
};

inline SweepReport sweep(KernelKind kind, const CoefficientBand& band, const PayoffSpec& payoff,
                         double x0, std::span<const double> h_list, const Grid& grid,
                         const ControlGrid& lam_grid, int threads = 0,
                         BoundaryPolicy bp = BoundaryPolicy::ClampToEdge) {
    if (h_list.size() < 3) throw ContractViolation("sweep: need >= 3 step sizes");
    for (std::size_t i = 1; i < h_list.size(); ++i)
        if (!(h_list[i] < h_list[i - 1]))
            throw ContractViolation("sweep: h_list must be strictly decreasing");

    SweepReport report;
    for (double h : h_list) {
        KernelSpec spec{kind, band, h};
        PricingResult r = worst_case_expectation(spec, payoff, x0, grid, lam_grid,
                                                 ArgmaxRecord::None, threads, bp);
        SweepRow row;
        row.h = h;
        row.n_steps = r.n_steps;
        row.price = r.price;
        report.rows.push_back(row);
    }

    double reference = report.rows.back().price;
    for (SweepRow& row : report.rows) row.diff = std::abs(row.price - reference);
    for (std::size_t i = 0; i + 1 < report.rows.size(); ++i) {
        SweepRow& a = report.rows[i];
        const SweepRow& b = report.rows[i + 1];
        if (a.diff > 0.0 && b.diff > 0.0) {
            a.order = std::log(a.diff / b.diff) / std::log(a.h / b.h);
            a.order_defined = true;
        }
    }
    for (std::size_t i = 0; i + 2 < report.rows.size(); ++i)
        if (report.rows[i + 1].diff > report.rows[i].diff + 1e-12) report.cauchy = false;

    double a_up = band.a_upper.max_abs_on(grid.x_min, grid.x_max);
    double sd = std::sqrt(a_up * payoff.T);
    report.boundary_margin_sd = std::min(x0 - grid.x_min, grid.x_max - x0) / sd;
    return report;
}

}  // namespace robustmc
