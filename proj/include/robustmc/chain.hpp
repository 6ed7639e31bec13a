#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "robustmc/engine.hpp"
#include "robustmc/errors.hpp"
#include "robustmc/grid.hpp"
#include "robustmc/kernels.hpp"
#include "robustmc/parallel.hpp"
#include "robustmc/payoff.hpp"
#include "robustmc/rng.hpp"

namespace robustmc {

// A rule selecting the control from the current (step, state). Realizes one
// member of the discrete uncertainty set when driving the chain.
class FeedbackControl {
 public:
    enum class Rule { Constant, StateLookup, RandomizedUniform };

    static FeedbackControl constant(ControlPoint lam) {
        FeedbackControl c;
        c.rule_ = Rule::Constant;
        c.constant_ = lam;
        return c;
    }

    // Per-step lookup tables over the grid nodes; states are matched to the
    // nearest node. Steps beyond the table reuse its last entry.
    static FeedbackControl state_lookup(Grid grid,
                                        std::vector<std::vector<ControlPoint>> table) {
        if (table.empty() || table.front().empty())
            throw ContractViolation("FeedbackControl: empty lookup table");
        for (const auto& row : table)
            if (row.size() != static_cast<std::size_t>(grid.n_points))
                throw ContractViolation("FeedbackControl: lookup row size != grid nodes");
        FeedbackControl c;
        c.rule_ = Rule::StateLookup;
        c.grid_ = grid;
        c.table_ = std::move(table);
        return c;
    }

    // Fresh uniform draw from the lattice at every step, deterministic in
    // (seed, path, step). The salt separates independent randomized controls
    // run under one seed.
    static FeedbackControl randomized_uniform(ControlGrid lattice, std::uint64_t salt = 0) {
        FeedbackControl c;
        c.rule_ = Rule::RandomizedUniform;
        c.lattice_ = lattice;
        c.salt_ = salt;
        return c;
    }

    Rule rule() const { return rule_; }

    const char* rule_name() const {
        switch (rule_) {
            case Rule::Constant: return "constant";
            case Rule::StateLookup: return "state_lookup";
            default: return "randomized_uniform";
        }
    }

    ControlPoint select(int step, double state, std::uint64_t seed, std::uint64_t path) const {
        switch (rule_) {
            case Rule::Constant:
                return constant_;
            case Rule::StateLookup: {
                std::size_t row = std::min<std::size_t>(static_cast<std::size_t>(step),
                                                        table_.size() - 1);
                return table_[row][static_cast<std::size_t>(grid_.nearest_node(state))];
            }
            default: {
                double u = uniform01(seed ^ salt_, path,
                                     2 * static_cast<std::uint64_t>(step));
                auto idx = static_cast<std::size_t>(u * static_cast<double>(lattice_.size()));
                if (idx >= lattice_.size()) idx = lattice_.size() - 1;
                return lattice_.point(idx);
            }
        }
    }

 private:
    FeedbackControl() : lattice_(1, 2) {}

    Rule rule_ = Rule::Constant;
    ControlPoint constant_;
    Grid grid_{};
    std::vector<std::vector<ControlPoint>> table_;
    ControlGrid lattice_;
    std::uint64_t salt_ = 0;
};

struct PathSample {
    double h = 0.0;
    std::vector<Vec2> y;  // y[0] = (0, x0)
    std::uint64_t seed = 0;
};

// Draws one atom per step by inverse transform on the counter-based stream.
// Counter layout: 2k selects the control (randomized rule), 2k+1 the atom.
inline PathSample simulate(const KernelSpec& kernel, const FeedbackControl& control, double x0,
                           int steps, std::uint64_t seed, std::uint64_t path_index = 0) {
    if (steps < 1) throw ContractViolation("simulate: steps must be >= 1");
    kernel.validate();
    PathSample path;
    path.h = kernel.h;
    path.seed = seed;
    path.y.reserve(static_cast<std::size_t>(steps) + 1);
    path.y.push_back({0.0, x0});
    for (int k = 0; k < steps; ++k) {
        const Vec2& cur = path.y.back();
        ControlPoint lam = control.select(k, cur[1], seed, path_index);
        WeightedSupport sup;
        try {
            sup = support(kernel, lam, cur);
        } catch (const InvalidKernelError& e) {
            throw InvalidKernelError(std::string(e.what()) + " (simulation step " +
                                     std::to_string(k) + ")");
        }
        double u = uniform01(seed, path_index, 2 * static_cast<std::uint64_t>(k) + 1);
        path.y.push_back(u < sup.atoms[0].weight ? sup.atoms[0].point : sup.atoms[1].point);
    }
    return path;
}

// Piecewise-linear interpolation of a chain path over [0, N*h]; node times
// return the chain states exactly.
class PathInterpolant {
 public:
    explicit PathInterpolant(const PathSample& path) : path_(&path) {
        if (path.y.size() < 2) throw ContractViolation("interpolate: path too short");
    }

    Vec2 operator()(double t) const {
        const auto& y = path_->y;
        double h = path_->h;
        double t_max = h * static_cast<double>(y.size() - 1);
        if (t < 0.0 || t > t_max * (1.0 + 1e-12))
            throw ContractViolation("interpolate: t=" + std::to_string(t) +
                                    " outside [0, " + std::to_string(t_max) + "]");
        double q = t / h;
        auto k = static_cast<std::size_t>(std::floor(q));
        if (k >= y.size() - 1) return y.back();
        double w = q - static_cast<double>(k);
        return {(1.0 - w) * y[k][0] + w * y[k + 1][0], (1.0 - w) * y[k][1] + w * y[k + 1][1]};
    }

 private:
    const PathSample* path_;
};

inline PathInterpolant interpolate(const PathSample& path) { return PathInterpolant(path); }

struct McResult {
    double estimate = 0.0;
    double std_error = 0.0;
    int n_paths = 0;
};

// Sample mean of the discrete payoff over independent paths. Paths are
// independent tasks; the aggregation is a pairwise sum in path order, so
// the estimate does not depend on the thread count.
inline McResult monte_carlo_value(const KernelSpec& kernel, const FeedbackControl& control,
                                  const PayoffSpec& payoff, double x0, int n_paths,
                                  std::uint64_t seed, int threads = 0) {
    if (n_paths < 2) throw ContractViolation("monte_carlo_value: n_paths must be >= 2");
    int steps = payoff.n_steps(kernel.h);
    std::vector<double> payoffs(static_cast<std::size_t>(n_paths));
    std::atomic<bool> failed{false};
    std::string error;
    std::mutex err_mutex;
    parallel_for(static_cast<std::size_t>(n_paths), threads, [&](std::size_t p) {
        if (failed.load(std::memory_order_relaxed)) return;
        try {
            PathSample path = simulate(kernel, control, x0, steps, seed, p);
            std::vector<double> states;
            states.reserve(path.y.size());
            for (const Vec2& y : path.y) states.push_back(y[1]);
            payoffs[p] = discrete_payoff(payoff, kernel.h, states);
        } catch (const std::exception& e) {
            std::lock_guard<std::mutex> lock(err_mutex);
            failed = true;
            if (error.empty()) error = e.what();
        }
    });
    if (failed) throw NumericError(error);

    McResult res;
    res.n_paths = n_paths;
    res.estimate = pairwise_sum(payoffs) / n_paths;
    std::vector<double> sq(payoffs.size());
    for (std::size_t i = 0; i < payoffs.size(); ++i) {
        double d = payoffs[i] - res.estimate;
        sq[i] = d * d;
    }
    double var = pairwise_sum(sq) / (n_paths - 1);
    res.std_error = std::sqrt(var / n_paths);
    return res;
}

// Realizes the recursion argmax as a time-dependent state-lookup control.
// Chain step i reads the record of backward iterate N - i (the step that
// consumed the value function the control should maximize against).
inline FeedbackControl extract_greedy_control(const PricingResult& result,
                                              const ControlGrid& lam_grid) {
    if (!result.argmax_all_steps ||
        result.argmax.size() != static_cast<std::size_t>(result.n_steps))
        throw ContractViolation(
            "extract_greedy_control: pricing result lacks per-step argmax records "
            "(rerun with ArgmaxRecord::AllSteps)");
    const Grid& grid = result.value_curve.grid();
    std::size_t n_nodes = static_cast<std::size_t>(grid.n_points);
    std::vector<std::vector<ControlPoint>> table(static_cast<std::size_t>(result.n_steps));
    for (int i = 0; i < result.n_steps; ++i) {
        const auto& rec = result.argmax[static_cast<std::size_t>(result.n_steps - 1 - i)];
        auto& row = table[static_cast<std::size_t>(i)];
        row.reserve(n_nodes);
        for (std::size_t node = 0; node < n_nodes; ++node)
            row.push_back(lam_grid.point(rec[node]));
    }
    return FeedbackControl::state_lookup(grid, std::move(table));
}

}  // namespace robustmc
