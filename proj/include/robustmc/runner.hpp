#pragma once

#include <cmath>
#include <filesystem>
#include <string>
#include <vector>

#include "robustmc/chain.hpp"
#include "robustmc/config.hpp"
#include "robustmc/csv.hpp"
#include "robustmc/engine.hpp"
#include "robustmc/svg.hpp"

namespace robustmc {

// Subcommand bodies shared by the CLI and the test harness. Each is a pure
// function of (config, seed) to output bytes: re-runs are byte-identical.

inline std::string out_path(const std::string& dir, const std::string& file) {
    std::filesystem::create_directories(dir);
    return (std::filesystem::path(dir) / file).string();
}

inline PricingResult run_price(const RunConfig& cfg) {
    cfg.validate();
    PricingResult result = worst_case_expectation(cfg.kernel_spec(), cfg.payoff, cfg.x0,
                                                  cfg.grid, cfg.lambda_grid(),
                                                  ArgmaxRecord::None, cfg.threads);
    CsvWriter price_csv(out_path(cfg.out_dir, "price.csv"));
    price_csv.header({"h", "n_steps", "price", "lambda_points"});
    price_csv.row({result.h, static_cast<double>(result.n_steps), result.price,
                   static_cast<double>(cfg.lambda_points)});

    CsvWriter curve_csv(out_path(cfg.out_dir, "value_curve.csv"));
    curve_csv.header({"x", "value"});
    for (int i = 0; i < cfg.grid.n_points; ++i)
        curve_csv.row({cfg.grid.node(i), result.value_curve.values()[static_cast<std::size_t>(i)]});
    return result;
}

inline SweepReport run_sweep(const RunConfig& cfg) {
    cfg.validate();
    if (cfg.h_list.size() < 3) throw ConfigError("h_list: sweep needs >= 3 step sizes");
    SweepReport report = sweep(cfg.kernel, cfg.band, cfg.payoff, cfg.x0, cfg.h_list, cfg.grid,
                               cfg.lambda_grid(), cfg.threads);
    CsvWriter csv(out_path(cfg.out_dir, "sweep.csv"));
    csv.header({"h", "n_steps", "price", "diff", "order"});
    for (const SweepRow& row : report.rows)
        csv.row_strings({format_number(row.h), std::to_string(row.n_steps),
                         format_number(row.price), format_number(row.diff),
                         row.order_defined ? format_number(row.order) : "nan"});
    return report;
}

inline ConvergenceReport run_verify_kernel(const RunConfig& cfg) {
    cfg.validate();
    std::vector<double> h_list = cfg.h_list;
    if (h_list.empty())
        for (int e = 3; e <= 10; ++e) h_list.push_back(std::pow(2.0, -e));
    if (h_list.size() < 2) throw ConfigError("h_list: verify-kernel needs >= 2 step sizes");

    int dim = kernel_control_dim(cfg.kernel);
    // Full lattice scans in four control dimensions blow up fast; cap the
    // per-axis resolution for multi-dimensional kernels.
    int ppa = dim == 1 ? cfg.lambda_points : std::min(cfg.lambda_points, 5);
    ControlGrid lam_grid(dim, ppa);

    std::vector<Vec2> probes;
    const int n_probes = 101;
    for (int i = 0; i < n_probes; ++i)
        probes.push_back({0.0, cfg.grid.x_min +
                                   (cfg.grid.x_max - cfg.grid.x_min) * i / (n_probes - 1)});

    KernelKind kind = cfg.kernel;
    CoefficientBand band = cfg.band;
    ConvergenceReport report = verify_convergence(
        [kind, band](double h) { return KernelSpec{kind, band, h}; }, h_list, lam_grid, probes,
        cfg.eps_list);

    CsvWriter csv(out_path(cfg.out_dir, "verify_kernel.csv"));
    csv.header({"h", "sup_res_b", "sup_res_a", "eps", "delta_h_eps"});
    for (const ConvergenceRow& row : report.rows)
        for (std::size_t e = 0; e < report.eps_list.size(); ++e)
            csv.row({row.h, row.sup_res_b, row.sup_res_a, report.eps_list[e],
                     row.delta_eps[e]});
    return report;
}

inline FeedbackControl control_from_spec(const RunConfig& cfg) {
    if (cfg.control.rule == "constant")
        return FeedbackControl::constant(ControlPoint::from_vector(cfg.control.lambda));
    return FeedbackControl::randomized_uniform(cfg.lambda_grid());
}

inline McResult run_simulate(const RunConfig& cfg) {
    cfg.validate();
    KernelSpec spec = cfg.kernel_spec();
    FeedbackControl control = control_from_spec(cfg);
    int steps = cfg.payoff.n_steps(spec.h);

    PathSample path = simulate(spec, control, cfg.x0, steps, cfg.seed, 0);
    CsvWriter path_csv(out_path(cfg.out_dir, "path.csv"));
    path_csv.header({"t", "driver", "state"});
    for (std::size_t k = 0; k < path.y.size(); ++k)
        path_csv.row({spec.h * static_cast<double>(k), path.y[k][0], path.y[k][1]});

    McResult mc = monte_carlo_value(spec, control, cfg.payoff, cfg.x0, cfg.n_paths, cfg.seed,
                                    cfg.threads);
    CsvWriter mc_csv(out_path(cfg.out_dir, "mc_summary.csv"));
    mc_csv.header({"control", "estimate", "std_error", "n_paths"});
    mc_csv.row_strings({control.rule_name(), format_number(mc.estimate),
                        format_number(mc.std_error), std::to_string(mc.n_paths)});
    return mc;
}

struct Fig1Result {
    std::vector<int> n_values;
    std::vector<std::vector<double>> curves;  // node values per N
    std::vector<double> gaps;                 // sup-norm gap between consecutive curves
    Grid grid;
};

// Six value curves of the iteration V_N = S_{1/N}^N(l) on the embedded
// preset, their overlay plot and the sup-norm gaps between consecutive N.
inline Fig1Result run_reproduce_fig1(const std::string& out_dir, int threads = 0) {
    RunConfig cfg = fig1_preset();
    cfg.threads = threads;
    Fig1Result result;
    result.n_values = {40, 60, 150, 200, 1000, 1200};
    result.grid = cfg.grid;

    std::vector<double> xs;
    for (int i = 0; i < cfg.grid.n_points; ++i) xs.push_back(cfg.grid.node(i));

    SvgLinePlot plot("Iterated worst-case values V_N", "x", "V_N(x)");
    ControlGrid lam = cfg.lambda_grid();
    for (int n : result.n_values) {
        double h = cfg.payoff.T / n;
        PricingResult r = price(cfg.band, cfg.payoff, cfg.x0, h, cfg.grid, lam,
                                ArgmaxRecord::None, threads);
        CsvWriter csv(out_path(out_dir, "curve_N" + std::to_string(n) + ".csv"));
        csv.header({"x", "value"});
        for (int i = 0; i < cfg.grid.n_points; ++i)
            csv.row({xs[static_cast<std::size_t>(i)],
                     r.value_curve.values()[static_cast<std::size_t>(i)]});
        plot.add_curve("N = " + std::to_string(n), xs, r.value_curve.values());
        result.curves.push_back(r.value_curve.values());
    }

    CsvWriter gaps_csv(out_path(out_dir, "gaps.csv"));
    gaps_csv.header({"n_coarse", "n_fine", "sup_gap"});
    for (std::size_t i = 0; i + 1 < result.curves.size(); ++i) {
        double gap = 0.0;
        for (std::size_t k = 0; k < result.curves[i].size(); ++k)
            gap = std::max(gap, std::abs(result.curves[i][k] - result.curves[i + 1][k]));
        result.gaps.push_back(gap);
        gaps_csv.row({static_cast<double>(result.n_values[i]),
                      static_cast<double>(result.n_values[i + 1]), gap});
    }

    plot.write(out_path(out_dir, "fig1.svg"));
    return result;
}

}  // namespace robustmc
