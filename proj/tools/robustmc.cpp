// Command line front end: worst-case superhedging prices by backward
// recursion, kernel diagnostics, controlled-chain simulation and the
// bundled convergence experiment.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "robustmc/runner.hpp"

namespace {

struct CommonOpts {
    std::string config_path;
    std::string out_dir;
    std::optional<int> threads;
    std::optional<std::uint64_t> seed;
};

robustmc::RunConfig load_config(const CommonOpts& opts) {
    robustmc::RunConfig cfg = robustmc::RunConfig::load(opts.config_path);
    if (!opts.out_dir.empty()) cfg.out_dir = opts.out_dir;
    if (opts.threads) cfg.threads = *opts.threads;
    if (opts.seed) cfg.seed = *opts.seed;
    return cfg;
}

void add_common(CLI::App* cmd, CommonOpts& opts, bool need_config = true) {
    auto* c = cmd->add_option("--config", opts.config_path, "run configuration file (.json or .toml)");
    if (need_config) c->required();
    cmd->add_option("--out", opts.out_dir, "output directory (overrides config)");
    cmd->add_option_function<int>(
        "--threads", [&opts](int t) { opts.threads = t; }, "worker threads (default: all cores)");
    cmd->add_option_function<std::uint64_t>(
        "--seed", [&opts](std::uint64_t s) { opts.seed = s; }, "random seed (overrides config)");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"robust worst-case pricing by Markov chain approximation"};
    app.require_subcommand(1);

    CommonOpts price_opts, sweep_opts, verify_opts, sim_opts, fig1_opts;

    auto* price_cmd = app.add_subcommand("price", "backward recursion price at x0");
    add_common(price_cmd, price_opts);

    auto* sweep_cmd = app.add_subcommand("sweep", "price convergence sweep over h_list");
    add_common(sweep_cmd, sweep_opts);

    auto* verify_cmd =
        app.add_subcommand("verify-kernel", "kernel moment and tail diagnostics over h_list");
    add_common(verify_cmd, verify_opts);

    auto* sim_cmd = app.add_subcommand("simulate", "controlled chain paths and Monte Carlo value");
    add_common(sim_cmd, sim_opts);

    auto* fig1_cmd =
        app.add_subcommand("reproduce-fig1", "bundled convergence experiment (no config needed)");
    add_common(fig1_cmd, fig1_opts, /*need_config=*/false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (price_cmd->parsed()) {
            robustmc::RunConfig cfg = load_config(price_opts);
            robustmc::PricingResult r = robustmc::run_price(cfg);
            std::cout << robustmc::format_number(r.price) << "\n";
        } else if (sweep_cmd->parsed()) {
            robustmc::RunConfig cfg = load_config(sweep_opts);
            robustmc::SweepReport rep = robustmc::run_sweep(cfg);
            std::cout << "rows=" << rep.rows.size() << " cauchy=" << (rep.cauchy ? "yes" : "no")
                      << " boundary_margin_sd=" << robustmc::format_number(rep.boundary_margin_sd)
                      << "\n";
        } else if (verify_cmd->parsed()) {
            robustmc::RunConfig cfg = load_config(verify_opts);
            robustmc::ConvergenceReport rep = robustmc::run_verify_kernel(cfg);
            std::cout << "drift_residual_vanishing=" << (rep.drift_residual_vanishing ? "yes" : "no")
                      << " diffusion_residual_vanishing="
                      << (rep.diffusion_residual_vanishing ? "yes" : "no")
                      << " tail_vanishing=" << (rep.tail_vanishing ? "yes" : "no") << "\n";
        } else if (sim_cmd->parsed()) {
            robustmc::RunConfig cfg = load_config(sim_opts);
            robustmc::McResult mc = robustmc::run_simulate(cfg);
            std::cout << robustmc::format_number(mc.estimate) << " +/- "
                      << robustmc::format_number(mc.std_error) << " (" << mc.n_paths
                      << " paths)\n";
        } else if (fig1_cmd->parsed()) {
            std::string out = fig1_opts.out_dir.empty() ? "fig1_out" : fig1_opts.out_dir;
            int threads = fig1_opts.threads ? *fig1_opts.threads : 0;
            robustmc::Fig1Result r = robustmc::run_reproduce_fig1(out, threads);
            for (std::size_t i = 0; i + 1 < r.curves.size(); ++i)
                std::cout << "gap(N=" << r.n_values[i] << ", N=" << r.n_values[i + 1]
                          << ") = " << robustmc::format_number(r.gaps[i]) << "\n";
        }
    } catch (const robustmc::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const robustmc::ContractViolation& e) {
        std::cerr << "contract violation: " << e.what() << "\n";
        return 4;
    } catch (const robustmc::NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
