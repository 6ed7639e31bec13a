#pragma once

#include <cstdint>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "robustmc/errors.hpp"
#include "robustmc/grid.hpp"
#include "robustmc/kernels.hpp"
#include "robustmc/model.hpp"
#include "robustmc/payoff.hpp"
#include "robustmc/toml_lite.hpp"

namespace robustmc {

struct ControlSpec {
    std::string rule = "randomized_uniform";  // constant | randomized_uniform
    std::vector<double> lambda;               // constant rule only
};

struct RunConfig {
    CoefficientBand band;
    PayoffSpec payoff;
    KernelKind kernel = KernelKind::SymmetricRademacher;
    double x0 = 0.0;
    Grid grid;
    std::optional<double> h;
    std::optional<int> n_steps;
    std::vector<double> h_list;
    int lambda_points = 33;
    std::vector<double> eps_list{0.5};
    std::uint64_t seed = 0;
    int n_paths = 10000;
    ControlSpec control;
    std::string out_dir = ".";
    int threads = 0;

    double step_size() const {
        if (h) return *h;
        if (n_steps) return payoff.T / *n_steps;
        throw ConfigError("h: missing (provide h or n_steps)");
    }

    ControlGrid lambda_grid() const {
        return ControlGrid(kernel_control_dim(kernel), lambda_points);
    }

    KernelSpec kernel_spec() const { return KernelSpec{kernel, band, step_size()}; }

    void validate() const {
        grid.validate("grid");
        band.validate_on(grid.x_min, grid.x_max, 101, "band");
        if (!(payoff.T > 0.0)) throw ConfigError("payoff.T: must be positive");
        if (h && !(*h > 0.0)) throw ConfigError("h: must be positive");
        if (n_steps && *n_steps < 1) throw ConfigError("n_steps: must be >= 1");
        if (lambda_points < 2) throw ConfigError("lambda_points: must be >= 2");
        for (double e : eps_list)
            if (!(e > 0.0) || !std::isfinite(e))
                throw ConfigError("eps_list: entries must be positive and finite");
        for (std::size_t i = 0; i < h_list.size(); ++i) {
            if (!(h_list[i] > 0.0)) throw ConfigError("h_list: entries must be positive");
            if (i > 0 && !(h_list[i] < h_list[i - 1]))
                throw ConfigError("h_list: must be strictly decreasing");
        }
        if (n_paths < 2) throw ConfigError("n_paths: must be >= 2");
        if (!(grid.contains(x0))) throw ConfigError("x0: outside [grid.x_min, grid.x_max]");
        if (control.rule != "constant" && control.rule != "randomized_uniform")
            throw ConfigError("control.rule: expected 'constant' or 'randomized_uniform'");
        if (control.rule == "constant") {
            if (control.lambda.size() != static_cast<std::size_t>(kernel_control_dim(kernel)))
                throw ConfigError("control.lambda: dimension must match the kernel (" +
                                  std::to_string(kernel_control_dim(kernel)) + ")");
            for (double v : control.lambda)
                if (!(v >= 0.0 && v <= 1.0))
                    throw ConfigError("control.lambda: coordinates must lie in [0,1]");
        }
    }

    nlohmann::json to_json() const {
        nlohmann::json j;
        j["band"] = {{"b_lower", band.b_lower.to_json()},
                     {"b_upper", band.b_upper.to_json()},
                     {"a_lower", band.a_lower.to_json()},
                     {"a_upper", band.a_upper.to_json()},
                     {"bound_c", band.bound_C}};
        j["payoff"] = {{"g", payoff.g.to_json()}, {"l", payoff.l.to_json()}, {"T", payoff.T}};
        j["kernel"] = kernel_kind_name(kernel);
        j["x0"] = x0;
        j["grid"] = {{"x_min", grid.x_min}, {"x_max", grid.x_max}, {"n_points", grid.n_points}};
        if (h) j["h"] = *h;
        if (n_steps) j["n_steps"] = *n_steps;
        if (!h_list.empty()) j["h_list"] = h_list;
        j["lambda_points"] = lambda_points;
        j["eps_list"] = eps_list;
        j["seed"] = seed;
        j["n_paths"] = n_paths;
        nlohmann::json ctl = {{"rule", control.rule}};
        if (!control.lambda.empty()) ctl["lambda"] = control.lambda;
        j["control"] = ctl;
        j["out_dir"] = out_dir;
        j["threads"] = threads;
        return j;
    }

    static RunConfig from_json(const nlohmann::json& j) {
        RunConfig cfg;
        auto need = [&](const nlohmann::json& obj, const std::string& path,
                        const char* key) -> const nlohmann::json& {
            if (!obj.is_object() || !obj.contains(key))
                throw ConfigError(path.empty() ? std::string(key) + ": missing"
                                               : path + "." + key + ": missing");
            return obj.at(key);
        };
        auto num = [&](const nlohmann::json& obj, const std::string& path, const char* key) {
            const auto& v = need(obj, path, key);
            if (!v.is_number())
                throw ConfigError((path.empty() ? std::string(key) : path + "." + key) +
                                  ": expected a number");
            return v.get<double>();
        };

        const auto& jb = need(j, "", "band");
        cfg.band.b_lower = ScalarFunction::from_json(need(jb, "band", "b_lower"), "band.b_lower");
        cfg.band.b_upper = ScalarFunction::from_json(need(jb, "band", "b_upper"), "band.b_upper");
        cfg.band.a_lower = ScalarFunction::from_json(need(jb, "band", "a_lower"), "band.a_lower");
        cfg.band.a_upper = ScalarFunction::from_json(need(jb, "band", "a_upper"), "band.a_upper");
        cfg.band.bound_C = num(jb, "band", "bound_c");

        const auto& jp = need(j, "", "payoff");
        cfg.payoff.g = ScalarFunction::from_json(need(jp, "payoff", "g"), "payoff.g");
        cfg.payoff.l = ScalarFunction::from_json(need(jp, "payoff", "l"), "payoff.l");
        cfg.payoff.T = num(jp, "payoff", "T");

        if (j.contains("kernel")) {
            std::string k = j.at("kernel").get<std::string>();
            if (k == "robust_crr") cfg.kernel = KernelKind::RobustCRR;
            else if (k == "robust_binomial") cfg.kernel = KernelKind::RobustBinomial;
            else if (k == "martingale_binomial") cfg.kernel = KernelKind::MartingaleBinomial;
            else if (k == "symmetric_rademacher") cfg.kernel = KernelKind::SymmetricRademacher;
            else throw ConfigError("kernel: unknown kind '" + k + "'");
        }

        cfg.x0 = num(j, "", "x0");
        const auto& jg = need(j, "", "grid");
        cfg.grid.x_min = num(jg, "grid", "x_min");
        cfg.grid.x_max = num(jg, "grid", "x_max");
        cfg.grid.n_points = static_cast<int>(num(jg, "grid", "n_points"));

        if (j.contains("h")) cfg.h = j.at("h").get<double>();
        if (j.contains("n_steps")) cfg.n_steps = j.at("n_steps").get<int>();
        if (j.contains("h_list")) cfg.h_list = j.at("h_list").get<std::vector<double>>();
        if (j.contains("lambda_points")) cfg.lambda_points = j.at("lambda_points").get<int>();
        if (j.contains("eps_list")) cfg.eps_list = j.at("eps_list").get<std::vector<double>>();
        if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
        if (j.contains("n_paths")) cfg.n_paths = j.at("n_paths").get<int>();
        if (j.contains("control")) {
            const auto& jc = j.at("control");
            cfg.control.rule = need(jc, "control", "rule").get<std::string>();
            if (jc.contains("lambda"))
                cfg.control.lambda = jc.at("lambda").get<std::vector<double>>();
        }
        if (j.contains("out_dir")) cfg.out_dir = j.at("out_dir").get<std::string>();
        if (j.contains("threads")) cfg.threads = j.at("threads").get<int>();

        cfg.validate();
        return cfg;
    }

    // Accepts .json and .toml files, keyed by extension.
    static RunConfig load(const std::string& path) {
        std::ifstream in(path, std::ios::binary);
        if (!in) throw ConfigError("cannot open config file: " + path);
        std::ostringstream buf;
        buf << in.rdbuf();
        std::string text = buf.str();
        nlohmann::json j;
        if (path.size() >= 5 && path.substr(path.size() - 5) == ".toml") {
            j = TomlLite::parse(text);
        } else {
            try {
                j = nlohmann::json::parse(text);
            } catch (const nlohmann::json::exception& e) {
                throw ConfigError(std::string("json parse error: ") + e.what());
            }
        }
        return from_json(j);
    }
};

// The embedded preset of the convergence experiment: unit horizon, cut-off
// call payoff, power-band volatility uncertainty on the grid (0, 5) with
// 5000 increments.
inline RunConfig fig1_preset() {
    RunConfig cfg;
    cfg.band.b_lower = ScalarFunction::zero();
    cfg.band.b_upper = ScalarFunction::zero();
    cfg.band.a_lower = ScalarFunction::clamp(1.0, 30.0);
    cfg.band.a_upper = ScalarFunction::power_clamp(1.0, 30.0, 2.0);
    cfg.band.bound_C = 900.0;
    cfg.payoff.g = ScalarFunction::zero();
    cfg.payoff.l = ScalarFunction::cutoff_call(0.5, 20.0);
    cfg.payoff.T = 1.0;
    cfg.kernel = KernelKind::SymmetricRademacher;
    cfg.x0 = 1.0;
    cfg.grid = Grid{0.0, 5.0, 5001};
    cfg.lambda_points = 33;
    cfg.n_steps = 1200;
    return cfg;
}

}  // namespace robustmc
