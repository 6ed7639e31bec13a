#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "robustmc/errors.hpp"

namespace robustmc {

// Closed catalogue of scalar functions of the state. Keeping the catalogue
// closed makes run configurations serializable and runs reproducible; the
// table family covers ad-hoc shapes.
class ScalarFunction {
 public:
    struct Constant {
        double value;
    };
    struct Affine {
        double intercept, slope;
    };
    struct Clamp {
        double lo, hi;
    };
    struct PowerClamp {
        double lo, hi, power;
    };
    struct Call {
        double strike;
    };
    struct Put {
        double strike;
    };
    struct CutoffCall {
        double strike, cap;
    };
    struct Table {
        std::vector<double> xs, ys;  // xs strictly increasing; constant beyond the ends
    };

    ScalarFunction() : rep_(Constant{0.0}) {}

    static ScalarFunction zero() { return ScalarFunction(Constant{0.0}); }
    static ScalarFunction constant(double c) { return ScalarFunction(Constant{c}); }
    static ScalarFunction affine(double intercept, double slope) {
        return ScalarFunction(Affine{intercept, slope});
    }
    static ScalarFunction identity() { return ScalarFunction(Affine{0.0, 1.0}); }
    static ScalarFunction clamp(double lo, double hi) {
        if (!(lo <= hi)) throw ContractViolation("clamp: lo > hi");
        return ScalarFunction(Clamp{lo, hi});
    }
    static ScalarFunction power_clamp(double lo, double hi, double power) {
        if (!(lo <= hi)) throw ContractViolation("power_clamp: lo > hi");
        return ScalarFunction(PowerClamp{lo, hi, power});
    }
    static ScalarFunction call(double strike) { return ScalarFunction(Call{strike}); }
    static ScalarFunction put(double strike) { return ScalarFunction(Put{strike}); }
    static ScalarFunction cutoff_call(double strike, double cap) {
        return ScalarFunction(CutoffCall{strike, cap});
    }
    static ScalarFunction table(std::vector<double> xs, std::vector<double> ys) {
        if (xs.size() != ys.size() || xs.size() < 2)
            throw ContractViolation("table: need >= 2 breakpoints with matching values");
        for (std::size_t i = 1; i < xs.size(); ++i)
            if (!(xs[i - 1] < xs[i]))
                throw ContractViolation("table: breakpoints must be strictly increasing");
        return ScalarFunction(Table{std::move(xs), std::move(ys)});
    }

    double operator()(double x) const {
        return std::visit(
            [x](const auto& f) -> double {
                using T = std::decay_t<decltype(f)>;
                if constexpr (std::is_same_v<T, Constant>) {
                    return f.value;
                } else if constexpr (std::is_same_v<T, Affine>) {
                    return f.intercept + f.slope * x;
                } else if constexpr (std::is_same_v<T, Clamp>) {
                    return std::clamp(x, f.lo, f.hi);
                } else if constexpr (std::is_same_v<T, PowerClamp>) {
                    return std::pow(std::clamp(x, f.lo, f.hi), f.power);
                } else if constexpr (std::is_same_v<T, Call>) {
                    return std::max(x - f.strike, 0.0);
                } else if constexpr (std::is_same_v<T, Put>) {
                    return std::max(f.strike - x, 0.0);
                } else if constexpr (std::is_same_v<T, CutoffCall>) {
                    return std::min(std::max(x - f.strike, 0.0), f.cap);
                } else {
                    const Table& t = f;
                    if (x <= t.xs.front()) return t.ys.front();
                    if (x >= t.xs.back()) return t.ys.back();
                    auto it = std::upper_bound(t.xs.begin(), t.xs.end(), x);
                    std::size_t i = static_cast<std::size_t>(it - t.xs.begin()) - 1;
                    double w = (x - t.xs[i]) / (t.xs[i + 1] - t.xs[i]);
                    return (1.0 - w) * t.ys[i] + w * t.ys[i + 1];
                }
            },
            rep_);
    }

    // Every family in the catalogue is piecewise monotone between its kinks,
    // so the sup of |f| on [lo, hi] is attained at an endpoint or a kink.
    double max_abs_on(double lo, double hi) const {
        std::vector<double> cand{lo, hi};
        for (double k : kinks())
            if (k > lo && k < hi) cand.push_back(k);
        double m = 0.0;
        for (double x : cand) m = std::max(m, std::abs((*this)(x)));
        return m;
    }

    nlohmann::json to_json() const {
        nlohmann::json j;
        std::visit(
            [&j](const auto& f) {
                using T = std::decay_t<decltype(f)>;
                if constexpr (std::is_same_v<T, Constant>) {
                    j = {{"family", "constant"}, {"value", f.value}};
                } else if constexpr (std::is_same_v<T, Affine>) {
                    j = {{"family", "affine"}, {"intercept", f.intercept}, {"slope", f.slope}};
                } else if constexpr (std::is_same_v<T, Clamp>) {
                    j = {{"family", "clamp"}, {"lo", f.lo}, {"hi", f.hi}};
                } else if constexpr (std::is_same_v<T, PowerClamp>) {
                    j = {{"family", "power_clamp"}, {"lo", f.lo}, {"hi", f.hi}, {"power", f.power}};
                } else if constexpr (std::is_same_v<T, Call>) {
                    j = {{"family", "call"}, {"strike", f.strike}};
                } else if constexpr (std::is_same_v<T, Put>) {
                    j = {{"family", "put"}, {"strike", f.strike}};
                } else if constexpr (std::is_same_v<T, CutoffCall>) {
                    j = {{"family", "cutoff_call"}, {"strike", f.strike}, {"cap", f.cap}};
                } else {
                    j = {{"family", "table"}, {"x", f.xs}, {"y", f.ys}};
                }
            },
            rep_);
        return j;
    }

    static ScalarFunction from_json(const nlohmann::json& j, const std::string& path) {
        auto need = [&](const char* key) -> const nlohmann::json& {
            if (!j.is_object() || !j.contains(key))
                throw ConfigError(path + "." + key + ": missing");
            const auto& v = j.at(key);
            return v;
        };
        auto num = [&](const char* key) -> double {
            const auto& v = need(key);
            if (!v.is_number()) throw ConfigError(path + "." + key + ": expected a number");
            return v.get<double>();
        };
        const auto& fam = need("family");
        if (!fam.is_string()) throw ConfigError(path + ".family: expected a string");
        std::string f = fam.get<std::string>();
        try {
            if (f == "zero") return zero();
            if (f == "constant") return constant(num("value"));
            if (f == "affine") return affine(num("intercept"), num("slope"));
            if (f == "identity") return identity();
            if (f == "clamp") return clamp(num("lo"), num("hi"));
            if (f == "power_clamp") return power_clamp(num("lo"), num("hi"), num("power"));
            if (f == "call") return call(num("strike"));
            if (f == "put") return put(num("strike"));
            if (f == "cutoff_call") return cutoff_call(num("strike"), num("cap"));
            if (f == "table") {
                const auto& xs = need("x");
                const auto& ys = need("y");
                if (!xs.is_array() || !ys.is_array())
                    throw ConfigError(path + ".x/.y: expected arrays");
                return table(xs.get<std::vector<double>>(), ys.get<std::vector<double>>());
            }
        } catch (const ContractViolation& e) {
            throw ConfigError(path + ": " + e.what());
        }
        throw ConfigError(path + ".family: unknown family '" + f + "'");
    }

    bool operator==(const ScalarFunction& other) const { return to_json() == other.to_json(); }

 private:
    using Rep =
        std::variant<Constant, Affine, Clamp, PowerClamp, Call, Put, CutoffCall, Table>;

    explicit ScalarFunction(Rep rep) : rep_(std::move(rep)) {}

    std::vector<double> kinks() const {
        return std::visit(
            [](const auto& f) -> std::vector<double> {
                using T = std::decay_t<decltype(f)>;
                if constexpr (std::is_same_v<T, Clamp>) {
                    return {f.lo, f.hi};
                } else if constexpr (std::is_same_v<T, PowerClamp>) {
                    return {f.lo, f.hi};
                } else if constexpr (std::is_same_v<T, Call>) {
                    return {f.strike};
                } else if constexpr (std::is_same_v<T, Put>) {
                    return {f.strike};
                } else if constexpr (std::is_same_v<T, CutoffCall>) {
                    return {f.strike, f.strike + f.cap};
                } else if constexpr (std::is_same_v<T, Table>) {
                    return f.xs;
                } else {
                    return {};
                }
            },
            rep_);
    }

    Rep rep_;
};

}  // namespace robustmc
