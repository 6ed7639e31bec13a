#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <initializer_list>
#include <string>
#include <vector>

#include "robustmc/errors.hpp"
#include "robustmc/linalg.hpp"
#include "robustmc/scalar_function.hpp"

namespace robustmc {

// Drift band [b_lower, b_upper] and variance band [a_lower, a_upper],
// both bounded by a global constant: -C <= b <= C and 1/C <= a <= C.
struct CoefficientBand {
    ScalarFunction b_lower, b_upper, a_lower, a_upper;
    double bound_C = 1.0;

    // Pointwise invariant check, used by config validation and diagnostics.
    void validate_at(double x, const std::string& where = "band") const {
        double bl = b_lower(x), bu = b_upper(x), al = a_lower(x), au = a_upper(x);
        if (!(bound_C > 0.0)) throw ConfigError(where + ".bound_c: must be positive");
        if (!(-bound_C <= bl && bl <= bu && bu <= bound_C))
            throw ConfigError(where + ": drift band violated at x=" + std::to_string(x) +
                              " (need -C <= b_lower <= b_upper <= C)");
        if (!(1.0 / bound_C <= al && al <= au && au <= bound_C))
            throw ConfigError(where + ": variance band violated at x=" + std::to_string(x) +
                              " (need 1/C <= a_lower <= a_upper <= C)");
    }

    void validate_on(double x_min, double x_max, int probes = 101,
                     const std::string& where = "band") const {
        for (int i = 0; i < probes; ++i) {
            double x = x_min + (x_max - x_min) * i / (probes - 1);
            validate_at(x, where);
        }
    }
};

// sigma(lambda, x) = sqrt(a_lower(x) + lambda * (a_upper(x) - a_lower(x))).
inline double sigma(const CoefficientBand& band, double lambda, double x) {
    double al = band.a_lower(x);
    return std::sqrt(al + lambda * (band.a_upper(x) - al));
}

inline double drift(const CoefficientBand& band, double lambda, double x) {
    double bl = band.b_lower(x);
    return bl + lambda * (band.b_upper(x) - bl);
}

// A point of the action space [0,1]^k with k in {1, 2, 4}.
class ControlPoint {
 public:
    ControlPoint() : dim_(1) { coords_.fill(0.0); }

    ControlPoint(std::initializer_list<double> vals) {
        if (vals.size() != 1 && vals.size() != 2 && vals.size() != 4)
            throw ContractViolation("ControlPoint: dimension must be 1, 2 or 4");
        dim_ = static_cast<int>(vals.size());
        coords_.fill(0.0);
        int i = 0;
        for (double v : vals) {
            if (!(v >= 0.0 && v <= 1.0))
                throw ContractViolation("ControlPoint: coordinate outside [0,1]");
            coords_[i++] = v;
        }
    }

    static ControlPoint from_vector(const std::vector<double>& vals) {
        switch (vals.size()) {
            case 1: return {vals[0]};
            case 2: return {vals[0], vals[1]};
            case 4: return {vals[0], vals[1], vals[2], vals[3]};
            default:
                throw ContractViolation("ControlPoint: dimension must be 1, 2 or 4");
        }
    }

    int dim() const { return dim_; }
    double operator[](int i) const { return coords_[static_cast<std::size_t>(i)]; }

    bool operator==(const ControlPoint& o) const {
        return dim_ == o.dim_ && coords_ == o.coords_;
    }

 private:
    std::array<double, 4> coords_;
    int dim_;
};

// Uniform lattice over [0,1]^k including all corners. Flat enumeration is
// lexicographic with the first coordinate slowest, so "smallest flat index"
// matches "lexicographically smallest control" for tie-breaking.
class ControlGrid {
 public:
    ControlGrid(int dim, int points_per_axis) : dim_(dim), n_(points_per_axis) {
        if (dim != 1 && dim != 2 && dim != 4)
            throw ContractViolation("ControlGrid: dimension must be 1, 2 or 4");
        if (n_ < 2) throw ContractViolation("ControlGrid: points_per_axis must be >= 2");
    }

    int dim() const { return dim_; }
    int points_per_axis() const { return n_; }

    std::size_t size() const {
        std::size_t s = 1;
        for (int i = 0; i < dim_; ++i) s *= static_cast<std::size_t>(n_);
        return s;
    }

    double axis_value(int i) const { return static_cast<double>(i) / (n_ - 1); }

    ControlPoint point(std::size_t flat) const {
        std::array<double, 4> c{0.0, 0.0, 0.0, 0.0};
        for (int ax = dim_ - 1; ax >= 0; --ax) {
            c[static_cast<std::size_t>(ax)] = axis_value(static_cast<int>(flat % n_));
            flat /= static_cast<std::size_t>(n_);
        }
        switch (dim_) {
            case 1: return {c[0]};
            case 2: return {c[0], c[1]};
            default: return {c[0], c[1], c[2], c[3]};
        }
    }

    std::vector<ControlPoint> enumerate() const {
        std::vector<ControlPoint> pts;
        pts.reserve(size());
        for (std::size_t i = 0; i < size(); ++i) pts.push_back(point(i));
        return pts;
    }

    // Lattice with 2*(n-1)+1 points per axis; a strict superset of this one.
    ControlGrid refined() const { return ControlGrid(dim_, 2 * (n_ - 1) + 1); }

 private:
    int dim_;
    int n_;
};

// Limit coefficients of the approximating kernels, specialized to one state
// coordinate and one driver coordinate (d = 2).
struct LimitCoefficients {
    std::function<double(const ControlPoint&, double)> drift;  // b(lambda, x)
    std::function<double(const ControlPoint&, double)> vol;    // sigma(lambda, x)

    Vec2 extended_drift(const ControlPoint& lam, double x) const {
        return {0.0, drift(lam, x)};
    }

    Mat2 extended_diffusion(const ControlPoint& lam, double x) const {
        double s = vol(lam, x);
        return {{{1.0, s}, {s, s * s}}};
    }
};

// Probe-based lower estimate of the Lipschitz constant of
// (x, lambda) -> (b(lambda, x), sigma(lambda, x)); reported as a warning
// threshold, not a hard gate.
inline double lipschitz_estimate(const CoefficientBand& band, double x_min, double x_max,
                                 int probe_count, int lambda_points = 11) {
    if (probe_count < 2) throw ContractViolation("lipschitz_estimate: probe_count must be >= 2");
    double best = 0.0;
    for (int li = 0; li < lambda_points; ++li) {
        double lam = static_cast<double>(li) / (lambda_points - 1);
        double prev_x = x_min;
        double prev_b = drift(band, lam, prev_x);
        double prev_s = sigma(band, lam, prev_x);
        if (!std::isfinite(prev_b) || !std::isfinite(prev_s))
            throw NumericError("lipschitz_estimate: non-finite coefficient at (lambda=" +
                               std::to_string(lam) + ", x=" + std::to_string(prev_x) + ")");
        for (int i = 1; i < probe_count; ++i) {
            double x = x_min + (x_max - x_min) * i / (probe_count - 1);
            double b = drift(band, lam, x);
            double s = sigma(band, lam, x);
            if (!std::isfinite(b) || !std::isfinite(s))
                throw NumericError("lipschitz_estimate: non-finite coefficient at (lambda=" +
                                   std::to_string(lam) + ", x=" + std::to_string(x) + ")");
            double quot = (std::abs(b - prev_b) + std::abs(s - prev_s)) / (x - prev_x);
            best = std::max(best, quot);
            prev_x = x;
            prev_b = b;
            prev_s = s;
        }
    }
    return best;
}

}  // namespace robustmc
