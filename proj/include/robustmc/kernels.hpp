#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "robustmc/errors.hpp"
#include "robustmc/linalg.hpp"
#include "robustmc/model.hpp"

namespace robustmc {

enum class KernelKind {
    RobustCRR,            // Rademacher innovation, drift/vol controlled separately (k = 2)
    RobustBinomial,       // up/down jumps with uncertain sizes (k = 4)
    MartingaleBinomial,   // zero-drift weights, exact first moments (k = 4)
    SymmetricRademacher,  // +-sqrt(h) sigma with probability 1/2, zero drift (k = 1)
};

inline const char* kernel_kind_name(KernelKind k) {
    switch (k) {
        case KernelKind::RobustCRR: return "robust_crr";
        case KernelKind::RobustBinomial: return "robust_binomial";
        case KernelKind::MartingaleBinomial: return "martingale_binomial";
        default: return "symmetric_rademacher";
    }
}

inline int kernel_control_dim(KernelKind k) {
    switch (k) {
        case KernelKind::RobustCRR: return 2;
        case KernelKind::RobustBinomial: return 4;
        case KernelKind::MartingaleBinomial: return 4;
        default: return 1;
    }
}

struct KernelSpec {
    KernelKind kind = KernelKind::SymmetricRademacher;
    CoefficientBand band;
    double h = 0.0;

    int control_dim() const { return kernel_control_dim(kind); }

    // Conservative validity threshold for the martingale binomial kernel:
    // the largest h with sqrt(h) * C^{3/2} < sqrt(1/C), i.e. h < C^{-4},
    // which guarantees u_h > 0 > d_h on the whole band.
    double h_max() const {
        if (kind != KernelKind::MartingaleBinomial)
            return std::numeric_limits<double>::infinity();
        double c = band.bound_C;
        return 1.0 / (c * c * c * c);
    }

    void validate() const {
        if (!(h > 0.0)) throw ContractViolation("KernelSpec: h must be positive");
        if (kind == KernelKind::MartingaleBinomial && h >= h_max())
            throw InvalidKernelError(
                "martingale_binomial: h=" + std::to_string(h) +
                " >= h_max=" + std::to_string(h_max()) +
                " (sign condition u_h > 0 > d_h not guaranteed)");
    }
};

struct Atom {
    Vec2 point;
    double weight;
};

// Exact two-atom realization of one member of the kernel family.
struct WeightedSupport {
    std::array<Atom, 2> atoms;
};

inline WeightedSupport support(const KernelSpec& spec, const ControlPoint& lam, const Vec2& x) {
    spec.validate();
    if (lam.dim() != spec.control_dim())
        throw ContractViolation(std::string("support: control dimension ") +
                                std::to_string(lam.dim()) + " does not match kernel " +
                                kernel_kind_name(spec.kind));
    const CoefficientBand& band = spec.band;
    double h = spec.h;
    double sh = std::sqrt(h);
    double x1 = x[0], x2 = x[1];

    switch (spec.kind) {
        case KernelKind::SymmetricRademacher: {
            double s = sigma(band, lam[0], x2);
            return {{Atom{{x1 + sh, x2 + sh * s}, 0.5}, Atom{{x1 - sh, x2 - sh * s}, 0.5}}};
        }
        case KernelKind::RobustCRR: {
            double b = drift(band, lam[0], x2);
            double s = sigma(band, lam[1], x2);
            return {{Atom{{x1 + sh, x2 + b * h + s * sh}, 0.5},
                     Atom{{x1 - sh, x2 + b * h - s * sh}, 0.5}}};
        }
        case KernelKind::RobustBinomial: {
            double a3 = sigma(band, lam[2], x2);  // sqrt(a_* + l3 (a^* - a_*))
            double a4 = sigma(band, lam[3], x2);
            double p = a4 / (a4 + a3);
            double v = std::sqrt(a3 / a4);
            double u = h * drift(band, lam[0], x2) + sh * a3;
            double d = h * drift(band, lam[1], x2) - sh * a4;
            return {{Atom{{x1 + sh * v, x2 + u}, p}, Atom{{x1 - sh / v, x2 + d}, 1.0 - p}}};
        }
        default: {  // MartingaleBinomial
            double a3 = sigma(band, lam[2], x2);
            double a4 = sigma(band, lam[3], x2);
            double u = h * drift(band, lam[0], x2) + sh * a3;
            double d = h * drift(band, lam[1], x2) - sh * a4;
            if (!(u > 0.0) || !(d < 0.0))
                throw InvalidKernelError(
                    "martingale_binomial: sign condition u_h > 0 > d_h violated at x=" +
                    std::to_string(x2) + " (u_h=" + std::to_string(u) +
                    ", d_h=" + std::to_string(d) + ")");
            double v = std::sqrt(a3 * a4);  // (a3^2 a4^2)^{1/4}
            double w_up = d / (d - u);
            return {{Atom{{x1 - v * h / d, x2 + u}, w_up},
                     Atom{{x1 - v * h / u, x2 + d}, 1.0 - w_up}}};
        }
    }
}

// Coefficients the truncated kernel moments must converge to as h -> 0.
inline LimitCoefficients limit_coefficients(const KernelSpec& spec) {
    CoefficientBand band = spec.band;
    switch (spec.kind) {
        case KernelKind::SymmetricRademacher:
            return {[](const ControlPoint&, double) { return 0.0; },
                    [band](const ControlPoint& l, double x) { return sigma(band, l[0], x); }};
        case KernelKind::RobustCRR:
            return {[band](const ControlPoint& l, double x) { return drift(band, l[0], x); },
                    [band](const ControlPoint& l, double x) { return sigma(band, l[1], x); }};
        case KernelKind::RobustBinomial:
            return {[band](const ControlPoint& l, double x) {
                        double a3 = sigma(band, l[2], x), a4 = sigma(band, l[3], x);
                        double p = a4 / (a4 + a3);
                        return p * drift(band, l[0], x) + (1.0 - p) * drift(band, l[1], x);
                    },
                    [band](const ControlPoint& l, double x) {
                        return std::sqrt(sigma(band, l[2], x) * sigma(band, l[3], x));
                    }};
        default:  // MartingaleBinomial
            return {[](const ControlPoint&, double) { return 0.0; },
                    [band](const ControlPoint& l, double x) {
                        return std::sqrt(sigma(band, l[2], x) * sigma(band, l[3], x));
                    }};
    }
}

struct MomentReport {
    Vec2 b_h{};           // (1/h) truncated first moment
    Mat2 a_h{};           // (1/h) truncated second moment
    double tail_mass_unit = 0.0;  // (1/h) mass at distance >= 1 (the truncation ball)
    double drift_residual = 0.0;      // max-abs of b_h - extended drift
    double diffusion_residual = 0.0;  // max-abs entry of a_h - extended diffusion
};

inline MomentReport approx_moments(const KernelSpec& spec, const ControlPoint& lam,
                                   const Vec2& x) {
    WeightedSupport sup = support(spec, lam, x);
    MomentReport rep;
    rep.a_h = {{{0.0, 0.0}, {0.0, 0.0}}};
    rep.b_h = {0.0, 0.0};
    for (const Atom& atom : sup.atoms) {
        Vec2 dz = atom.point - x;
        if (norm(dz) > 1.0) {
            rep.tail_mass_unit += atom.weight;
            continue;  // outside the unit ball: excluded from the truncated moments
        }
        for (int i = 0; i < 2; ++i) {
            rep.b_h[i] += atom.weight * dz[i];
            for (int j = 0; j < 2; ++j) rep.a_h[i][j] += atom.weight * dz[i] * dz[j];
        }
    }
    for (int i = 0; i < 2; ++i) {
        rep.b_h[i] /= spec.h;
        for (int j = 0; j < 2; ++j) rep.a_h[i][j] /= spec.h;
    }
    rep.tail_mass_unit /= spec.h;
    LimitCoefficients lim = limit_coefficients(spec);
    rep.drift_residual = max_abs(rep.b_h - lim.extended_drift(lam, x[1]));
    rep.diffusion_residual = max_abs(rep.a_h - lim.extended_diffusion(lam, x[1]));
    return rep;
}

// (1/h) * max over the probe lattice of the kernel mass at distance >= eps.
// Exact per probe point for two-atom kernels.
inline double tail_mass(const KernelSpec& spec, double eps, const ControlGrid& lam_grid,
                        std::span<const Vec2> x_probes) {
    if (!(eps > 0.0) || !std::isfinite(eps))
        throw ContractViolation("tail_mass: eps must be positive and finite");
    if (x_probes.empty()) throw ContractViolation("tail_mass: empty probe set");
    if (lam_grid.dim() != spec.control_dim())
        throw ContractViolation("tail_mass: control grid dimension mismatch");
    double worst = 0.0;
    for (std::size_t li = 0; li < lam_grid.size(); ++li) {
        ControlPoint lam = lam_grid.point(li);
        for (const Vec2& x : x_probes) {
            WeightedSupport sup = support(spec, lam, x);
            double mass = 0.0;
            for (const Atom& atom : sup.atoms)
                if (norm(atom.point - x) >= eps) mass += atom.weight;
            worst = std::max(worst, mass);
        }
    }
    return worst / spec.h;
}

// Closed-form bound on the largest possible jump norm, from the band
// constant C alone. Increasing in h on the kernel's valid regime.
inline double jump_norm_bound(KernelKind kind, double bound_C, double h) {
    double c = bound_C;
    double sh = std::sqrt(h);
    double state = h * c + sh * std::sqrt(c);
    double driver;
    switch (kind) {
        case KernelKind::RobustBinomial:
            driver = sh * std::sqrt(c);  // v in [C^{-1/2}, C^{1/2}]
            break;
        case KernelKind::MartingaleBinomial: {
            double denom = std::sqrt(1.0 / c) - sh * c;  // min |d_h|, |u_h| over the band, / sqrt(h)
            if (!(denom > 0.0)) return std::numeric_limits<double>::infinity();
            driver = std::sqrt(c) * sh / denom;
            break;
        }
        default:
            driver = sh;
            break;
    }
    return std::hypot(driver, state);
}

// Largest h with jump_norm_bound < eps: below it the tail functional at
// level eps is exactly zero.
inline double tail_zero_threshold(KernelKind kind, double bound_C, double eps) {
    double lo = 0.0, hi = 1.0;
    if (jump_norm_bound(kind, bound_C, hi) < eps) return hi;
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        if (jump_norm_bound(kind, bound_C, mid) < eps)
            lo = mid;
        else
            hi = mid;
    }
    return lo;
}

struct ConvergenceRow {
    double h = 0.0;
    double sup_res_b = 0.0;           // sup over the probe lattice of the drift residual
    double sup_res_a = 0.0;           // sup over the probe lattice of the diffusion residual
    std::vector<double> delta_eps;    // tail functional, one entry per eps
};

struct ConvergenceReport {
    std::vector<double> eps_list;
    std::vector<ConvergenceRow> rows;  // ordered as h_list (decreasing h)
    bool drift_residual_vanishing = true;
    bool diffusion_residual_vanishing = true;
    bool tail_vanishing = true;
};

inline ConvergenceReport verify_convergence(
    const std::function<KernelSpec(double)>& spec_factory, std::span<const double> h_list,
    const ControlGrid& lam_grid, std::span<const Vec2> x_probes,
    std::span<const double> eps_list) {
    if (h_list.size() < 2) throw ContractViolation("verify_convergence: need >= 2 step sizes");
    for (std::size_t i = 1; i < h_list.size(); ++i)
        if (!(h_list[i] < h_list[i - 1]))
            throw ContractViolation("verify_convergence: h_list must be strictly decreasing");

    ConvergenceReport report;
    report.eps_list.assign(eps_list.begin(), eps_list.end());
    for (double h : h_list) {
        KernelSpec spec = spec_factory(h);
        ConvergenceRow row;
        row.h = h;
        for (std::size_t li = 0; li < lam_grid.size(); ++li) {
            ControlPoint lam = lam_grid.point(li);
            for (const Vec2& x : x_probes) {
                MomentReport m = approx_moments(spec, lam, x);
                row.sup_res_b = std::max(row.sup_res_b, m.drift_residual);
                row.sup_res_a = std::max(row.sup_res_a, m.diffusion_residual);
            }
        }
        for (double eps : eps_list)
            row.delta_eps.push_back(tail_mass(spec, eps, lam_grid, x_probes));
        report.rows.push_back(std::move(row));
    }

    // Trend flags: the finest-h row should not exceed the coarsest-h row.
    // The floor absorbs rounding noise, which scales like eps/h and would
    // otherwise read as growth when the true residual is zero.
    const ConvergenceRow& first = report.rows.front();
    const ConvergenceRow& last = report.rows.back();
    double floor = 1e-10;
    report.drift_residual_vanishing = last.sup_res_b <= std::max(first.sup_res_b, floor);
    report.diffusion_residual_vanishing = last.sup_res_a <= std::max(first.sup_res_a, floor);
    for (std::size_t e = 0; e < report.eps_list.size(); ++e)
        if (last.delta_eps[e] > std::max(first.delta_eps[e], floor))
            report.tail_vanishing = false;
    return report;
}

}  // namespace robustmc
