#include <cmath>
#include <vector>

#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"
#include "robustmc/kernels.hpp"
#include "robustmc/rng.hpp"

using namespace robustmc;

namespace {

double weighted_first_moment(const WeightedSupport& sup, const Vec2& x, int coord) {
    return sup.atoms[0].weight * (sup.atoms[0].point[coord] - x[coord]) +
           sup.atoms[1].weight * (sup.atoms[1].point[coord] - x[coord]);
}

}  // namespace

TEST_CASE("kernel metadata") {
    CHECK(kernel_control_dim(KernelKind::SymmetricRademacher) == 1);
    CHECK(kernel_control_dim(KernelKind::RobustCRR) == 2);
    CHECK(kernel_control_dim(KernelKind::RobustBinomial) == 4);
    CHECK(kernel_control_dim(KernelKind::MartingaleBinomial) == 4);
    CHECK(std::string(kernel_kind_name(KernelKind::RobustCRR)) == "robust_crr");
}

TEST_CASE("symmetric Rademacher support") {
    KernelSpec spec{KernelKind::SymmetricRademacher, testutil::power_band(), 0.01};
    Vec2 x{0.5, 2.0};
    WeightedSupport sup = support(spec, ControlPoint{0.5}, x);
    double sh = std::sqrt(0.01);
    double s = sigma(spec.band, 0.5, 2.0);
    CHECK(sup.atoms[0].weight == 0.5);
    CHECK(sup.atoms[1].weight == 0.5);
    CHECK(sup.atoms[0].point[0] == 0.5 + sh);
    CHECK(sup.atoms[1].point[0] == 0.5 - sh);
    CHECK(sup.atoms[0].point[1] == 2.0 + sh * s);
    CHECK(sup.atoms[1].point[1] == 2.0 - sh * s);

    CHECK_THROWS_AS(support(spec, ControlPoint{0.5, 0.5}, x), ContractViolation);
}

TEST_CASE("drift-and-vol controlled support") {
    CoefficientBand band = testutil::const_band(-0.5, 0.5, 1.0, 4.0, 4.0);
    double h = 0.01, sh = 0.1;
    KernelSpec spec{KernelKind::RobustCRR, band, h};
    WeightedSupport sup = support(spec, ControlPoint{1.0, 0.0}, {0.0, 3.0});
    // lambda_1 = 1 picks drift 0.5; lambda_2 = 0 picks vol 1.
    CHECK(sup.atoms[0].point[1] == 3.0 + 0.5 * h + sh);
    CHECK(sup.atoms[1].point[1] == 3.0 + 0.5 * h - sh);
    CHECK(sup.atoms[0].point[0] == sh);
    CHECK(sup.atoms[1].point[0] == -sh);
    CHECK(sup.atoms[0].weight == 0.5);
}

TEST_CASE("up-down jump support") {
    CoefficientBand band = testutil::const_band(-0.5, 0.5, 1.0, 4.0, 4.0);
    double h = 0.01, sh = 0.1;
    KernelSpec spec{KernelKind::RobustBinomial, band, h};

    // Matching variance controls give even weights.
    WeightedSupport even = support(spec, ControlPoint{0.5, 0.5, 0.7, 0.7}, {0.0, 1.0});
    CHECK(even.atoms[0].weight == 0.5);

    // Lowest variance controls reproduce the lower interval endpoint of the
    // up jump: u = h b_lower + sqrt(h a_lower).
    WeightedSupport lo = support(spec, ControlPoint{0.0, 1.0, 0.0, 1.0}, {0.0, 1.0});
    CHECK(lo.atoms[0].point[1] - 1.0 == Catch::Approx(h * -0.5 + sh * 1.0).margin(1e-15));

    // Weights follow p = s4 / (s4 + s3) and the driver jump uses v = sqrt(s3/s4).
    WeightedSupport mix = support(spec, ControlPoint{0.0, 0.0, 0.0, 1.0}, {0.0, 1.0});
    double s3 = 1.0, s4 = 2.0;
    CHECK(mix.atoms[0].weight == s4 / (s4 + s3));
    double v = std::sqrt(s3 / s4);
    CHECK(mix.atoms[0].point[0] == sh * v);
    CHECK(mix.atoms[1].point[0] == -sh / v);
}

TEST_CASE("up-down corner controls span the jump intervals") {
    CoefficientBand band = testutil::const_band(-0.5, 0.5, 1.0, 4.0, 4.0);
    double h = 0.01, sh = 0.1;
    KernelSpec spec{KernelKind::RobustBinomial, band, h};
    double u_min = h * -0.5 + sh * 1.0, u_max = h * 0.5 + sh * 2.0;
    double d_min = h * -0.5 - sh * 2.0, d_max = h * 0.5 - sh * 1.0;

    auto ud = [&](const ControlPoint& lam) {
        WeightedSupport s = support(spec, lam, {0.0, 0.0});
        return std::pair<double, double>{s.atoms[0].point[1], s.atoms[1].point[1]};
    };
    auto [u1, d1] = ud(ControlPoint{0.0, 0.0, 0.0, 1.0});
    CHECK(u1 == Catch::Approx(u_min).margin(1e-15));
    CHECK(d1 == Catch::Approx(d_min).margin(1e-15));
    auto [u2, d2] = ud(ControlPoint{0.0, 1.0, 0.0, 0.0});
    CHECK(u2 == Catch::Approx(u_min).margin(1e-15));
    CHECK(d2 == Catch::Approx(d_max).margin(1e-15));
    auto [u3, d3] = ud(ControlPoint{1.0, 0.0, 1.0, 1.0});
    CHECK(u3 == Catch::Approx(u_max).margin(1e-15));
    CHECK(d3 == Catch::Approx(d_min).margin(1e-15));
    auto [u4, d4] = ud(ControlPoint{1.0, 1.0, 1.0, 0.0});
    CHECK(u4 == Catch::Approx(u_max).margin(1e-15));
    CHECK(d4 == Catch::Approx(d_max).margin(1e-15));
}

TEST_CASE("zero-drift binomial has exact first moments") {
    CoefficientBand band = testutil::const_band(-0.5, 0.5, 1.0, 2.0, 2.0);
    KernelSpec spec{KernelKind::MartingaleBinomial, band, 0.01};
    for (int trial = 0; trial < 200; ++trial) {
        ControlPoint lam{uniform01(7, trial, 0), uniform01(7, trial, 1), uniform01(7, trial, 2),
                         uniform01(7, trial, 3)};
        Vec2 x{2.0 * uniform01(7, trial, 4) - 1.0, 2.0 * uniform01(7, trial, 5)};
        WeightedSupport sup = support(spec, lam, x);
        CHECK(std::abs(weighted_first_moment(sup, x, 0)) <= 1e-13);
        CHECK(std::abs(weighted_first_moment(sup, x, 1)) <= 1e-13);
        CHECK(sup.atoms[0].weight + sup.atoms[1].weight == 1.0);
    }
}

TEST_CASE("zero-drift binomial validity region") {
    CoefficientBand band = testutil::const_band(-0.5, 0.5, 1.0, 2.0, 2.0);
    KernelSpec spec{KernelKind::MartingaleBinomial, band, 0.5};
    CHECK(spec.h_max() == 1.0 / 16.0);
    try {
        support(spec, ControlPoint{0.0, 0.0, 0.0, 0.0}, {0.0, 1.0});
        FAIL("expected InvalidKernelError");
    } catch (const InvalidKernelError& e) {
        CHECK(std::string(e.what()).find("u_h > 0 > d_h") != std::string::npos);
    }

    KernelSpec ok{KernelKind::MartingaleBinomial, band, 0.05};
    CHECK_NOTHROW(support(ok, ControlPoint{0.0, 0.0, 0.0, 0.0}, {0.0, 1.0}));
    KernelSpec zero_h{KernelKind::SymmetricRademacher, band, 0.0};
    CHECK_THROWS_AS(zero_h.validate(), ContractViolation);
}

TEST_CASE("truncated moments of the drift-and-vol kernel") {
    CoefficientBand band = testutil::const_band(0.2, 0.5, 0.8, 1.2, 1.3);
    KernelSpec spec{KernelKind::RobustCRR, band, 1.0 / 64.0};
    ControlPoint lam{1.0, 0.5};
    Vec2 x{0.0, 1.5};
    MomentReport rep = approx_moments(spec, lam, x);
    double b = drift(band, 1.0, 1.5);
    double s = sigma(band, 0.5, 1.5);
    // Atoms inside the unit ball: b_h = (0, b) and a_h = [[1, s],[s, s^2 + h b^2]].
    CHECK(rep.tail_mass_unit == 0.0);
    CHECK(std::abs(rep.b_h[0]) <= 1e-13);
    CHECK(rep.b_h[1] == Catch::Approx(b).margin(1e-12));
    CHECK(rep.a_h[0][0] == Catch::Approx(1.0).margin(1e-13));
    CHECK(rep.a_h[0][1] == Catch::Approx(s).margin(1e-12));
    CHECK(rep.a_h[1][1] == Catch::Approx(s * s + spec.h * b * b).margin(1e-12));
    CHECK(rep.drift_residual <= 1e-12);
    CHECK(rep.diffusion_residual == Catch::Approx(spec.h * b * b).margin(1e-12));
}

TEST_CASE("atoms leaving the unit ball drop out of the truncated moments") {
    CoefficientBand band = testutil::const_band(0.0, 0.0, 1.0, 4.0, 4.0);
    KernelSpec spec{KernelKind::RobustCRR, band, 0.9};
    // sqrt(h) sigma = 0.9487 * 2 > 1: both atoms outside the ball.
    MomentReport rep = approx_moments(spec, ControlPoint{0.0, 1.0}, {0.0, 0.0});
    CHECK(rep.tail_mass_unit == Catch::Approx(1.0 / 0.9));
    CHECK(rep.b_h[0] == 0.0);
    CHECK(rep.b_h[1] == 0.0);
    CHECK(rep.a_h[1][1] == 0.0);
}

TEST_CASE("tail functional") {
    CoefficientBand band = testutil::const_band(0.2, 0.5, 0.8, 1.2, 1.3);
    std::vector<Vec2> probes{{0.0, 0.5}, {0.0, 1.0}, {0.0, 2.0}};
    ControlGrid lam(2, 3);

    KernelSpec small{KernelKind::RobustCRR, band, 1.0 / 256.0};
    CHECK(tail_mass(small, 1.0, lam, probes) == 0.0);
    // Every jump is larger than a tiny eps, so the full mass escapes.
    CHECK(tail_mass(small, 1e-6, lam, probes) == Catch::Approx(256.0));
    // eps above the closed-form jump bound keeps the tail empty.
    double c = band.bound_C;
    double eps_big = 10.0 * c * (std::sqrt(small.h) + small.h);
    CHECK(tail_mass(small, eps_big, lam, probes) == 0.0);

    CHECK_THROWS_AS(tail_mass(small, 0.0, lam, probes), ContractViolation);
    CHECK_THROWS_AS(tail_mass(small, 1.0, ControlGrid(1, 3), probes), ContractViolation);
}

TEST_CASE("jump bound and tail-zero threshold") {
    for (KernelKind kind : {KernelKind::SymmetricRademacher, KernelKind::RobustCRR,
                            KernelKind::RobustBinomial, KernelKind::MartingaleBinomial}) {
        double c = 1.3;
        CHECK(jump_norm_bound(kind, c, 0.001) < jump_norm_bound(kind, c, 0.01));
        double h_star = tail_zero_threshold(kind, c, 0.5);
        CHECK(h_star > 0.0);
        CHECK(jump_norm_bound(kind, c, 0.5 * h_star) < 0.5);

        CoefficientBand band = testutil::const_band(-0.2, 0.3, 0.8, 1.2, c);
        KernelSpec spec{kind, band, 0.5 * h_star};
        std::vector<Vec2> probes{{0.0, 0.0}, {0.0, 1.0}};
        ControlGrid lam(kernel_control_dim(kind), 3);
        CHECK(tail_mass(spec, 0.5, lam, probes) == 0.0);
    }
}

TEST_CASE("moment convergence report") {
    CoefficientBand band = testutil::const_band(0.2, 0.5, 0.8, 1.2, 1.3);
    std::vector<double> h_list;
    for (int e = 3; e <= 10; ++e) h_list.push_back(std::pow(2.0, -e));
    std::vector<Vec2> probes;
    for (int i = 0; i <= 10; ++i) probes.push_back({0.0, 0.2 * i});
    ControlGrid lam(2, 3);
    std::vector<double> eps{0.5};

    ConvergenceReport rep = verify_convergence(
        [&](double h) { return KernelSpec{KernelKind::RobustCRR, band, h}; }, h_list, lam,
        probes, eps);
    REQUIRE(rep.rows.size() == h_list.size());
    CHECK(rep.drift_residual_vanishing);
    CHECK(rep.diffusion_residual_vanishing);
    CHECK(rep.tail_vanishing);
    for (const ConvergenceRow& row : rep.rows) {
        CHECK(row.sup_res_b <= 1e-12);
        // Diffusion residual is h * sup b^2 = 0.25 h for this band.
        CHECK(row.sup_res_a == Catch::Approx(0.25 * row.h).margin(1e-12));
    }
    // log-log slope of the diffusion residual is 1.
    double slope = std::log(rep.rows.front().sup_res_a / rep.rows.back().sup_res_a) /
                   std::log(rep.rows.front().h / rep.rows.back().h);
    CHECK(slope == Catch::Approx(1.0).margin(0.1));

    std::vector<double> bad{0.1, 0.2};
    CHECK_THROWS_AS(verify_convergence(
                        [&](double h) { return KernelSpec{KernelKind::RobustCRR, band, h}; },
                        bad, lam, probes, eps),
                    ContractViolation);
}
