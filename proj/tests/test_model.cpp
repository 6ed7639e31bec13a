#include <cmath>

#include <catch2/catch_amalgamated.hpp>

#include "helpers.hpp"
#include "robustmc/model.hpp"

using namespace robustmc;

TEST_CASE("sigma interpolates the variance band") {
    CoefficientBand band = testutil::power_band();
    // Endpoints of the band.
    CHECK(sigma(band, 0.0, 2.0) == std::sqrt(2.0));
    CHECK(sigma(band, 1.0, 2.0) == 2.0);
    // Midpoint: a_*(2) = 2, a^*(2) = 4, so sigma = sqrt(3).
    CHECK(sigma(band, 0.5, 2.0) == Catch::Approx(std::sqrt(3.0)).epsilon(1e-15));
    CHECK(sigma(band, 0.5, 2.0) == Catch::Approx(1.7320508).epsilon(1e-7));
}

TEST_CASE("drift interpolates the drift band") {
    CoefficientBand band = testutil::const_band(-1.0, 3.0, 1.0, 1.0, 3.0);
    CHECK(drift(band, 0.0, 5.0) == -1.0);
    CHECK(drift(band, 1.0, 5.0) == 3.0);
    CHECK(drift(band, 0.25, 5.0) == 0.0);
}

TEST_CASE("band validation") {
    CoefficientBand ok = testutil::const_band(-0.5, 0.5, 0.9, 1.1, 1.2);
    CHECK_NOTHROW(ok.validate_on(-10.0, 10.0));

    CoefficientBand crossed = testutil::const_band(0.5, -0.5, 1.0, 1.0, 1.0);
    CHECK_THROWS_AS(crossed.validate_at(0.0), ConfigError);

    // a_lower below 1/C violates the uniform ellipticity bound.
    CoefficientBand thin = testutil::const_band(0.0, 0.0, 0.1, 1.0, 2.0);
    CHECK_THROWS_AS(thin.validate_at(0.0), ConfigError);

    CoefficientBand bad_c = testutil::const_band(0.0, 0.0, 1.0, 1.0, -1.0);
    CHECK_THROWS_AS(bad_c.validate_at(0.0), ConfigError);
}

TEST_CASE("control points") {
    ControlPoint p{0.25, 1.0};
    CHECK(p.dim() == 2);
    CHECK(p[0] == 0.25);
    CHECK(p[1] == 1.0);
    CHECK(p == ControlPoint::from_vector({0.25, 1.0}));

    CHECK_THROWS_AS((ControlPoint{0.1, 0.2, 0.3}), ContractViolation);
    CHECK_THROWS_AS((ControlPoint{1.5}), ContractViolation);
    CHECK_THROWS_AS((ControlPoint{-0.1, 0.0}), ContractViolation);
    CHECK_THROWS_AS(ControlPoint::from_vector({0.1, 0.2, 0.3}), ContractViolation);
}

TEST_CASE("control grid enumeration") {
    ControlGrid g(2, 3);
    CHECK(g.size() == 9);
    CHECK(g.axis_value(0) == 0.0);
    CHECK(g.axis_value(1) == 0.5);
    CHECK(g.axis_value(2) == 1.0);

    // First coordinate slowest: flat index 1 advances the last axis.
    CHECK(g.point(0) == ControlPoint{0.0, 0.0});
    CHECK(g.point(1) == ControlPoint{0.0, 0.5});
    CHECK(g.point(3) == ControlPoint{0.5, 0.0});
    CHECK(g.point(8) == ControlPoint{1.0, 1.0});

    CHECK_THROWS_AS(ControlGrid(3, 3), ContractViolation);
    CHECK_THROWS_AS(ControlGrid(1, 1), ContractViolation);
}

TEST_CASE("refined lattice contains the coarse one exactly") {
    for (int n : {2, 3, 5, 9}) {
        ControlGrid coarse(1, n);
        ControlGrid fine = coarse.refined();
        CHECK(fine.points_per_axis() == 2 * (n - 1) + 1);
        for (int i = 0; i < n; ++i)
            CHECK(fine.axis_value(2 * i) == coarse.axis_value(i));  // bitwise
    }
}

TEST_CASE("limit coefficient extensions") {
    LimitCoefficients lim;
    lim.drift = [](const ControlPoint&, double) { return 0.5; };
    lim.vol = [](const ControlPoint&, double) { return 2.0; };
    ControlPoint lam{0.0};
    Vec2 b = lim.extended_drift(lam, 1.0);
    CHECK(b[0] == 0.0);
    CHECK(b[1] == 0.5);
    Mat2 a = lim.extended_diffusion(lam, 1.0);
    CHECK(a[0][0] == 1.0);
    CHECK(a[0][1] == 2.0);
    CHECK(a[1][0] == 2.0);
    CHECK(a[1][1] == 4.0);
}

TEST_CASE("lipschitz estimate") {
    CHECK(lipschitz_estimate(testutil::const_band(0.0, 0.0, 1.0, 4.0, 4.0), 0.0, 10.0, 101) ==
          0.0);

    // sqrt(clamp(x,1,30)) has derivative <= 1/2 on [1, 30].
    CoefficientBand band;
    band.b_lower = ScalarFunction::zero();
    band.b_upper = ScalarFunction::zero();
    band.a_lower = ScalarFunction::clamp(1.0, 30.0);
    band.a_upper = ScalarFunction::clamp(1.0, 30.0);
    band.bound_C = 30.0;
    double est = lipschitz_estimate(band, 1.0, 30.0, 2001);
    CHECK(est <= 0.5);
    CHECK(est > 0.4);

    // Steep table segment: large but finite, reported not rejected.
    CoefficientBand steep = band;
    steep.a_lower = ScalarFunction::table({0.0, 1e-6, 1.0}, {1.0, 25.0, 25.0});
    steep.a_upper = steep.a_lower;
    double big = lipschitz_estimate(steep, 0.0, 1.0, 3001);
    CHECK(std::isfinite(big));
    CHECK(big > 100.0);

    CHECK_THROWS_AS(lipschitz_estimate(band, 0.0, 1.0, 1), ContractViolation);
}

TEST_CASE("lipschitz estimate rejects non-finite coefficients naming the probe") {
    CoefficientBand band;
    band.b_lower = ScalarFunction::zero();
    band.b_upper = ScalarFunction::zero();
    // pow of a negative base with fractional exponent is NaN.
    band.a_lower = ScalarFunction::power_clamp(-2.0, 2.0, 0.5);
    band.a_upper = band.a_lower;
    band.bound_C = 2.0;
    try {
        lipschitz_estimate(band, -2.0, 2.0, 11);
        FAIL("expected NumericError");
    } catch (const NumericError& e) {
        CHECK(std::string(e.what()).find("x=") != std::string::npos);
    }
}
