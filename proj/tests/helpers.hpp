#pragma once

// Shared fixtures for the unit and acceptance suites.

#include <vector>

#include "robustmc/model.hpp"
#include "robustmc/scalar_function.hpp"

namespace testutil {

// Constant band with explicit bound constant.
inline robustmc::CoefficientBand const_band(double b_lo, double b_hi, double a_lo, double a_hi,
                                            double c) {
    robustmc::CoefficientBand band;
    band.b_lower = robustmc::ScalarFunction::constant(b_lo);
    band.b_upper = robustmc::ScalarFunction::constant(b_hi);
    band.a_lower = robustmc::ScalarFunction::constant(a_lo);
    band.a_upper = robustmc::ScalarFunction::constant(a_hi);
    band.bound_C = c;
    return band;
}

// The volatility-uncertainty band of the bundled convergence experiment.
inline robustmc::CoefficientBand power_band() {
    robustmc::CoefficientBand band;
    band.b_lower = robustmc::ScalarFunction::zero();
    band.b_upper = robustmc::ScalarFunction::zero();
    band.a_lower = robustmc::ScalarFunction::clamp(1.0, 30.0);
    band.a_upper = robustmc::ScalarFunction::power_clamp(1.0, 30.0, 2.0);
    band.bound_C = 900.0;
    return band;
}

// Bands used by the constant-invariance sweep: every one keeps the
// martingale binomial kernel valid at h = 1/10 (bound_C^4 < 10).
inline std::vector<robustmc::CoefficientBand> band_catalogue() {
    std::vector<robustmc::CoefficientBand> bands;
    bands.push_back(const_band(0.0, 0.0, 1.0, 1.0, 1.0));
    bands.push_back(const_band(-0.1, 0.1, 0.8, 1.25, 1.25));
    robustmc::CoefficientBand varying;
    varying.b_lower = robustmc::ScalarFunction::constant(-0.2);
    varying.b_upper = robustmc::ScalarFunction::constant(0.3);
    varying.a_lower = robustmc::ScalarFunction::clamp(0.9, 1.1);
    varying.a_upper = robustmc::ScalarFunction::clamp(0.95, 1.2);
    varying.bound_C = 1.3;
    bands.push_back(varying);
    return bands;
}

}  // namespace testutil
