#pragma once

#include <array>
#include <cmath>

namespace robustmc {

// 2-vectors are (driver, state) pairs throughout.
using Vec2 = std::array<double, 2>;
using Mat2 = std::array<std::array<double, 2>, 2>;

inline Vec2 operator-(const Vec2& a, const Vec2& b) { return {a[0] - b[0], a[1] - b[1]}; }
inline Vec2 operator+(const Vec2& a, const Vec2& b) { return {a[0] + b[0], a[1] + b[1]}; }

inline double norm(const Vec2& a) { return std::hypot(a[0], a[1]); }

inline double max_abs(const Vec2& a) { return std::max(std::abs(a[0]), std::abs(a[1])); }

inline double max_abs(const Mat2& m) {
    double r = 0.0;
    for (const auto& row : m)
        for (double e : row) r = std::max(r, std::abs(e));
    return r;
}

inline Mat2 operator-(const Mat2& a, const Mat2& b) {
    Mat2 r;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) r[i][j] = a[i][j] - b[i][j];
    return r;
}

}  // namespace robustmc
