#pragma once

#include <cmath>
#include <complex>
#include <numbers>

#include "fusionlab/fusion.hpp"

namespace fusionlab::testing {

inline constexpr double kPi = std::numbers::pi;
inline const double kRt2 = std::sqrt(2.0);

inline StateCoefficients bell() { return {1.0 / kRt2, 0.0, 0.0, 1.0 / kRt2}; }
inline StateCoefficients weighted_example() { return {0.5, Complex(0.0, 0.5), 0.0, 1.0 / kRt2}; }

// Global phase of y relative to x, taken from the largest component.
inline Complex relative_phase(const StateCoefficients &x, const StateCoefficients &y) {
    Complex ov = std::conj(x.a) * y.a + std::conj(x.b) * y.b + std::conj(x.c) * y.c + std::conj(x.d) * y.d;
    return std::abs(ov) > 0 ? ov / std::abs(ov) : Complex(1.0, 0.0);
}

}  // namespace fusionlab::testing
