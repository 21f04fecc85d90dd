#pragma once

#include <complex>
#include <numbers>
#include <vector>

namespace gluni {

using cd = std::complex<double>;
using std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;
inline constexpr cd I{0.0, 1.0};

// <a, b> as vectors of R^2
[[nodiscard]] inline double dot(cd a, cd b) { return a.real() * b.real() + a.imag() * b.imag(); }
// a ^ b = det[a b]
[[nodiscard]] inline double wedge(cd a, cd b) { return a.real() * b.imag() - a.imag() * b.real(); }

}  // namespace gluni
