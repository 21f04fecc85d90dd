#pragma once

#include <cstddef>
#include <vector>

namespace gluni {

struct GaussRule {
  std::vector<double> nodes;    // on [-1, 1], ascending
  std::vector<double> weights;
};

// n-point Gauss-Legendre rule; cached per n, thread safe.
[[nodiscard]] const GaussRule& gauss_legendre(std::size_t n);

// Panels of [0, 1] whose widths shrink geometrically by `ratio` toward 1.
// Returns quadrature nodes/weights for integrals over [0, 1].
struct LineRule {
  std::vector<double> x;
  std::vector<double> w;
};
[[nodiscard]] LineRule clustered_rule(std::size_t panels, std::size_t order, double ratio);
[[nodiscard]] LineRule gauss_on(double a, double b, std::size_t order);

}  // namespace gluni
