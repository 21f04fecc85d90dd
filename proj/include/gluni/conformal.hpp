#pragma once

#include <array>
#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include <json.hpp>

#include "gluni/curves.hpp"
#include "gluni/types.hpp"

namespace gluni {

// z -> (a z + b) / (c z + d), a disk automorphism.
class DiskAutomorphism {
 public:
  DiskAutomorphism() = default;
  DiskAutomorphism(cd a, cd b, cd c, cd d);

  [[nodiscard]] static DiskAutomorphism identity() { return {}; }
  // psi(z) = e^{i theta} (z - omega) / (conj(omega) z - 1)
  [[nodiscard]] static DiskAutomorphism psi(cd omega, double theta);

  [[nodiscard]] cd operator()(cd z) const;
  [[nodiscard]] cd derivative(cd z) const;
  [[nodiscard]] cd second_derivative(cd z) const;
  // M''/M'
  [[nodiscard]] cd log_derivative_ratio(cd z) const;
  [[nodiscard]] DiskAutomorphism inverse() const;
  // (*this) o inner
  [[nodiscard]] DiskAutomorphism compose(const DiskAutomorphism& inner) const;
  // (omega, theta) with *this == psi(omega, theta)
  [[nodiscard]] std::pair<cd, double> psi_params() const;
  [[nodiscard]] bool is_identity(double tol = 1e-15) const;

 private:
  std::array<cd, 4> m_{cd{1.0}, cd{0.0}, cd{0.0}, cd{1.0}};
};

enum class MapRepresentation { mobius, taylor, composite };
[[nodiscard]] std::string to_string(MapRepresentation r);

struct InverseSeeder;

// f = P o M with P a polynomial (Taylor coefficients about 0) and M a disk automorphism.
class ConformalMap {
 public:
  ConformalMap();
  ConformalMap(std::vector<cd> coefficients, DiskAutomorphism pre);

  [[nodiscard]] static ConformalMap identity();
  [[nodiscard]] static ConformalMap taylor(std::vector<cd> coefficients);

  [[nodiscard]] cd operator()(cd z) const;
  [[nodiscard]] cd derivative(cd z) const;
  [[nodiscard]] cd second_derivative(cd z) const;
  // f''/f'
  [[nodiscard]] cd pre_schwarzian(cd z) const;
  [[nodiscard]] cd base_point() const { return (*this)(0.0); }
  [[nodiscard]] cd derivative_at_0() const { return derivative(0.0); }

  // Newton from a grid seed; throws InverseFailure.
  [[nodiscard]] cd inverse(cd x) const;
  [[nodiscard]] bool try_inverse(cd x, cd& z) const;

  [[nodiscard]] MapRepresentation representation() const;
  [[nodiscard]] const std::vector<cd>& coefficients() const { return coeffs_; }
  [[nodiscard]] const DiskAutomorphism& pre() const { return pre_; }
  // Post-rotation so that f'(0) > 0.
  [[nodiscard]] ConformalMap gauge_fixed() const;
  // f composed with rotation z -> e^{i alpha} z.
  [[nodiscard]] ConformalMap precompose_rotation(double alpha) const;

  [[nodiscard]] JordanCurve boundary_curve() const;
  // Pairwise check on a polar grid and the boundary polyline; throws SelfIntersection.
  void check_injective(std::size_t n_r = 64, std::size_t n_theta = 64) const;

  [[nodiscard]] nlohmann::json to_json() const;
  [[nodiscard]] static ConformalMap from_json(const nlohmann::json& j);

 private:
  std::vector<cd> coeffs_;
  DiskAutomorphism pre_;
  std::shared_ptr<InverseSeeder> seeder_;
};

[[nodiscard]] ConformalMap mobius(cd omega, double theta);
// f0 o psi_omega^{-1} with rotation gauge f'(0) > 0; f(0) = f0(omega).
[[nodiscard]] ConformalMap rebase(const ConformalMap& f0, cd omega);

struct WPEnergy {
  double value = 0.0;
  double coarse = 0.0;
  double error_estimate = 0.0;
};
[[nodiscard]] WPEnergy wp_energy(const ConformalMap& f, std::size_t n_radial = 128, std::size_t n_angular = 256);
[[nodiscard]] double w0(const ConformalMap& f, std::size_t n_radial = 128, std::size_t n_angular = 256);

struct KoebeReport {
  double max_violation = 1.0;   // worst multiplicative excess over the two-sided bound, >= 1
  double min_lower_ratio = 0.0; // min of |f'|(1-|z|^2)/dist
  double max_upper_ratio = 0.0; // max of |f'|(1-|z|^2)/(4 dist)
};
[[nodiscard]] KoebeReport koebe_check(const ConformalMap& f, std::size_t n = 1024);

struct BoundaryTrace {
  std::vector<cd> polyline;
  std::vector<double> params;  // unit-circle parameter of each vertex
  BoundaryData tangent;
};
// Image of radius * S^1 sampled at n points; radius defaults to 1 for maps analytic across S^1.
[[nodiscard]] BoundaryTrace boundary_trace(const ConformalMap& f, std::size_t n, double radius = 1.0);

// Distance from x to the closed polyline.
[[nodiscard]] double polyline_distance(std::span<const cd> poly, cd x);

}  // namespace gluni
