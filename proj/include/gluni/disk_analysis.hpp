#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "gluni/types.hpp"

namespace gluni {

// Truncated Fourier series sum_{|n|<=N} c_n e^{i n theta} of a complex boundary function.
class FourierBoundary {
 public:
  FourierBoundary() = default;
  FourierBoundary(int N, std::vector<cd> coefficients);

  // samples at theta_k = 2 pi k / M, M >= 2N + 1
  [[nodiscard]] static FourierBoundary from_samples(std::span<const cd> samples, int N);
  [[nodiscard]] static FourierBoundary from_function(const std::function<cd(double)>& g, int N, std::size_t M = 0);

  [[nodiscard]] int cutoff() const { return N_; }
  [[nodiscard]] cd coefficient(int n) const;
  [[nodiscard]] cd value(double theta) const;
  [[nodiscard]] cd derivative(double theta) const;
  [[nodiscard]] std::vector<cd> values(std::size_t M) const;
  [[nodiscard]] std::vector<cd> derivatives(std::size_t M) const;
  // max | |g| - 1 | on an M-point grid
  [[nodiscard]] double unit_residual(std::size_t M) const;

  [[nodiscard]] nlohmann::json to_json() const;
  [[nodiscard]] static FourierBoundary from_json(const nlohmann::json& j);

 private:
  int N_ = 0;
  std::vector<cd> c_;  // index n + N
};

// v(r e^{i theta}) = sum c_n r^{|n|} e^{i n theta}
class HarmonicExtension {
 public:
  explicit HarmonicExtension(FourierBoundary g) : g_(std::move(g)) {}
  [[nodiscard]] cd operator()(cd z) const;
  [[nodiscard]] const FourierBoundary& boundary() const { return g_; }

 private:
  FourierBoundary g_;
};

[[nodiscard]] HarmonicExtension poisson_extend(const FourierBoundary& g);

// Real potential  log_coefficient * ln|z - pole| + Re F(z) + constant,
// with F holomorphic on the disk.
class PotentialField {
 public:
  using Holo = std::function<cd(cd)>;

  PotentialField(cd pole, double log_coefficient, Holo F, Holo dF, double constant = 0.0);
  // F(z) = sum_{n>=1} b_n z^n
  [[nodiscard]] static PotentialField from_series(cd pole, double log_coefficient, std::vector<cd> b,
                                                  double constant = 0.0);

  [[nodiscard]] double operator()(cd z) const;
  [[nodiscard]] double smooth_part(cd z) const;
  // d/dx + i d/dy of the whole field
  [[nodiscard]] cd gradient(cd z) const;
  [[nodiscard]] cd smooth_gradient(cd z) const;
  // Im F, the harmonic conjugate of the smooth part
  [[nodiscard]] double conjugate_smooth(cd z) const;
  [[nodiscard]] cd holomorphic_part(cd z) const { return F_(z); }

  [[nodiscard]] cd pole() const { return pole_; }
  [[nodiscard]] double log_coefficient() const { return log_coefficient_; }
  [[nodiscard]] const std::vector<cd>& series() const { return series_; }

 private:
  cd pole_;
  double log_coefficient_;
  Holo F_, dF_;
  double constant_;
  std::vector<cd> series_;
};

// G(z) = ln|z-a| - ln|1 - conj(a) z|
[[nodiscard]] PotentialField dirichlet_green_disk(cd a);

// G_x(y) = ln|y-x| + ln|1 - conj(x) y|: dG/dr = 1 on S^1, zero boundary mean, symmetric.
class NeumannGreen {
 public:
  explicit NeumannGreen(cd x);
  [[nodiscard]] double operator()(cd y) const;
  [[nodiscard]] cd gradient(cd y) const;
  [[nodiscard]] cd pole() const { return x_; }

 private:
  cd x_;
};
[[nodiscard]] NeumannGreen neumann_green_disk(cd x);

// Neumann datum q = <d_theta g, i g>, spectral.
[[nodiscard]] std::vector<double> neumann_datum(const FourierBoundary& g, std::size_t M);

struct PhiTilde {
  PotentialField phi;
  std::vector<cd> q_hat;  // q_hat[n] for n = 0..N (q is real)
  double q_mean = 0.0;
};
// ln r + H, dH/dr = q - 1 on S^1, zero boundary mean.
[[nodiscard]] PhiTilde solve_phi_tilde(const FourierBoundary& g);

struct PoissonLimitReport {
  double M = 0.0;
  std::vector<double> radii;
  std::vector<double> values;
  double extrapolated = 0.0;
  double candidate_8 = 0.0;  // 8 arctan(1/M)
  double candidate_2 = 0.0;  // 2 arctan(1/M)
  double rel_diff_8 = 0.0;
  double rel_diff_2 = 0.0;
  std::string matched;  // "2arctan", "8arctan" or "none"
  [[nodiscard]] nlohmann::json to_json() const;
};
[[nodiscard]] double poisson_truncated_integral(double M, double r);
[[nodiscard]] double poisson_truncated_closed_form(double M, double r);
[[nodiscard]] PoissonLimitReport poisson_kernel_limit(double M, std::vector<double> radii);

[[nodiscard]] std::vector<double> properness_profile(const FourierBoundary& g, std::span<const double> radii,
                                                     std::size_t n_theta = 2048);

}  // namespace gluni
