#include "gluni/disk_analysis.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "gluni/curves.hpp"
#include "gluni/error.hpp"
#include "gluni/parallel.hpp"

namespace gluni {

namespace {

// sum_{k>=0} c[k] z^k
cd horner(const std::vector<cd>& c, cd z) {
  cd acc = 0.0;
  for (std::size_t k = c.size(); k-- > 0;) acc = acc * z + c[k];
  return acc;
}

}  // namespace

// ---------------------------------------------------------------------------
// FourierBoundary

FourierBoundary::FourierBoundary(int N, std::vector<cd> coefficients) : N_(N), c_(std::move(coefficients)) {
  if (N < 0 || c_.size() != static_cast<std::size_t>(2 * N + 1))
    fail(ErrorCode::InvalidArgument, "Fourier coefficient count must be 2N+1");
}

FourierBoundary FourierBoundary::from_samples(std::span<const cd> samples, int N) {
  const std::size_t M = samples.size();
  if (M < static_cast<std::size_t>(2 * N + 1)) fail(ErrorCode::InvalidArgument, "need at least 2N+1 samples");
  std::vector<cd> c(2 * N + 1);
  parallel_for(c.size(), [&](std::size_t idx) {
    const int n = static_cast<int>(idx) - N;
    const cd step = std::exp(-I * (two_pi * n / static_cast<double>(M)));
    cd rot = 1.0, acc = 0.0;
    for (std::size_t k = 0; k < M; ++k) {
      if (k % 64 == 0) rot = std::exp(-I * (two_pi * n * static_cast<double>(k) / static_cast<double>(M)));
      acc += samples[k] * rot;
      rot *= step;
    }
    c[idx] = acc / static_cast<double>(M);
  });
  return {N, std::move(c)};
}

FourierBoundary FourierBoundary::from_function(const std::function<cd(double)>& g, int N, std::size_t M) {
  if (M == 0) M = static_cast<std::size_t>(4 * N);
  M = std::max<std::size_t>(M, static_cast<std::size_t>(2 * N + 1));
  std::vector<cd> s(M);
  for (std::size_t k = 0; k < M; ++k) s[k] = g(two_pi * static_cast<double>(k) / static_cast<double>(M));
  return from_samples(s, N);
}

cd FourierBoundary::coefficient(int n) const {
  if (n < -N_ || n > N_) return 0.0;
  return c_[n + N_];
}

cd FourierBoundary::value(double theta) const {
  const cd z = std::exp(I * theta);
  cd pos = 0.0, neg = 0.0;
  for (int n = N_; n >= 0; --n) pos = pos * z + c_[n + N_];
  for (int n = N_; n >= 1; --n) neg = (neg + c_[-n + N_]) * std::conj(z);
  return pos + neg;
}

cd FourierBoundary::derivative(double theta) const {
  const cd z = std::exp(I * theta);
  cd pos = 0.0, neg = 0.0;
  for (int n = N_; n >= 1; --n) pos = (pos + c_[n + N_] * static_cast<double>(n)) * z;
  for (int n = N_; n >= 1; --n) neg = (neg - c_[-n + N_] * static_cast<double>(n)) * std::conj(z);
  return I * (pos + neg);
}

std::vector<cd> FourierBoundary::values(std::size_t M) const {
  std::vector<cd> out(M);
  for (std::size_t k = 0; k < M; ++k) out[k] = value(two_pi * static_cast<double>(k) / static_cast<double>(M));
  return out;
}

std::vector<cd> FourierBoundary::derivatives(std::size_t M) const {
  std::vector<cd> out(M);
  for (std::size_t k = 0; k < M; ++k) out[k] = derivative(two_pi * static_cast<double>(k) / static_cast<double>(M));
  return out;
}

double FourierBoundary::unit_residual(std::size_t M) const {
  double worst = 0.0;
  for (cd v : values(M)) worst = std::max(worst, std::abs(std::abs(v) - 1.0));
  return worst;
}

nlohmann::json FourierBoundary::to_json() const {
  nlohmann::json arr = nlohmann::json::array();
  for (int n = -N_; n <= N_; ++n) arr.push_back({n, c_[n + N_].real(), c_[n + N_].imag()});
  return {{"N", N_}, {"coefficients", arr}};
}

FourierBoundary FourierBoundary::from_json(const nlohmann::json& j) {
  const int N = j.at("N").get<int>();
  std::vector<cd> c(2 * N + 1, 0.0);
  for (const auto& e : j.at("coefficients")) {
    const int n = e.at(0).get<int>();
    if (n < -N || n > N) throw ConfigError("coefficients", "mode index out of range");
    c[n + N] = {e.at(1).get<double>(), e.at(2).get<double>()};
  }
  return {N, std::move(c)};
}

// ---------------------------------------------------------------------------
// Poisson extension

cd HarmonicExtension::operator()(cd z) const {
  const int N = g_.cutoff();
  cd pos = 0.0, neg = 0.0;
  for (int n = N; n >= 0; --n) pos = pos * z + g_.coefficient(n);
  for (int n = N; n >= 1; --n) neg = (neg + g_.coefficient(-n)) * std::conj(z);
  return pos + neg;
}

HarmonicExtension poisson_extend(const FourierBoundary& g) { return HarmonicExtension(g); }

// ---------------------------------------------------------------------------
// PotentialField

PotentialField::PotentialField(cd pole, double log_coefficient, Holo F, Holo dF, double constant)
    : pole_(pole), log_coefficient_(log_coefficient), F_(std::move(F)), dF_(std::move(dF)), constant_(constant) {}

PotentialField PotentialField::from_series(cd pole, double log_coefficient, std::vector<cd> b, double constant) {
  // b[0] is the z^1 coefficient
  std::vector<cd> poly(b.size() + 1, 0.0);
  for (std::size_t k = 0; k < b.size(); ++k) poly[k + 1] = b[k];
  std::vector<cd> dpoly(b.size(), 0.0);
  for (std::size_t k = 0; k < b.size(); ++k) dpoly[k] = b[k] * static_cast<double>(k + 1);
  PotentialField p(
      pole, log_coefficient, [poly](cd z) { return horner(poly, z); }, [dpoly](cd z) { return horner(dpoly, z); },
      constant);
  p.series_ = std::move(b);
  return p;
}

double PotentialField::smooth_part(cd z) const { return F_(z).real() + constant_; }

double PotentialField::operator()(cd z) const {
  double v = smooth_part(z);
  if (log_coefficient_ != 0.0) v += log_coefficient_ * std::log(std::abs(z - pole_));
  return v;
}

cd PotentialField::smooth_gradient(cd z) const { return std::conj(dF_(z)); }

cd PotentialField::gradient(cd z) const {
  cd g = smooth_gradient(z);
  if (log_coefficient_ != 0.0) {
    const cd w = z - pole_;
    g += log_coefficient_ * w / std::norm(w);
  }
  return g;
}

double PotentialField::conjugate_smooth(cd z) const { return F_(z).imag(); }

PotentialField dirichlet_green_disk(cd a) {
  if (!(std::abs(a) < 1.0)) fail(ErrorCode::OutsideDisk, "pole must lie in the open disk");
  const cd ab = std::conj(a);
  // -ln|1 - conj(a) z| = Re(-log(1 - conj(a) z))
  return PotentialField(
      a, 1.0, [ab](cd z) { return -std::log(1.0 - ab * z); }, [ab](cd z) { return ab / (1.0 - ab * z); });
}

NeumannGreen::NeumannGreen(cd x) : x_(x) {
  if (!(std::abs(x) < 1.0)) fail(ErrorCode::OutsideDisk, "pole must lie in the open disk");
}

double NeumannGreen::operator()(cd y) const {
  return std::log(std::abs(y - x_)) + std::log(std::abs(1.0 - std::conj(x_) * y));
}

cd NeumannGreen::gradient(cd y) const {
  // grad ln|w(y)| = conj(w'/w) for holomorphic w
  const cd xb = std::conj(x_);
  return std::conj(1.0 / (y - x_) - xb / (1.0 - xb * y));
}

NeumannGreen neumann_green_disk(cd x) { return NeumannGreen(x); }

// ---------------------------------------------------------------------------
// singular Neumann problem

std::vector<double> neumann_datum(const FourierBoundary& g, std::size_t M) {
  const auto v = g.values(M);
  const auto d = g.derivatives(M);
  std::vector<double> q(M);
  for (std::size_t k = 0; k < M; ++k) q[k] = wedge(v[k], d[k]) / std::norm(v[k]);
  return q;
}

PhiTilde solve_phi_tilde(const FourierBoundary& g) {
  const int N = g.cutoff();
  const std::size_t M = static_cast<std::size_t>(std::max(4 * N, 64));
  const auto q = neumann_datum(g, M);
  const auto vals = g.values(M);
  const int deg = degree_of_samples(vals);
  std::vector<cd> qs(q.begin(), q.end());
  const auto qf = FourierBoundary::from_samples(qs, N);
  const double mean = qf.coefficient(0).real();
  if (std::abs(mean - deg) > 1e-4)
    fail(ErrorCode::CompatibilityFailure,
         "mean of Neumann datum " + std::to_string(mean) + " differs from degree " + std::to_string(deg));
  if (deg != 1)
    fail(ErrorCode::CompatibilityFailure, "flux of the unit point source needs degree 1, got " + std::to_string(deg));
  std::vector<cd> b(N);
  std::vector<cd> q_hat(N + 1);
  q_hat[0] = mean;
  for (int n = 1; n <= N; ++n) {
    q_hat[n] = qf.coefficient(n);
    b[n - 1] = 2.0 * q_hat[n] / static_cast<double>(n);
  }
  return {PotentialField::from_series(0.0, 1.0, std::move(b)), std::move(q_hat), mean};
}

// ---------------------------------------------------------------------------
// truncated Poisson integral

double poisson_truncated_integral(double M, double r) {
  const double delta = M * (1.0 - r);
  if (!(delta > 0.0 && delta < pi)) fail(ErrorCode::InvalidArgument, "need 0 < M(1-r) < pi");
  // 1 + r^2 - 2r cos(th) without cancellation near th = 0
  auto f = [r](double th) {
    const double s = std::sin(0.5 * th);
    return 1.0 / ((1.0 - r) * (1.0 - r) + 4.0 * r * s * s);
  };
  double err = 0.0;
  using boost::math::quadrature::gauss_kronrod;
  // geometric cuts starting at delta resolve the peak of width (1 - r)
  std::vector<double> cuts{delta};
  for (double c = 2.0 * delta; c < pi; c *= 2.0) cuts.push_back(c);
  cuts.push_back(pi);
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    double e = 0.0;
    const double piece = gauss_kronrod<double, 31>::integrate(f, cuts[k], cuts[k + 1], 15, 1e-13, &e);
    total += piece;
    err += e;
  }
  if (err > 1e-5 * total) fail(ErrorCode::QuadratureFailure, "Poisson integral error " + std::to_string(err));
  return 2.0 * (1.0 - r) * total;
}

double poisson_truncated_closed_form(double M, double r) {
  const double delta = M * (1.0 - r);
  return 4.0 / (1.0 + r) * std::atan((1.0 - r) / (1.0 + r) / std::tan(0.5 * delta));
}

nlohmann::json PoissonLimitReport::to_json() const {
  return {{"M", M},
          {"radii", radii},
          {"values", values},
          {"extrapolated_limit", extrapolated},
          {"candidate_8_arctan", candidate_8},
          {"candidate_2_arctan", candidate_2},
          {"relative_diff_8_arctan", rel_diff_8},
          {"relative_diff_2_arctan", rel_diff_2},
          {"matched", matched}};
}

PoissonLimitReport poisson_kernel_limit(double M, std::vector<double> radii) {
  if (!(M > 0)) fail(ErrorCode::InvalidArgument, "M must be positive");
  if (radii.size() < 2) fail(ErrorCode::InvalidArgument, "need at least two radii");
  std::sort(radii.begin(), radii.end());
  PoissonLimitReport rep;
  rep.M = M;
  rep.radii = radii;
  for (double r : radii) rep.values.push_back(poisson_truncated_integral(M, r));
  // linear Richardson in (1 - r) on the two radii closest to 1
  const std::size_t n = radii.size();
  const double e1 = 1.0 - radii[n - 2], e2 = 1.0 - radii[n - 1];
  const double v1 = rep.values[n - 2], v2 = rep.values[n - 1];
  rep.extrapolated = v2 - (v1 - v2) * e2 / (e1 - e2);
  rep.candidate_8 = 8.0 * std::atan(1.0 / M);
  rep.candidate_2 = 2.0 * std::atan(1.0 / M);
  rep.rel_diff_8 = std::abs(rep.extrapolated - rep.candidate_8) / rep.candidate_8;
  rep.rel_diff_2 = std::abs(rep.extrapolated - rep.candidate_2) / rep.candidate_2;
  if (rep.rel_diff_2 <= 0.01 && rep.rel_diff_2 <= rep.rel_diff_8)
    rep.matched = "2arctan";
  else if (rep.rel_diff_8 <= 0.01)
    rep.matched = "8arctan";
  else
    rep.matched = "none";
  return rep;
}

std::vector<double> properness_profile(const FourierBoundary& g, std::span<const double> radii, std::size_t n_theta) {
  const auto v = poisson_extend(g);
  std::vector<double> out(radii.size());
  parallel_for(radii.size(), [&](std::size_t i) {
    double m = 1e300;
    for (std::size_t k = 0; k < n_theta; ++k)
      m = std::min(m, std::abs(v(radii[i] * std::exp(I * (two_pi * static_cast<double>(k) / n_theta)))));
    out[i] = m;
  });
  return out;
}

}  // namespace gluni
