#include <doctest.h>

#include <cmath>
#include <random>

#include "gluni/disk_analysis.hpp"
#include "gluni/error.hpp"

using namespace gluni;

TEST_CASE("Poisson extension") {
  const auto g = FourierBoundary::from_function([](double t) { return std::exp(I * t); }, 32);
  const auto v = poisson_extend(g);
  CHECK(std::abs(v(0.3 + 0.4 * I) - (0.3 + 0.4 * I)) < 1e-14);
  const auto c = FourierBoundary::from_function([](double) { return cd{0.2, -0.7}; }, 32);
  CHECK(std::abs(poisson_extend(c)(0.5 * I) - cd{0.2, -0.7}) < 1e-14);
  auto gfun = [](double t) { return std::exp(2.0 * I * t) + 0.1 * std::exp(-I * t); };
  const auto h = poisson_extend(FourierBoundary::from_function(gfun, 32));
  // Poisson-integral quadrature oracle at z = 0.5
  const cd z = 0.5;
  cd acc = 0.0;
  const int n = 4096;
  for (int k = 0; k < n; ++k) {
    const double t = two_pi * k / n;
    const double P = (1 - std::norm(z)) / std::norm(std::exp(I * t) - z);
    acc += P * gfun(t);
  }
  CHECK(std::abs(h(z) - acc / static_cast<double>(n)) < 1e-8);
  // mode diagonal
  for (int m : {-3, 0, 4}) {
    const auto e = poisson_extend(FourierBoundary::from_function([m](double t) { return std::exp(I * (m * t)); }, 32));
    const cd w = 0.6 * std::exp(0.4 * I);
    CHECK(std::abs(e(w) - std::pow(0.6, std::abs(m)) * std::exp(I * (0.4 * m))) < 1e-14);
  }
}

TEST_CASE("Dirichlet Green function") {
  const auto g0 = dirichlet_green_disk(0.0);
  CHECK(std::abs(g0(0.3 + 0.4 * I) - std::log(0.5)) < 1e-15);
  const auto g = dirichlet_green_disk(0.3);
  for (int k = 0; k < 64; ++k) CHECK(std::abs(g(std::exp(I * (two_pi * k / 64)))) < 1e-12);
  CHECK(std::abs(g.smooth_part(0.3) + std::log(0.91)) < 1e-14);
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> U(-0.65, 0.65);
  for (int k = 0; k < 20; ++k) {
    const cd a{U(rng), U(rng)}, b{U(rng), U(rng)};
    CHECK(std::abs(dirichlet_green_disk(a)(b) - dirichlet_green_disk(b)(a)) < 1e-10);
  }
}

TEST_CASE("Neumann Green function") {
  const auto G0 = neumann_green_disk(0.0);
  const double hstep = 1e-5;
  std::mt19937 rng(9);
  std::uniform_real_distribution<double> U(-0.6, 0.6);
  for (cd x : {cd{0.0}, cd{0.4, -0.2}}) {
    const auto G = neumann_green_disk(x);
    double mean = 0.0;
    for (int k = 0; k < 512; ++k) {
      const cd e = std::exp(I * (two_pi * k / 512));
      const double dr = (G(e * (1 + hstep)) - G(e * (1 - hstep))) / (2 * hstep);
      CHECK(std::abs(dr - 1.0) < 1e-8);
      mean += G(e) / 512;
    }
    CHECK(std::abs(mean) < 1e-8);
  }
  (void)G0;
  for (int k = 0; k < 20; ++k) {
    const cd a{U(rng), U(rng)}, b{U(rng), U(rng)};
    CHECK(std::abs(neumann_green_disk(a)(b) - neumann_green_disk(b)(a)) < 1e-8);
  }
}

TEST_CASE("solve_phi_tilde examples") {
  for (auto gf : {std::function<cd(double)>([](double t) { return I * std::exp(I * t); }),
                  std::function<cd(double)>([](double t) { return std::exp(I * t); })}) {
    const auto s = solve_phi_tilde(FourierBoundary::from_function(gf, 64));
    const cd z = 0.3 - 0.5 * I;
    CHECK(std::abs(s.phi(z) - std::log(std::abs(z))) < 1e-12);
  }
  const auto g = FourierBoundary::from_function([](double t) { return std::exp(I * (t + 0.3 * std::sin(t))); }, 128);
  const auto s = solve_phi_tilde(g);
  CHECK(std::abs(s.q_mean - 1.0) < 1e-10);
  for (cd z : {cd{0.2, 0.1}, cd{-0.5, 0.6}, cd{0.0, -0.9}}) {
    const double r = std::abs(z), th = std::arg(z);
    CHECK(std::abs(s.phi(z) - (std::log(r) + 0.3 * r * std::cos(th))) < 1e-10);
  }
  CHECK_THROWS_AS((void)solve_phi_tilde(FourierBoundary::from_function([](double t) { return std::exp(2.0 * I * t); }, 32)),
                  NumericalError);
}

TEST_CASE("solve_phi_tilde agrees with the Neumann Green representation") {
  // Phi(x) = G_0(x) - (1/2pi) int G_x(e^{i theta}) q(theta) d theta
  auto gfun = [](double t) { return std::exp(I * (t + 0.4 * std::sin(t) - 0.2 * std::cos(2 * t))); };
  const auto g = FourierBoundary::from_function(gfun, 128);
  const auto s = solve_phi_tilde(g);
  const std::size_t M = 2048;
  const auto q = neumann_datum(g, M);
  for (cd x : {cd{0.3, 0.1}, cd{-0.2, -0.5}}) {
    const auto Gx = neumann_green_disk(x);
    double acc = 0.0;
    for (std::size_t k = 0; k < M; ++k) acc += Gx(std::exp(I * (two_pi * k / M))) * q[k];
    const double rep = std::log(std::abs(x)) - acc / M;
    CHECK(std::abs(s.phi(x) - rep) < 1e-8);
  }
  // harmonicity of the smooth part by a 5-point stencil
  const double hh = 1e-3;
  for (cd z : {cd{0.1, 0.2}, cd{-0.4, 0.3}}) {
    const double lap = (s.phi.smooth_part(z + hh) + s.phi.smooth_part(z - hh) + s.phi.smooth_part(z + I * hh) +
                        s.phi.smooth_part(z - I * hh) - 4 * s.phi.smooth_part(z)) /
                       (hh * hh);
    CHECK(std::abs(lap) < 1e-4);
  }
  // Neumann condition mode by mode
  const auto qf = FourierBoundary::from_samples(std::vector<cd>(q.begin(), q.end()), 128);
  const auto& b = s.phi.series();
  for (int n = 1; n <= 20; ++n) CHECK(std::abs(0.5 * n * b[n - 1] - qf.coefficient(n)) < 1e-8);
}

TEST_CASE("Poisson kernel limit") {
  const double oracle[3][3] = {{0.5, 2.2158054, 2.2144482}, {1.0, 1.5720824, 1.5709249}, {2.0, 0.9281592, 0.9273816}};
  double prev = 1e300;
  for (const auto& row : oracle) {
    const auto rep = poisson_kernel_limit(row[0], {0.999, 0.9999});
    CHECK(std::abs(rep.values[0] - row[1]) < 1e-6);
    CHECK(std::abs(rep.values[1] - row[2]) < 1e-6);
    CHECK(std::abs(rep.values[0] - poisson_truncated_closed_form(row[0], 0.999)) < 1e-9);
    CHECK(std::abs(rep.values[1] - rep.extrapolated) < 0.01 * rep.extrapolated);
    CHECK(rep.matched == "2arctan");
    CHECK(rep.extrapolated < prev);
    prev = rep.extrapolated;
  }
  // M -> 0 proxy: the full integral gives (1-r) 2pi/(1-r^2) -> pi
  const auto small = poisson_kernel_limit(1e-3, {0.999, 0.9999});
  CHECK(std::abs(small.extrapolated - pi) < 3e-3);
}

TEST_CASE("properness profile") {
  const double radii[] = {0.5, 0.9, 0.99, 0.999};
  const auto p1 = properness_profile(FourierBoundary::from_function([](double t) { return std::exp(I * t); }, 32), radii);
  for (std::size_t k = 0; k < 4; ++k) CHECK(std::abs(p1[k] - radii[k]) < 1e-12);
  const auto g = FourierBoundary::from_function([](double t) { return std::exp(I * (t + 0.3 * std::sin(t))); }, 128);
  const auto p2 = properness_profile(g, radii);
  CHECK(p2[2] >= 0.9);
  CHECK(p2[3] >= 0.9);
}
