#include <doctest.h>

#include <cmath>
#include <random>

#include "gluni/curves.hpp"
#include "gluni/error.hpp"

using namespace gluni;

TEST_CASE("tangent of circles is i e^{i theta}") {
  for (double R : {1.0, 2.0}) {
    const auto tau = tangent_data(circle_curve(0.0, R));
    for (int k = 0; k < 16; ++k) {
      const double t = k / 16.0;
      CHECK(std::abs(tau.value(t) - I * std::exp(I * (two_pi * t))) < 1e-12);
    }
  }
}

TEST_CASE("tangent of the quadratic image has unit modulus and degree one") {
  auto f = [](cd z) { return z + 0.2 * z * z; };
  auto df = [](cd z) { return 1.0 + 0.4 * z; };
  const auto curve = analytic_image_curve(f, df, {});
  const auto tau = tangent_data(curve);
  for (cd v : tau.sample(512)) CHECK(std::abs(std::abs(v) - 1.0) < 1e-12);
  CHECK(degree(tau, 1024) == 1);
}

TEST_CASE("degree examples") {
  CHECK(degree(power_data(1, 0.0), 256) == 1);
  CHECK(degree(power_data(0, 0.7), 256) == 0);
  const auto g = power_data(2, 0.0, 1.0, 1);  // e^{2i theta} e^{i sin theta}
  // angle-unwrapping oracle
  const auto s = g.sample(4096);
  double acc = 0.0;
  for (std::size_t k = 0; k < s.size(); ++k) acc += std::arg(s[(k + 1) % s.size()] / s[k]);
  CHECK(std::round(acc / two_pi) == 2);
  CHECK(degree(g, 1024) == 2);
  for (int d = -2; d <= 3; ++d) CHECK(degree(power_data(d, 0.3), 256) == d);
}

TEST_CASE("degree refuses unresolved data") {
  CHECK_THROWS_AS((void)degree(power_data(100, 0.0), 256), NumericalError);
}

TEST_CASE("degree is invariant under monotone reparametrization") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  const auto g = power_data(3, 0.2, 0.5, 2);
  for (int trial = 0; trial < 5; ++trial) {
    // random increasing map of [0,1) onto itself
    std::vector<double> w(8);
    for (auto& x : w) x = 0.2 + U(rng);
    double tot = 0.0;
    for (double x : w) tot += x;
    auto phi = [&](double t) {
      double acc = 0.0, pos = t * 8.0;
      std::size_t i = static_cast<std::size_t>(pos);
      for (std::size_t k = 0; k < i && k < 8; ++k) acc += w[k];
      if (i < 8) acc += (pos - i) * w[i];
      return acc / tot;
    };
    std::vector<cd> s(1024);
    for (std::size_t k = 0; k < s.size(); ++k) s[k] = g.value(phi(k / 1024.0));
    CHECK(degree_of_samples(s) == 3);
  }
}

TEST_CASE("degree is additive under products") {
  const auto a = power_data(2, 0.1, 0.3, 1);
  const auto b = power_data(-1, 0.4, 0.2, 3);
  CHECK(degree(product(a, b), 1024) == degree(a, 1024) + degree(b, 1024));
}

TEST_CASE("H^{1/2} seminorm") {
  const auto circ = circle_curve(0.0, 1.0);
  CHECK(std::abs(h_half_seminorm(power_data(1, 0.0), circ, 512) - 4 * pi * pi) < 1e-3);
  CHECK(std::abs(h_half_seminorm(power_data(0, 0.4), circ, 512)) < 1e-12);
  // Fourier oracle: sum 2 pi^2 * 2|n| |g_n|^2 = 8 pi^2 for e^{2 i theta}
  CHECK(std::abs(h_half_seminorm(power_data(2, 0.0), circ, 512) - 8 * pi * pi) < 1e-2);
  const auto g = power_data(1, 0.0, 0.3, 2);
  const double a = h_half_seminorm_raw(g, circ, 512);
  const double b = h_half_seminorm_raw(rotated(g, 1.1), circ, 512);
  CHECK(std::abs(a - b) < 1e-10 * a);
}

TEST_CASE("chord-arc constants") {
  CHECK(std::abs(chord_arc_constant(circle_curve(0.0, 1.0), 4096) - pi / 2) < 1e-3);
  const double sq = chord_arc_constant(square_curve(1.0), 1024);
  CHECK(std::isfinite(sq));
  CHECK(sq > pi / 2);
  double prev = 0.0;
  for (double tmin : {0.2, 0.1, 0.05}) {
    const double c = chord_arc_constant(log_spiral_curve(tmin, 0.0), 2048);
    CHECK(c > prev);
    prev = c;
  }
}

TEST_CASE("log spiral closures") {
  const auto c = log_spiral_curve(0.05, 0.02);
  CHECK(degree(tangent_data(c), 1024) == 1);
  const auto s = c.sample(1024);
  CHECK(signed_area(s) > 0);
  CHECK_NOTHROW(log_spiral_curve(0.2, 0.0).check_injective(1024));
  CHECK_THROWS_AS((void)log_spiral_curve(std::exp(-1.0) - 1e-12, 0.0), NumericalError);
}

TEST_CASE("curves are closed and tabulated data interpolates") {
  const auto c = log_spiral_curve(0.1, 0.0);
  CHECK(std::abs(c.point(1.0 - 1e-12) - c.point(0.0)) < 1e-9);
  const auto g = tabulated_data(power_data(1, 0.0).sample(64));
  CHECK(degree(g, 512) == 1);
  CHECK(std::abs(std::abs(g.value(0.0123)) - 1.0) < 1e-12);
}
