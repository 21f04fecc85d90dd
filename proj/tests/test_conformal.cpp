#include <doctest.h>

#include <cmath>
#include <random>

#include "gluni/conformal.hpp"
#include "gluni/error.hpp"

using namespace gluni;

namespace {
ConformalMap quad(double c) { return ConformalMap::taylor({0.0, 1.0, c}); }
}  // namespace

TEST_CASE("Mobius basics") {
  const auto m0 = mobius(0.0, 0.0);
  CHECK(std::abs(m0(0.3 + 0.2 * I) + (0.3 + 0.2 * I)) < 1e-15);
  const auto m = mobius(0.5, 0.0);
  CHECK(std::abs(m(0.5)) < 1e-15);
  CHECK(std::abs(std::abs(m.derivative(0.5)) - 4.0 / 3.0) < 1e-14);
  std::mt19937 rng(1);
  std::uniform_real_distribution<double> U(-0.7, 0.7);
  const auto psi = DiskAutomorphism::psi(0.3 - 0.4 * I, 0.9);
  for (int k = 0; k < 100; ++k) {
    const cd z{U(rng), U(rng)};
    CHECK(std::abs(psi(psi.inverse()(z)) - z) < 1e-12);
    CHECK(std::abs(psi.inverse()(psi(z)) - z) < 1e-12);
  }
  CHECK_THROWS_AS((void)mobius(1.0, 0.0), NumericalError);
  const auto [w, th] = psi.psi_params();
  CHECK(std::abs(w - (0.3 - 0.4 * I)) < 1e-14);
  CHECK(std::abs(std::remainder(th - 0.9, two_pi)) < 1e-14);
}

TEST_CASE("rebase derivative identity") {
  const auto f = rebase(ConformalMap::identity(), 0.5);
  CHECK(std::abs(std::abs(f.derivative_at_0()) - 0.75) < 1e-12);
  const auto f0 = quad(0.2);
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> U(-0.6, 0.6);
  for (int k = 0; k < 20; ++k) {
    const cd w{U(rng), U(rng)};
    const auto g = rebase(f0, w);
    CHECK(std::abs(std::abs(g.derivative_at_0()) - std::abs(f0.derivative(w)) * (1 - std::norm(w))) < 1e-10);
    CHECK(std::abs(g.base_point() - f0(w)) < 1e-13);
    CHECK(std::abs(g.derivative_at_0().imag()) < 1e-12);
    CHECK(g.derivative_at_0().real() > 0);
  }
  const double w = 0.180460421716370;
  CHECK(std::abs(std::abs(rebase(f0, w).derivative_at_0()) - 1.037267457855682) < 1e-12);
}

TEST_CASE("rebase twice returns the original image grid up to rotation") {
  const auto f0 = quad(0.2);
  const cd w = 0.3 + 0.2 * I;
  const auto f1 = rebase(f0, w);
  // pull back: the point of f1's disk that f1 sends to f0(0)
  const cd back = f1.inverse(f0(0.0));
  const auto f2 = rebase(f1, back);
  const auto g0 = f0.gauge_fixed();
  for (int k = 0; k < 32; ++k) {
    const cd z = 0.8 * std::exp(I * (two_pi * k / 32));
    CHECK(std::abs(f2(z) - g0(z)) < 1e-8);
  }
}

TEST_CASE("Weil-Petersson energy closed forms") {
  CHECK(std::abs(wp_energy(ConformalMap::identity()).value) < 1e-14);
  CHECK(std::abs(wp_energy(quad(0.2)).value - 0.547747320182531) < 1e-6);
  CHECK(std::abs(wp_energy(mobius(0.5, 0.0)).value - 3.615119541536006) < 1e-4);
  CHECK(std::abs(w0(ConformalMap::identity())) < 1e-12);
  CHECK(std::abs(w0(mobius(0.5, 0.0))) < 1e-3);
}

TEST_CASE("W0 invariance under rebasing") {
  std::mt19937 rng(11);
  std::uniform_real_distribution<double> R(0.0, 0.7), A(0.0, two_pi);
  for (double c : {0.0, 0.1, 0.2, 0.3}) {
    const auto f0 = quad(c);
    const double ref = w0(f0);
    for (int k = 0; k < 5; ++k) {
      const cd w = std::polar(R(rng), A(rng));
      CHECK(std::abs(w0(rebase(f0, w)) - ref) < 1e-3);
    }
  }
}

TEST_CASE("WP energy positivity and affine zero") {
  CHECK(wp_energy(ConformalMap::taylor({1.0, 2.0 + I})).value == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(wp_energy(ConformalMap::taylor({0.0, 1.0, 0.1, 0.05})).value > 0);
}

TEST_CASE("Koebe distortion bounds") {
  CHECK(koebe_check(ConformalMap::identity()).max_violation <= 1.0 + 1e-2);
  CHECK(koebe_check(mobius(0.5, 0.0)).max_violation <= 1.0 + 1e-2);
  CHECK(koebe_check(quad(0.45)).max_violation <= 1.0 + 1e-2);
}

TEST_CASE("boundary trace") {
  const auto t = boundary_trace(ConformalMap::identity(), 256);
  CHECK(t.polyline.size() == 256);
  for (cd p : t.polyline) CHECK(std::abs(std::abs(p) - 1.0) < 1e-14);
  CHECK(degree(boundary_trace(quad(0.2), 512).tangent, 1024) == 1);
  CHECK_THROWS_AS((void)boundary_trace(quad(0.6), 512), NumericalError);
}

TEST_CASE("inverse and JSON round trip") {
  const auto f = rebase(ConformalMap::taylor({0.0, 1.0, 0.2, 0.05}), 0.2 - 0.1 * I);
  for (int k = 0; k < 50; ++k) {
    const cd z = (0.05 + 0.9 * k / 50.0) * std::exp(I * (0.7 * k));
    CHECK(std::abs(f.inverse(f(z)) - z) < 1e-10);
  }
  const auto g = ConformalMap::from_json(f.to_json());
  CHECK(std::abs(g(0.3 + 0.1 * I) - f(0.3 + 0.1 * I)) < 1e-13);
  CHECK(g.representation() == MapRepresentation::composite);
  CHECK_NOTHROW(quad(0.2).check_injective());
  CHECK_THROWS_AS(quad(0.6).check_injective(), NumericalError);
}
