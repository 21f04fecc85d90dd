#include <doctest.h>

#include <cmath>
#include <random>

#include "gluni/conformal.hpp"
#include "gluni/curves.hpp"
#include "gluni/error.hpp"
#include "gluni/fem.hpp"
#include "gluni/mesh.hpp"
#include "gluni/renorm.hpp"

using namespace gluni;

namespace {

// mpmath oracles
constexpr double omega_star = 0.180460421716370;
constexpr double a_star = 0.186973614477580;
constexpr double value_star = 1.037267457855682;
constexpr double wp_quad = 0.547747320182531;
constexpr double W_disk_05 = 1.807559770768003;
constexpr double mass_disk_03 = 0.094310679471241;

ConformalMap quad() { return ConformalMap::taylor({0.0, 1.0, 0.2}); }

BoundaryData tangential(const ConformalMap& f0) { return tangent_data(f0.boundary_curve()); }

TriMesh domain_mesh(const ConformalMap& f, double h) {
  const auto n = static_cast<std::size_t>(std::ceil(1.3 * two_pi / h));
  const auto tr = boundary_trace(f, n);
  return triangulate(tr.polyline, h, tr.params);
}

// u o f for tangential data: i z f'(z) / |z f'(z)|
cd tangential_closed_form(const ConformalMap& f, cd z) {
  const cd w = I * z * f.derivative(z);
  return w / std::abs(w);
}

}  // namespace

TEST_CASE("canonical harmonic map on the disk") {
  const auto id = ConformalMap::identity();
  SUBCASE("tangential data at the center") {
    const auto u = canonical_harmonic_map(make_canonical_spec(id, tangential(id), 0.0));
    CHECK(u.trace_error() < 1e-6);
    CHECK(u.degree_around_pole() == 1);
    for (cd x : {cd{0.3, 0.1}, cd{-0.5, 0.4}, cd{0.0, -0.9}, cd{0.01, 0.0}})
      CHECK(std::abs(u(x) - I * x / std::abs(x)) < 1e-12);
  }
  SUBCASE("radial data") {
    const auto u = canonical_harmonic_map(make_canonical_spec(id, power_data(1, 0.0), 0.0));
    for (cd x : {cd{0.3, 0.1}, cd{-0.5, 0.4}}) CHECK(std::abs(u(x) - x / std::abs(x)) < 1e-12);
  }
  SUBCASE("rebased at 0.3") {
    const auto spec = make_canonical_spec(id, tangential(id), 0.3);
    CHECK(std::abs(spec.f(0.0) - 0.3) < 1e-14);
    const auto u = canonical_harmonic_map(spec);
    CHECK(u.trace_error() < 1e-6);
    CHECK(u.degree_around_pole() == 1);
    for (cd z : {cd{0.2, 0.3}, cd{-0.6, -0.1}, cd{0.05, 0.0}, cd{0.7, -0.6}})
      CHECK(std::abs(u.on_disk(z) - tangential_closed_form(spec.f, z)) < 1e-8);
  }
  SUBCASE("degree zero data is refused") {
    CHECK_THROWS_AS((void)make_canonical_spec(id, power_data(0, 0.0, 0.3), 0.0), NumericalError);
  }
}

TEST_CASE("canonical map on the quadratic domain") {
  const auto f0 = quad();
  const auto spec = make_canonical_spec(f0, tangential(f0), 0.1 + 0.05 * I);
  const auto u = canonical_harmonic_map(spec);
  CHECK(u.trace_error() < 1e-6);
  CHECK(u.degree_around_pole() == 1);
  for (cd z : {cd{0.2, 0.3}, cd{-0.6, -0.1}, cd{0.7, -0.6}})
    CHECK(std::abs(u.on_disk(z) - tangential_closed_form(spec.f, z)) < 1e-8);
  // domain-side evaluation through the inverse
  const cd x = spec.f(cd{0.4, 0.2});
  CHECK(std::abs(u(x) - u.on_disk(cd{0.4, 0.2})) < 1e-10);
}

TEST_CASE("renormalized energy: disk values") {
  const auto id = ConformalMap::identity();
  {
    const auto spec = make_canonical_spec(id, tangential(id), 0.0);
    const auto d = renormalized_energy_direct(spec);
    CHECK(std::abs(d.W) < 1e-8);
    for (const auto& row : d.table) CHECK(std::abs(row.W) < 1e-8);
    CHECK(std::abs(renormalized_energy_formula(spec)) < 1e-8);
  }
  {
    const auto spec = make_canonical_spec(id, tangential(id), 0.5);
    CHECK(std::abs(renormalized_energy_direct(spec).W - W_disk_05) < 1e-4);
    CHECK(renormalized_energy_formula(spec) == doctest::Approx(W_disk_05).epsilon(1e-6));
  }
  // closed form -2 pi ln(1 - |a|^2)
  for (cd a : {cd{0.1, 0.0}, cd{0.0, -0.3}, cd{0.4, 0.4}, cd{-0.7, 0.0}})
    CHECK(std::abs(renormalized_energy_formula(id, a) + two_pi * std::log(1.0 - std::norm(a))) < 1e-3);
}

TEST_CASE("renormalized energy: quadratic domain") {
  const auto f0 = quad();
  CHECK(renormalized_energy_formula(f0, 0.0) == doctest::Approx(wp_quad).epsilon(1e-6));
  const auto spec = make_canonical_spec(f0, tangential(f0), a_star);
  const auto d = renormalized_energy_direct(spec);
  const double wf = renormalized_energy_formula(spec);
  CHECK(std::abs(d.W - wf) < 1e-2);
  MESSAGE("W direct " << d.W << " formula " << wf);
}

TEST_CASE("route agreement on the catalog") {
  const auto id = ConformalMap::identity();
  for (cd a : {cd{0.0}, cd{0.3}, cd{0.5}}) {
    const auto spec = make_canonical_spec(id, tangential(id), a);
    CHECK(std::abs(renormalized_energy_direct(spec).W - renormalized_energy_formula(spec)) <= 1e-2);
  }
}

TEST_CASE("optimal vortex") {
  {
    const auto v = optimal_vortex(ConformalMap::identity());
    CHECK(std::abs(v.omega) < 1e-6);
    CHECK(v.value == doctest::Approx(1.0).epsilon(1e-12));
  }
  {
    const auto v = optimal_vortex(quad());
    CHECK(std::abs(v.omega - omega_star) < 1e-6);
    CHECK(std::abs(v.a - a_star) < 1e-6);
    CHECK(v.value == doctest::Approx(value_star).epsilon(1e-10));
  }
  {
    const auto v = optimal_vortex(ConformalMap::taylor({0.0, 1.0, 0.0, 0.1}));
    CHECK(std::abs(v.omega) < 1e-6);
  }
}

TEST_CASE("argmax is gauge independent") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(-0.5, 0.5), T(0.0, two_pi);
  const auto f0 = quad();
  for (int k = 0; k < 5; ++k) {
    const auto psi = DiskAutomorphism::psi(cd{U(rng), U(rng)}, T(rng));
    const ConformalMap g(f0.coefficients(), f0.pre().compose(psi.inverse()));
    CHECK(std::abs(optimal_vortex(g).a - a_star) < 1e-5);
  }
}

TEST_CASE("optimal vortex minimizes W") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> R(0.0, 0.8), T(0.0, two_pi);
  for (const auto& f0 : {ConformalMap::identity(), quad()}) {
    const auto v = optimal_vortex(f0);
    const double Wstar = renormalized_energy_formula(f0, v.a);
    for (int k = 0; k < 20; ++k) {
      const cd a = f0(std::polar(R(rng), T(rng)));
      CHECK(Wstar <= renormalized_energy_formula(f0, a) + 1e-9);
    }
  }
}

TEST_CASE("green mass consistency") {
  const auto id = ConformalMap::identity();
  const auto disk = domain_mesh(id, 0.02);
  {
    const auto g = green_mass_consistency(id, 0.3, disk);
    CHECK(g.spectral == doctest::Approx(mass_disk_03).epsilon(1e-12));
    CHECK(g.diff <= 5e-3);
  }
  {
    const auto g = green_mass_consistency(id, 0.0, disk);
    CHECK(std::abs(g.spectral) < 1e-14);
    CHECK(std::abs(g.fem) < 5e-3);
  }
  {
    const auto f0 = quad();
    const auto g = green_mass_consistency(f0, a_star, domain_mesh(f0, 0.02));
    CHECK(g.diff <= 1e-2);
    CHECK(g.spectral == doctest::Approx(-std::log(value_star)).epsilon(1e-9));
  }
}

TEST_CASE("mu decomposition, spectral route") {
  {
    const auto id = ConformalMap::identity();
    const auto u = canonical_harmonic_map(make_canonical_spec(id, tangential(id), 0.0));
    const auto mu = mu_decomposition([&](cd z) { return u.on_disk(z); });
    double worst = 0.0;
    for (const auto& ring : mu.mu)
      for (double v : ring) worst = std::max(worst, std::abs(v));
    CHECK(worst <= 1e-8);
    CHECK(mu.harmonic_residual <= 1e-8);
    CHECK(mu.loop_residual <= 1e-8);
    CHECK(mu.dirichlet_energy <= 1e-8);
  }
  {
    const auto f0 = quad();
    const auto spec = make_canonical_spec(f0, tangential(f0), 0.0);
    const auto u = canonical_harmonic_map(spec);
    const auto mu = mu_decomposition([&](cd z) { return u.on_disk(z); });
    const double ref0 = std::log(std::abs(spec.f.derivative(mu.radii[0])));
    double worst = 0.0;
    for (std::size_t k = 0; k < mu.radii.size(); ++k)
      for (std::size_t j = 0; j < mu.n_theta; ++j) {
        const cd z = std::polar(mu.radii[k], two_pi * j / mu.n_theta);
        worst = std::max(worst, std::abs(mu.at(k, j) - (std::log(std::abs(spec.f.derivative(z))) - ref0)));
      }
    CHECK(worst <= 1e-4);
    CHECK(mu.harmonic_residual <= 1e-4);
    // Dirichlet identity: integral of |f''/f'|^2 over the disk equals the energy of mu
    CHECK(std::abs(mu.dirichlet_energy - wp_energy(spec.f).value) <= 1e-2);
  }
}

TEST_CASE("mu decomposition, mesh route") {
  const auto f0 = quad();
  const auto mesh = domain_mesh(f0, 0.02);
  FemOperators ops(mesh);
  const auto spec = make_canonical_spec(f0, tangential(f0), 0.0);
  const auto u = canonical_harmonic_map(spec);
  std::vector<cd> vals(mesh.n_vertices());
  for (std::size_t v = 0; v < vals.size(); ++v) {
    const cd x = mesh.vertices[v];
    vals[v] = std::abs(x) < 1e-12 ? cd{1.0} : u(x);
  }
  const auto mu = mu_decomposition(ops, vals, 0.0, 0.1, 1e-2);
  MESSAGE("closedness " << mu.closedness_residual << " harmonic " << mu.harmonic_residual << " loop "
                        << mu.loop_residual << " energy " << mu.dirichlet_energy);
  // compare with ln|f'(f^{-1}(x))| up to a constant on vertices away from the pole
  double sum = 0.0;
  std::size_t cnt = 0;
  std::vector<double> diff(mesh.n_vertices(), 0.0);
  for (std::size_t v = 0; v < vals.size(); ++v) {
    const cd x = mesh.vertices[v];
    if (std::abs(x) < 0.15) continue;
    diff[v] = mu.mu[v] - std::log(std::abs(spec.f.derivative(spec.f.inverse(x))));
    sum += diff[v];
    ++cnt;
  }
  const double shift = sum / cnt;
  double worst = 0.0;
  for (std::size_t v = 0; v < vals.size(); ++v)
    if (std::abs(mesh.vertices[v]) >= 0.15) worst = std::max(worst, std::abs(diff[v] - shift));
  MESSAGE("mesh mu max deviation " << worst);
  CHECK(worst < 2e-2);
  CHECK(mu.closedness_residual < 0.25);
}

TEST_CASE("renorm report") {
  const auto f0 = quad();
  const auto rep = renorm_report(f0, tangential(f0));
  CHECK(std::abs(rep.vortex.a - a_star) < 1e-6);
  CHECK(rep.route_discrepancy <= 1e-2);
  CHECK(rep.green_mass == doctest::Approx(-std::log(value_star)).epsilon(1e-9));
  // W0 - 2 pi ln|f'(0)| reproduces the formula route
  CHECK(rep.W0 - two_pi * std::log(value_star) == doctest::Approx(rep.W_formula).epsilon(1e-9));
  const auto j = rep.to_json();
  CHECK(j.contains("route_discrepancy"));
  CHECK(j["W_direct_table"].size() == 5);
}
