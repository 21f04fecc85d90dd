#include <doctest.h>

#include <cmath>
#include <map>
#include <random>

#include "gluni/conformal.hpp"
#include "gluni/curves.hpp"
#include "gluni/disk_analysis.hpp"
#include "gluni/error.hpp"
#include "gluni/fem.hpp"
#include "gluni/mesh.hpp"

using namespace gluni;

namespace {

TriMesh disk_mesh(double h) {
  const auto n = static_cast<std::size_t>(std::ceil(two_pi / h));
  const auto poly = circle_curve(0.0, 1.0).sample(n);
  return triangulate(poly, h);
}

void check_valid(const TriMesh& m) {
  for (std::size_t t = 0; t < m.n_triangles(); ++t) CHECK(m.triangle_area(t) > 0);
  CHECK(m.min_angle_degrees() >= 20.0);
  // every boundary-loop edge belongs to exactly one triangle, interior edges to two
  std::map<std::pair<int, int>, int> count;
  for (const auto& t : m.triangles)
    for (int k = 0; k < 3; ++k) {
      int a = t[k], b = t[(k + 1) % 3];
      count[{std::min(a, b), std::max(a, b)}]++;
    }
  std::size_t boundary_edges = 0;
  for (const auto& [e, c] : count) {
    CHECK(c <= 2);
    if (c == 1) ++boundary_edges;
  }
  CHECK(boundary_edges == m.boundary_loop.size());
  CHECK(signed_area(m.boundary_polyline()) > 0);
}

}  // namespace

TEST_CASE("disk mesh") {
  const auto m = disk_mesh(0.05);
  check_valid(m);
  // inscribed polygon area differs from pi by O(h^2)
  CHECK(std::abs(m.area() - pi) < 1e-2);
  const double expected = pi / (0.05 * 0.05) * 4.0 / std::sqrt(3.0);
  CHECK(m.n_triangles() > 0.5 * expected);
  CHECK(m.n_triangles() < 2.0 * expected);
  CHECK(m.max_edge() < 1.6 * 0.05);
  const auto fine = disk_mesh(0.02);
  CHECK(std::abs(fine.area() - pi) < 1e-3);
}

TEST_CASE("square mesh resolves the polygon exactly") {
  const auto sq = square_curve(1.0);
  const auto m = triangulate(sq.sample(64), 0.05);
  check_valid(m);
  CHECK(std::abs(m.area() - 1.0) < 1e-12);
}

TEST_CASE("log spiral mesh") {
  const auto c = log_spiral_curve(0.05, 0.02);
  std::vector<double> par;
  const auto poly = c.equal_arclength_polyline(256, &par);
  const auto m = triangulate(poly, 0.02, par);
  check_valid(m);
}

TEST_CASE("mesh rejects self-intersecting input") {
  std::vector<cd> bow;
  for (int k = 0; k < 32; ++k) {
    const double t = two_pi * k / 32;
    bow.emplace_back(std::sin(t), std::sin(2 * t));
  }
  CHECK_THROWS_AS((void)triangulate(bow, 0.1), NumericalError);
}

TEST_CASE("mesh JSON round trip") {
  const auto m = disk_mesh(0.2);
  const auto r = TriMesh::from_json(m.to_json());
  CHECK(r.vertices.size() == m.vertices.size());
  CHECK(r.triangles == m.triangles);
  CHECK(r.boundary_loop == m.boundary_loop);
}

TEST_CASE("Dirichlet energy examples") {
  const auto m = disk_mesh(0.02);
  std::vector<cd> x(m.n_vertices()), z(m.n_vertices()), c(m.n_vertices(), cd{0.3, 0.4});
  for (std::size_t v = 0; v < m.n_vertices(); ++v) {
    x[v] = m.vertices[v].real();
    z[v] = m.vertices[v];
  }
  CHECK(std::abs(dirichlet_energy(m, make_field(m, x)) - 0.5 * pi) < 2e-3);
  CHECK(std::abs(dirichlet_energy(m, make_field(m, z)) - pi) < 4e-3);
  CHECK(dirichlet_energy(m, make_field(m, c)) < 1e-20);
}

TEST_CASE("Dirichlet energy converges at second order") {
  double prev = 0.0;
  for (double h : {0.1, 0.05}) {
    const auto m = disk_mesh(h);
    std::vector<cd> z(m.vertices.begin(), m.vertices.end());
    const double err = std::abs(dirichlet_energy(m, make_field(m, z)) - pi);
    if (prev > 0) CHECK(std::log2(prev / err) >= 1.8);
    prev = err;
  }
}

TEST_CASE("GL energy examples") {
  const auto m = disk_mesh(0.02);
  std::vector<cd> z(m.vertices.begin(), m.vertices.end());
  const auto e = gl_energy(m, make_field(m, z), 0.5);
  CHECK(std::abs(e.potential - pi / 3.0) < 0.02 * pi / 3.0);
  std::vector<cd> one(m.n_vertices(), std::exp(0.3 * I));
  CHECK(gl_energy(m, make_field(m, one), 0.1).potential == 0.0);
  std::vector<cd> zero(m.n_vertices(), 0.0);
  CHECK(std::abs(gl_energy(m, make_field(m, zero), 1.0).potential - m.area() / 4.0) < 1e-12);
}

TEST_CASE("GL gradient") {
  const auto m = disk_mesh(0.1);
  const FemOperators ops(m);
  const auto mask = m.boundary_mask();
  std::vector<cd> one(m.n_vertices(), 1.0), g(m.n_vertices());
  ops.gl_gradient(one, 0.3, mask, g);
  for (cd v : g) CHECK(std::abs(v) < 1e-12);
  std::mt19937 rng(42);
  std::normal_distribution<double> N(0.0, 1.0);
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<cd> u(m.n_vertices()), d(m.n_vertices());
    for (auto& x : u) x = {N(rng), N(rng)};
    for (std::size_t v = 0; v < d.size(); ++v) d[v] = mask[v] ? cd{0.0} : cd{N(rng), N(rng)};
    ops.gl_gradient(u, 0.3, mask, g);
    double dir = 0.0;
    for (std::size_t v = 0; v < g.size(); ++v) {
      dir += dot(g[v], d[v]);
      if (mask[v]) CHECK(g[v] == cd{0.0});
    }
    const double t = 1e-6;
    std::vector<cd> up(u), um(u);
    for (std::size_t v = 0; v < u.size(); ++v) {
      up[v] += t * d[v];
      um[v] -= t * d[v];
    }
    const double fd = (ops.gl_energy(up, 0.3).total - ops.gl_energy(um, 0.3).total) / (2 * t);
    CHECK(std::abs(fd - dir) <= 1e-5 * std::abs(dir));
  }
}

TEST_CASE("Laplace solves") {
  const auto m = disk_mesh(0.05);
  std::vector<cd> bx, bz, bc;
  for (int v : m.boundary_loop) {
    bx.push_back(m.vertices[v].real());
    bz.push_back(m.vertices[v] / std::abs(m.vertices[v]));
    bc.push_back(cd{0.2, -0.1});
  }
  const auto ux = solve_laplace_dirichlet(m, bx);
  for (std::size_t v = 0; v < m.n_vertices(); ++v) CHECK(std::abs(ux.values[v] - m.vertices[v].real()) < 1e-9);
  const auto uc = solve_laplace_dirichlet(m, bc);
  for (cd v : uc.values) CHECK(std::abs(v - cd{0.2, -0.1}) < 1e-9);
  const auto uz = solve_laplace_dirichlet(m, bz);
  double worst = 0.0, maxmod = 0.0;
  for (std::size_t v = 0; v < m.n_vertices(); ++v) {
    worst = std::max(worst, std::abs(uz.values[v] - m.vertices[v]));
    maxmod = std::max(maxmod, std::abs(uz.values[v].real()));
  }
  CHECK(worst < 5e-3);
  CHECK(maxmod <= 1.0 + 1e-10);
}

TEST_CASE("FEM Green mass") {
  const auto m0 = disk_mesh(0.05);
  CHECK(std::abs(green_dirichlet_fem(m0, 0.0).mass) < 1e-3);
  const auto m = disk_mesh(0.02);
  const auto g = green_dirichlet_fem(m, 0.3);
  CHECK(std::abs(g.mass - 0.094310679471241) < 5e-3);
  CHECK_THROWS_AS((void)green_dirichlet_fem(m, 0.97), NumericalError);
  // the square's symmetries
  const auto sq = triangulate(square_curve(2.0).sample(64), 0.05);
  const double m1 = green_dirichlet_fem(sq, cd{0.3, 0.1}).mass;
  const double m2 = green_dirichlet_fem(sq, cd{-0.1, 0.3}).mass;
  const double m3 = green_dirichlet_fem(sq, cd{0.3, -0.1}).mass;
  CHECK(std::abs(m1 - m2) < 1e-3);
  CHECK(std::abs(m1 - m3) < 1e-3);
}
