#include <doctest.h>

#include <cmath>

#include "gluni/conformal.hpp"
#include "gluni/curves.hpp"
#include "gluni/disk_analysis.hpp"
#include "gluni/error.hpp"
#include "gluni/frame_flow.hpp"
#include "gluni/gl_solver.hpp"
#include "gluni/mesh.hpp"
#include "gluni/renorm.hpp"

using namespace gluni;

namespace {

ConformalMap quad() { return ConformalMap::taylor({0.0, 1.0, 0.2}); }

void check_orthonormal(const FrameField& fr, std::size_t nr, std::size_t nt) {
  double worst = 0.0;
  bool direct = true;
  for (std::size_t i = 1; i <= nr; ++i)
    for (std::size_t j = 0; j < nt; ++j) {
      const cd x = fr.chart(0.95 * i / nr, two_pi * j / nt);
      const cd u = fr.u(x), v = fr.v(x);
      worst = std::max({worst, std::abs(std::abs(u) - 1.0), std::abs(std::abs(v) - 1.0), std::abs(dot(u, v))});
      direct = direct && wedge(v, u) > 0;
    }
  CHECK(worst <= 1e-8);
  CHECK(direct);
}

TriMesh domain_mesh(const ConformalMap& f, double h) {
  const auto n = static_cast<std::size_t>(std::ceil(1.3 * two_pi / h));
  const auto tr = boundary_trace(f, n);
  return triangulate(tr.polyline, h, tr.params);
}

std::vector<cd> tangential_boundary(const TriMesh& m, const ConformalMap& f) {
  // tangent of f(e^{2 pi i t}) at each boundary vertex parameter
  std::vector<cd> b;
  for (std::size_t k = 0; k < m.boundary_loop.size(); ++k) {
    const cd z = std::exp(I * (two_pi * m.boundary_param[k]));
    const cd t = I * z * f.derivative(z);
    b.push_back(t / std::abs(t));
  }
  return b;
}

}  // namespace

TEST_CASE("conformal frames") {
  {
    const auto fr = frame_from_conformal(ConformalMap::identity());
    for (cd x : {cd{0.3, 0.2}, cd{-0.7, 0.1}, cd{0.0, -0.5}}) {
      CHECK(std::abs(fr.u(x) - I * x / std::abs(x)) < 1e-14);
      CHECK(std::abs(fr.v(x) - x / std::abs(x)) < 1e-14);
      CHECK(fr.phi(x) == doctest::Approx(std::log(std::abs(x))).epsilon(1e-14));
    }
    check_orthonormal(fr, 16, 32);
  }
  {
    const auto f = mobius(0.5, 0.0);
    const auto fr = frame_from_conformal(f);
    check_orthonormal(fr, 16, 32);
    const auto G = dirichlet_green_disk(fr.a);
    for (cd x : {cd{0.3, 0.2}, cd{-0.7, 0.1}, cd{0.0, -0.5}}) {
      const double expected = std::log(std::abs(f.derivative(f.inverse(x)))) + G(x);
      CHECK(std::abs(fr.phi(x) - expected) < 1e-8);
    }
  }
  check_orthonormal(frame_from_conformal(quad()), 64, 128);
}

TEST_CASE("Cartan identity on catalog frames") {
  {
    const auto rep = cartan_identity_check(frame_from_conformal(ConformalMap::identity()));
    CHECK(rep.max_residual <= 1e-6);
    CHECK(std::abs(rep.loop_error) <= 1e-4);
  }
  {
    const auto rep = cartan_identity_check(frame_from_conformal(quad()));
    MESSAGE("quad cartan " << rep.max_residual << " loop " << rep.loop_error);
    CHECK(rep.max_residual <= 1e-4);
    CHECK(std::abs(rep.loop_error) <= 1e-4);
  }
  {
    const auto rep = cartan_identity_check(frame_from_conformal(mobius(0.5, 0.0)), 32, 64);
    CHECK(rep.max_residual <= 1e-4);
    CHECK(std::abs(rep.loop_error) <= 1e-4);
  }
}

TEST_CASE("flows of the identity frame") {
  const auto fr = frame_from_conformal(ConformalMap::identity());
  const auto flow = integrate_flow(fr);
  CHECK(std::abs(flow.rho - two_pi) <= 1e-6);
  CHECK(flow.accepted);
  double worst = 0.0;
  for (std::size_t k = 0; k < flow.s.size(); ++k)
    for (std::size_t j = 0; j < flow.theta.size(); ++j)
      worst = std::max(worst, std::abs(flow.psi[k][j] - std::exp(cd{flow.s[k], flow.theta[j]})));
  CHECK(worst < 1e-6);
  const auto rec = reconstruct_map(flow);
  double dev = 0.0;
  for (double r : {0.0, 0.3, 0.6, 0.9})
    for (int j = 0; j < 16; ++j) {
      const cd z = std::polar(r, two_pi * j / 16);
      dev = std::max(dev, std::abs(rec.map(z) - z));
    }
  CHECK(dev <= 1e-3);
  CHECK(rec.cr_residual <= 1e-3);
}

TEST_CASE("flows of the Moebius frame") {
  const auto f = mobius(0.5, 0.0);
  const auto fr = frame_from_conformal(f);
  const auto flow = integrate_flow(fr);
  CHECK(std::abs(flow.rho - two_pi) <= 1e-4);
  const double th0 = std::arg(f.inverse(flow.anchor));
  double worst = 0.0;
  for (std::size_t k = 0; k < flow.s.size(); k += 3)
    for (std::size_t j = 0; j < flow.theta.size(); j += 5)
      worst = std::max(worst, std::abs(flow.psi[k][j] - f(std::exp(cd{flow.s[k], flow.theta[j] + th0}))));
  CHECK(worst <= 1e-4);
  CHECK(flow.closure_error <= 1e-4);
  CHECK(flow.commutator_error <= 1e-4);
  const auto rec = reconstruct_map(flow);
  const auto g = f.gauge_fixed();
  for (double r : {0.2, 0.5, 0.9})
    for (int j = 0; j < 8; ++j) {
      const cd z = std::polar(r, two_pi * j / 8);
      CHECK(std::abs(rec.map(z) - g(z)) <= 1e-2);
    }
}

TEST_CASE("quadratic frame round trip") {
  const auto fr = frame_from_conformal(quad());
  const auto flow = integrate_flow(fr);
  MESSAGE("rho " << flow.rho << " closure " << flow.closure_error << " commutator " << flow.commutator_error);
  CHECK(flow.closure_error <= 1e-4);
  CHECK(flow.commutator_error <= 1e-4);
  const auto rec = reconstruct_map(flow);
  REQUIRE(rec.coefficients.size() >= 4);
  CHECK(std::abs(rec.coefficients[0]) <= 1e-2);
  CHECK(std::abs(rec.coefficients[1] - 1.0) <= 1e-2);
  CHECK(std::abs(rec.coefficients[2] - 0.2) <= 1e-2);
  for (std::size_t n = 3; n < rec.coefficients.size(); ++n) CHECK(std::abs(rec.coefficients[n]) <= 1e-2);
}

TEST_CASE("reconstruction is anchor independent up to rotation") {
  for (double alpha : {0.4, 1.7, 3.9}) {
    const auto f = quad().precompose_rotation(alpha);
    const auto rec = reconstruct_map(integrate_flow(frame_from_conformal(f)));
    const auto g = f.gauge_fixed();
    for (double r : {0.3, 0.8})
      for (int j = 0; j < 8; ++j) {
        const cd z = std::polar(r, two_pi * j / 8);
        CHECK(std::abs(rec.map(z) - g(z)) <= 1e-2);
      }
  }
}

TEST_CASE("Liouville boundary relation") {
  {
    const auto f = ConformalMap::identity();
    CHECK(liouville_residual(frame_from_conformal(f), f) <= 1e-6);
  }
  {
    const auto f = mobius(0.3, 0.0);
    CHECK(liouville_residual(frame_from_conformal(f), f) <= 1e-3);
  }
  {
    const auto f = quad();
    CHECK(liouville_residual(frame_from_conformal(f), f) <= 1e-3);
  }
}

TEST_CASE("GL-sourced frames") {
  GLConfig cfg;
  cfg.eps_schedule = {0.2, 0.1, 0.05};
  SUBCASE("disk") {
    const auto f = ConformalMap::identity();
    const auto mesh = domain_mesh(f, 0.02);
    const auto res = continuation(mesh, tangential_boundary(mesh, f), cfg);
    const auto& sol = res.stages.back();
    REQUIRE(res.reports.back().count() == 1);
    const cd a = res.vortex_path.back()[0];
    GLFrameInfo info;
    const auto fr = frame_from_gl(mesh, sol, a, &info);
    CHECK(info.degree == 1);
    const auto ref = frame_from_conformal(f);
    double worst = 0.0;
    for (double r : {0.3, 0.5, 0.7, 0.9})
      for (int j = 0; j < 32; ++j) {
        const cd x = std::polar(r, two_pi * j / 32);
        worst = std::max(worst, std::abs(fr.u(x) - ref.u(x)));
      }
    CHECK(worst <= 5e-2);
    MESSAGE("GL disk frame deviation " << worst << " mu oscillation " << info.mu.oscillation);
    const auto cart = cartan_identity_check(fr, 16, 64, 0.4, 0.9);
    MESSAGE("GL disk cartan " << cart.max_residual << " loop " << cart.loop_error);
    FlowOptions opt;
    opt.sigma_min = std::log(0.25);
    opt.tolerance = 1e-2;
    opt.return_tol = 1e-2;
    opt.step_tol = 1e-8;
    const auto flow = integrate_flow(fr, opt);
    MESSAGE("GL disk rho " << flow.rho << " closure " << flow.closure_error << " commutator "
                           << flow.commutator_error);
    const auto rec = reconstruct_map(flow, 16, 5e-2);
    MESSAGE("GL disk CR residual " << rec.cr_residual);
    double dev = 0.0;
    for (double r : {0.3, 0.5, 0.8})
      for (int j = 0; j < 16; ++j) {
        const cd z = std::polar(r, two_pi * j / 16);
        dev = std::max(dev, std::abs(rec.map(z) - z));
      }
    MESSAGE("GL disk reconstruction deviation " << dev);
    CHECK(dev <= 5e-2);
  }
  SUBCASE("quadratic domain") {
    const auto f0 = quad();
    const auto mesh = domain_mesh(f0, 0.02);
    const auto res = continuation(mesh, tangential_boundary(mesh, f0), cfg);
    REQUIRE(res.reports.back().count() == 1);
    const cd a = res.vortex_path.back()[0];
    MESSAGE("GL vortex " << a);
    CHECK(std::abs(a - 0.186973614477580) <= std::max(2 * mesh.h, 5e-2));
    const auto fr = frame_from_gl(mesh, res.stages.back(), a);
    const auto ref = frame_from_conformal(rebase(f0, f0.inverse(a)));
    double worst = 0.0;
    for (double r : {0.4, 0.6, 0.8})
      for (int j = 0; j < 32; ++j) {
        const cd x = ref.chart(r, two_pi * j / 32);
        worst = std::max(worst, std::abs(fr.u(x) - ref.u(x)));
      }
    MESSAGE("GL quad frame deviation " << worst);
    CHECK(worst <= 1e-1);
    // pole normalization of Phi fixes the theta period
    FlowOptions opt;
    opt.sigma_min = std::log(0.25);
    opt.tolerance = 1e-2;
    opt.return_tol = 1e-2;
    opt.step_tol = 1e-8;
    const auto flow = integrate_flow(fr, opt);
    CHECK(std::abs(flow.rho - two_pi) <= 1e-3);
  }
  SUBCASE("degree zero") {
    const auto f = ConformalMap::identity();
    const auto mesh = domain_mesh(f, 0.04);
    std::vector<cd> b;
    for (double t : mesh.boundary_param) b.push_back(std::exp(I * 0.3 * std::sin(two_pi * t)));
    const auto res = continuation(mesh, b, cfg);
    GLFrameInfo info;
    FrameField fr;
    CHECK_NOTHROW(fr = frame_from_gl(mesh, res.stages.back(), 0.0, &info));
    CHECK(info.degree == 0);
    CHECK(fr.green_coefficient == 0.0);
    CHECK(std::abs(fr.phi(cd{0.3, 0.1}) - fr.phi(cd{0.3, 0.1} + 1e-3)) < 1e-1);
  }
}
