#include "gluni/renorm.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include <Eigen/SparseCholesky>
#include <boost/math/tools/roots.hpp>

#include "gluni/error.hpp"
#include "gluni/parallel.hpp"
#include "gluni/quadrature.hpp"

namespace gluni {

namespace {

double wrap_unit(double t) {
  t -= std::floor(t);
  return t >= 1.0 ? 0.0 : t;
}

}  // namespace

// ---------------------------------------------------------------------------
// canonical harmonic map

CanonicalMapSpec make_canonical_spec(const ConformalMap& f0, const BoundaryData& data, cd a, int n_modes) {
  if (n_modes < 8) fail(ErrorCode::InvalidArgument, "need at least 8 Fourier modes");
  const cd omega = f0.inverse(a);
  auto f = rebase(f0, omega);
  const auto to_base = f0.pre().inverse().compose(f.pre());
  auto pulled = FourierBoundary::from_function(
      [&](double th) { return data.value(wrap_unit(std::arg(to_base(std::exp(I * th))) / two_pi)); }, n_modes,
      static_cast<std::size_t>(8 * n_modes));
  auto phi = solve_phi_tilde(pulled);
  return {f0, data, a, std::move(f), to_base, std::move(pulled), std::move(phi)};
}

CanonicalHarmonicMap::CanonicalHarmonicMap(CanonicalMapSpec spec) : spec_(std::move(spec)) {
  const double k = std::round(spec_.phi.q_mean);
  if (two_pi * std::abs(spec_.phi.q_mean - k) > 1e-6)
    fail(ErrorCode::PhaseClosureFailure, "phase loop misses a multiple of 2 pi");
  // fix the gauge at the theta = 0 boundary sample
  const cd g0 = spec_.data.value(wrap_unit(std::arg(spec_.to_base(cd{1.0})) / two_pi));
  anchor_ = g0 * std::exp(-I * spec_.phi.phi.conjugate_smooth(cd{1.0}));

  const std::size_t M = 1024;
  double acc = 0.0;
  for (std::size_t j = 0; j < M; ++j) {
    const cd z = std::exp(I * (two_pi * j / M));
    const cd g = spec_.data.value(wrap_unit(std::arg(spec_.to_base(z)) / two_pi));
    acc += std::norm(on_disk(z) - g);
  }
  trace_error_ = std::sqrt(acc / M);
}

cd CanonicalHarmonicMap::on_disk(cd z) const {
  const double r = std::abs(z);
  if (r == 0.0) fail(ErrorCode::InvalidArgument, "canonical map is singular at the pole");
  return anchor_ * (z / r) * std::exp(I * spec_.phi.phi.conjugate_smooth(z));
}

cd CanonicalHarmonicMap::operator()(cd x) const { return on_disk(spec_.f.inverse(x)); }

int CanonicalHarmonicMap::degree_around_pole(double radius, std::size_t n) const {
  std::vector<cd> s(n);
  for (std::size_t j = 0; j < n; ++j) s[j] = (*this)(spec_.a + radius * std::exp(I * (two_pi * j / n)));
  return degree_of_samples(s);
}

CanonicalHarmonicMap canonical_harmonic_map(const CanonicalMapSpec& spec) { return CanonicalHarmonicMap(spec); }

// ---------------------------------------------------------------------------
// renormalized energy

DirectEnergy renormalized_energy_direct(const CanonicalMapSpec& spec, std::span<const double> deltas_in,
                                        std::size_t n_theta) {
  std::vector<double> deltas(deltas_in.begin(), deltas_in.end());
  if (deltas.empty()) deltas = {0.04, 0.02, 0.01, 0.005, 0.0025};
  if (deltas.size() < 3) fail(ErrorCode::InvalidArgument, "need at least three radii");
  for (std::size_t k = 0; k < deltas.size(); ++k) {
    if (!(deltas[k] >= 1e-3)) fail(ErrorCode::InvalidArgument, "radii must be >= 1e-3");
    if (k > 0 && !(deltas[k] < deltas[k - 1])) fail(ErrorCode::InvalidArgument, "radii must decrease");
  }
  const auto& f = spec.f;
  const auto& H = spec.phi.phi;
  const cd a = spec.a;
  const double fp0 = std::abs(f.derivative_at_0());
  const auto& gl = gauss_legendre(24);

  auto radial_energy = [&](double r0, double r1, double th) {
    double s = 0.0;
    const double half = 0.5 * (r1 - r0), mid = 0.5 * (r1 + r0);
    for (std::size_t q = 0; q < gl.nodes.size(); ++q) {
      const double r = mid + half * gl.nodes[q];
      s += gl.weights[q] * half * std::norm(H.smooth_gradient(std::polar(r, th))) * r;
    }
    return s;
  };

  DirectEnergy out;
  for (double delta : deltas) {
    std::vector<double> contrib(n_theta, 0.0);
    parallel_for(n_theta, [&](std::size_t j) {
      const double th = two_pi * j / n_theta;
      const cd e = std::exp(I * th);
      auto gap = [&](double r) { return std::abs(f(r * e) - a) - delta; };
      double hi = std::min(2.0 * delta / fp0, 0.5);
      while (gap(hi) <= 0.0) {
        if (hi >= 0.999) fail(ErrorCode::InvalidArgument, "delta disk reaches the boundary");
        hi = std::min(2.0 * hi, 0.999);
      }
      std::uintmax_t iters = 200;
      const auto [lo_r, hi_r] = boost::math::tools::toms748_solve(
          gap, 0.0, hi, -delta, gap(hi), boost::math::tools::eps_tolerance<double>(50), iters);
      const double rmin = 0.5 * (lo_r + hi_r);
      double v = std::log(1.0 / rmin) + 2.0 * (H.smooth_part(e) - H.smooth_part(rmin * e));
      // panels toward the boundary where H may vary fastest
      const std::array<double, 4> cuts{rmin, rmin + 0.5 * (1.0 - rmin), rmin + 0.9 * (1.0 - rmin), 1.0};
      for (std::size_t p = 0; p + 1 < cuts.size(); ++p) v += radial_energy(cuts[p], cuts[p + 1], th);
      contrib[j] = v;
    });
    double total = 0.0;
    for (double c : contrib) total += c;
    total *= two_pi / static_cast<double>(n_theta);
    out.table.push_back({delta, total, total - two_pi * std::log(1.0 / delta)});
  }
  const std::size_t n = out.table.size();
  if (std::abs(out.table[n - 1].W - out.table[n - 2].W) > 1e-2)
    fail(ErrorCode::NonconvergentLimit, "truncated energies do not stabilize");
  // least-squares fit W(delta) = c0 + c1 delta on the last three rows
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t k = n - 3; k < n; ++k) {
    const double x = out.table[k].delta, y = out.table[k].W;
    sx += x, sy += y, sxx += x * x, sxy += x * y;
  }
  const double c1 = (3.0 * sxy - sx * sy) / (3.0 * sxx - sx * sx);
  out.W = (sy - c1 * sx) / 3.0;
  return out;
}

double renormalized_energy_formula(const CanonicalMapSpec& spec) {
  return wp_energy(spec.f).value + two_pi * std::log(std::abs(spec.f.derivative_at_0()));
}

double renormalized_energy_formula(const ConformalMap& f0, cd a) {
  const auto f = rebase(f0, f0.inverse(a));
  return wp_energy(f).value + two_pi * std::log(std::abs(f.derivative_at_0()));
}

// ---------------------------------------------------------------------------
// optimal vortex

namespace {

// Nelder-Mead maximization in the plane.
cd nelder_mead_max(const std::function<double(cd)>& obj, cd start, double size) {
  std::array<cd, 3> p{start, start + size, start + I * size};
  std::array<double, 3> v{};
  for (int k = 0; k < 3; ++k) v[k] = -obj(p[k]);
  for (int it = 0; it < 5000; ++it) {
    std::array<int, 3> o{0, 1, 2};
    std::sort(o.begin(), o.end(), [&](int a, int b) { return v[a] < v[b]; });
    const int best = o[0], mid = o[1], worst = o[2];
    const double diam = std::max({std::abs(p[0] - p[1]), std::abs(p[1] - p[2]), std::abs(p[0] - p[2])});
    if (diam < 1e-12) break;
    const cd c = 0.5 * (p[best] + p[mid]);
    const cd xr = c + (c - p[worst]);
    const double vr = -obj(xr);
    if (vr < v[best]) {
      const cd xe = c + 2.0 * (c - p[worst]);
      const double ve = -obj(xe);
      if (ve < vr) p[worst] = xe, v[worst] = ve;
      else p[worst] = xr, v[worst] = vr;
      continue;
    }
    if (vr < v[mid]) {
      p[worst] = xr, v[worst] = vr;
      continue;
    }
    const cd xc = vr < v[worst] ? c + 0.5 * (xr - c) : c + 0.5 * (p[worst] - c);
    const double vc = -obj(xc);
    if (vc < std::min(vr, v[worst])) {
      p[worst] = xc, v[worst] = vc;
      continue;
    }
    for (int k : {mid, worst}) {
      p[k] = p[best] + 0.5 * (p[k] - p[best]);
      v[k] = -obj(p[k]);
    }
  }
  int b = 0;
  for (int k = 1; k < 3; ++k)
    if (v[k] < v[b]) b = k;
  return p[b];
}

bool lex_less(cd a, cd b) { return a.real() < b.real() || (a.real() == b.real() && a.imag() < b.imag()); }

}  // namespace

OptimalVortex optimal_vortex(const ConformalMap& f0, std::size_t grid) {
  if (grid < 3) fail(ErrorCode::InvalidArgument, "grid too small");
  auto obj = [&](cd w) {
    const double m = std::norm(w);
    if (m >= 1.0) return -1.0;
    return std::abs(f0.derivative(w)) * (1.0 - m);
  };
  const double r_max = 0.999;
  std::vector<cd> row_best(grid);
  std::vector<double> row_val(grid, -2.0);
  parallel_for(grid, [&](std::size_t i) {
    const double r = r_max * static_cast<double>(i) / static_cast<double>(grid - 1);
    for (std::size_t j = 0; j < grid; ++j) {
      const cd w = std::polar(r, two_pi * static_cast<double>(j) / static_cast<double>(grid));
      const double v = obj(w);
      const double tol = 1e-14 * std::abs(v);
      if (v > row_val[i] + tol || (std::abs(v - row_val[i]) <= tol && lex_less(w, row_best[i]))) {
        row_val[i] = std::max(v, row_val[i]);
        row_best[i] = w;
      }
    }
  });
  cd start = row_best[0];
  double best = row_val[0];
  for (std::size_t i = 1; i < grid; ++i) {
    const double tol = 1e-14 * std::abs(best);
    if (row_val[i] > best + tol || (std::abs(row_val[i] - best) <= tol && lex_less(row_best[i], start))) {
      best = std::max(best, row_val[i]);
      start = row_best[i];
    }
  }
  const cd w = nelder_mead_max(obj, start, r_max / static_cast<double>(grid - 1));
  if (std::abs(w) > 0.999) fail(ErrorCode::BoundaryArgmax, "maximizer approaches the unit circle");
  return {w, f0(w), obj(w)};
}

// ---------------------------------------------------------------------------
// Green mass

GreenMassCheck green_mass_consistency(const ConformalMap& f0, cd a, const TriMesh& mesh) {
  const auto f = rebase(f0, f0.inverse(a));
  GreenMassCheck out;
  out.spectral = -std::log(std::abs(f.derivative_at_0()));
  out.fem = green_dirichlet_fem(mesh, a).mass;
  out.diff = std::abs(out.spectral - out.fem);
  return out;
}

// ---------------------------------------------------------------------------
// mu decomposition, spectral route

namespace {

struct PolarDerivs {
  double mu_r;
  double mu_theta;
};

PolarDerivs polar_mu_derivs(const std::function<cd(cd)>& u, double r, double th) {
  // fourth-order central differences
  auto d1 = [](const std::function<cd(double)>& g, double h) {
    return (g(-2 * h) - 8.0 * g(-h) + 8.0 * g(h) - g(2 * h)) / (12.0 * h);
  };
  const cd u0 = u(std::polar(r, th));
  const cd ut = d1([&](double s) { return u(std::polar(r, th + s)); }, 1e-3);
  const cd ur = d1([&](double s) { return u(std::polar(r + s, th)); }, std::min({1e-3, 0.2 * r, 0.4 * (1.0 - r)}));
  const double n = std::norm(u0);
  const double phi_t = (ut * std::conj(u0)).imag() / n;
  const double phi_r = (ur * std::conj(u0)).imag() / n;
  // *omega = d Phi with Phi_r = phi_theta / r, Phi_theta = -r phi_r; G o f = ln r
  return {(phi_t - 1.0) / r, -r * phi_r};
}

}  // namespace

MuSpectral mu_decomposition(const std::function<cd(cd)>& u, std::span<const double> radii_in, std::size_t n_theta,
                            double loop_tol) {
  std::vector<double> radii(radii_in.begin(), radii_in.end());
  if (radii.empty())
    for (int k = 0; k <= 16; ++k) radii.push_back(0.1 + 0.05 * k);
  if (n_theta < 16) fail(ErrorCode::InvalidArgument, "need at least 16 angular samples");
  for (std::size_t k = 0; k < radii.size(); ++k)
    if (!(radii[k] > 0 && radii[k] < 1) || (k > 0 && !(radii[k] > radii[k - 1])))
      fail(ErrorCode::InvalidArgument, "radii must increase inside (0,1)");

  MuSpectral out;
  out.radii = radii;
  out.n_theta = n_theta;
  out.mu.assign(radii.size(), std::vector<double>(n_theta, 0.0));
  const int nmax = static_cast<int>(n_theta / 2) - 1;
  std::vector<double> ring_loop(radii.size(), 0.0), ring_lap(radii.size(), 0.0), ring_grad(radii.size(), 0.0);

  parallel_for(radii.size(), [&](std::size_t k) {
    const double r = radii[k];
    std::vector<double> mt(n_theta), mr(n_theta);
    for (std::size_t j = 0; j < n_theta; ++j) {
      const auto d = polar_mu_derivs(u, r, two_pi * j / n_theta);
      mt[j] = d.mu_theta;
      mr[j] = d.mu_r;
      ring_grad[k] = std::max(ring_grad[k], std::hypot(d.mu_r, d.mu_theta / r));
    }
    std::vector<cd> c(nmax + 1);
    for (int n = 0; n <= nmax; ++n) {
      cd s = 0.0;
      for (std::size_t j = 0; j < n_theta; ++j) s += mt[j] * std::exp(-I * (n * two_pi * j / n_theta));
      c[n] = s / static_cast<double>(n_theta);
    }
    ring_loop[k] = two_pi * c[0].real();
    // periodic primitive relative to theta = 0, and the angular second derivative
    for (std::size_t j = 0; j < n_theta; ++j) {
      const double th = two_pi * j / n_theta;
      double prim = 0.0, second = 0.0;
      for (int n = 1; n <= nmax; ++n) {
        const cd e = std::exp(I * (n * th));
        prim += 2.0 * (c[n] / (I * static_cast<double>(n)) * (e - 1.0)).real();
        second += 2.0 * (I * static_cast<double>(n) * c[n] * e).real();
      }
      out.mu[k][j] = prim;
      // mu_rr by a five-point difference of mu_r
      const double h2 = std::min(5e-3, 0.2 * std::min(r, 1.0 - r));
      auto mr_at = [&](double s) { return polar_mu_derivs(u, s, th).mu_r; };
      const double mrr =
          (mr_at(r - 2 * h2) - 8.0 * mr_at(r - h2) + 8.0 * mr_at(r + h2) - mr_at(r + 2 * h2)) / (12.0 * h2);
      ring_lap[k] = std::max(ring_lap[k], std::abs(mrr + mr[j] / r + second / (r * r)));
    }
  });
  out.loop_residual = 0.0;
  for (double l : ring_loop) out.loop_residual = std::max(out.loop_residual, std::abs(l));
  if (out.loop_residual > loop_tol) fail(ErrorCode::NonClosedForm, "loop integral of *omega - dG is not zero");

  // radial integration along theta = 0
  const auto& gl = gauss_legendre(16);
  double base = 0.0;
  for (std::size_t k = 0; k < radii.size(); ++k) {
    if (k > 0) {
      const double a = radii[k - 1], b = radii[k];
      for (std::size_t q = 0; q < gl.nodes.size(); ++q) {
        const double s = 0.5 * (a + b) + 0.5 * (b - a) * gl.nodes[q];
        base += 0.5 * (b - a) * gl.weights[q] * polar_mu_derivs(u, s, 0.0).mu_r;
      }
    }
    for (auto& v : out.mu[k]) v += base;
  }
  double gmax = 0.0, lmax = 0.0;
  for (std::size_t k = 0; k < radii.size(); ++k) {
    gmax = std::max(gmax, ring_grad[k]);
    lmax = std::max(lmax, ring_lap[k]);
  }
  out.harmonic_residual = lmax / (1.0 + gmax);

  // Dirichlet energy over the disk
  const auto& glr = gauss_legendre(48);
  const double r_out = 0.999;
  std::vector<double> e(glr.nodes.size(), 0.0);
  parallel_for(glr.nodes.size(), [&](std::size_t q) {
    const double r = 0.5 * r_out * (1.0 + glr.nodes[q]);
    double s = 0.0;
    for (std::size_t j = 0; j < n_theta; ++j) {
      const auto d = polar_mu_derivs(u, r, two_pi * j / n_theta);
      s += d.mu_r * d.mu_r + d.mu_theta * d.mu_theta / (r * r);
    }
    e[q] = 0.5 * r_out * glr.weights[q] * r * s * two_pi / static_cast<double>(n_theta);
  });
  for (double v : e) out.dirichlet_energy += v;
  return out;
}

// ---------------------------------------------------------------------------
// mu decomposition, mesh route

MuMesh mu_decomposition(const FemOperators& ops, std::span<const cd> u, cd a, double exclude, double loop_tol,
                        double green_coefficient) {
  const auto& mesh = ops.mesh();
  const std::size_t nv = mesh.n_vertices(), nt = mesh.n_triangles();
  if (u.size() != nv) fail(ErrorCode::InvalidArgument, "field does not match the mesh");
  MuMesh out;
  if (green_coefficient != 0.0) {
    out.green = green_dirichlet_fem(ops, a);
  } else {
    out.green.green.assign(nv, 0.0);
    out.green.regular.assign(nv, 0.0);
    out.green.pole = a;
  }
  out.target.assign(nt, 0.0);
  std::vector<char> used(nt, 0);
  for (std::size_t t = 0; t < nt; ++t) {
    const auto& tri = mesh.triangles[t];
    const cd c = (mesh.vertices[tri[0]] + mesh.vertices[tri[1]] + mesh.vertices[tri[2]]) / 3.0;
    if (std::abs(c - a) <= exclude) continue;
    used[t] = 1;
    const auto [ux, uy] = ops.field_gradient(t, u);
    const cd um = (u[tri[0]] + u[tri[1]] + u[tri[2]]) / 3.0;
    const double n = std::norm(um);
    const double wx = (ux * std::conj(um)).imag() / n, wy = (uy * std::conj(um)).imag() / n;
    const cd grad_phi{wy, -wx};
    const cd w = c - a;
    const cd grad_g =
        green_coefficient == 0.0 ? cd{0.0} : w / std::norm(w) + ops.scalar_gradient(t, out.green.regular);
    out.target[t] = grad_phi - grad_g;
  }
  // normal equations of min sum A_T |grad mu - target|^2, pinned at one vertex
  std::vector<double> rhs(nv, 0.0);
  std::vector<Eigen::Triplet<double>> trip;
  std::vector<char> touched(nv, 0);
  for (std::size_t t = 0; t < nt; ++t) {
    if (!used[t]) continue;
    const double A = mesh.triangle_area(t);
    for (int i = 0; i < 3; ++i) {
      const int vi = mesh.triangles[t][i];
      touched[vi] = 1;
      const cd gi = ops.basis_gradient(t, i);
      rhs[vi] += A * dot(gi, out.target[t]);
      for (int j = 0; j < 3; ++j) trip.emplace_back(vi, mesh.triangles[t][j], A * dot(gi, ops.basis_gradient(t, j)));
    }
  }
  int pin = -1;
  for (std::size_t v = 0; v < nv && pin < 0; ++v)
    if (touched[v]) pin = static_cast<int>(v);
  if (pin < 0) fail(ErrorCode::InvalidArgument, "exclusion radius covers the mesh");
  std::vector<Eigen::Triplet<double>> kept;
  for (const auto& tr : trip)
    if (tr.row() != pin && tr.col() != pin) kept.push_back(tr);
  for (std::size_t v = 0; v < nv; ++v)
    if (!touched[v] || static_cast<int>(v) == pin) kept.emplace_back(v, v, 1.0);
  Eigen::SparseMatrix<double> A(nv, nv);
  A.setFromTriplets(kept.begin(), kept.end());
  Eigen::VectorXd b(nv);
  for (std::size_t v = 0; v < nv; ++v) b[v] = (touched[v] && static_cast<int>(v) != pin) ? rhs[v] : 0.0;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(A);
  if (solver.info() != Eigen::Success) fail(ErrorCode::SolverFailure, "least-squares system is singular");
  const Eigen::VectorXd x = solver.solve(b);
  out.mu.assign(x.data(), x.data() + nv);

  double res2 = 0.0, tgt2 = 0.0, lo = 1e300, hi = -1e300;
  for (std::size_t t = 0; t < nt; ++t) {
    if (!used[t]) continue;
    const double Ar = mesh.triangle_area(t);
    const cd g = ops.scalar_gradient(t, out.mu);
    res2 += Ar * std::norm(g - out.target[t]);
    tgt2 += Ar * std::norm(out.target[t]);
    out.dirichlet_energy += Ar * std::norm(g);
    for (int v : mesh.triangles[t]) lo = std::min(lo, out.mu[v]), hi = std::max(hi, out.mu[v]);
  }
  out.closedness_residual = tgt2 > 0 ? std::sqrt(res2 / tgt2) : 0.0;
  out.oscillation = hi - lo;

  // discrete Laplacian on interior vertices whose star avoids the exclusion disk
  std::vector<char> clean(nv, 1);
  const auto bmask = mesh.boundary_mask();
  for (std::size_t t = 0; t < nt; ++t)
    if (!used[t])
      for (int v : mesh.triangles[t]) clean[v] = 0;
  std::vector<cd> mu_c(out.mu.begin(), out.mu.end()), Kmu(nv);
  ops.apply_stiffness(mu_c, Kmu);
  double lap2 = 0.0;
  for (std::size_t v = 0; v < nv; ++v)
    if (clean[v] && !bmask[v]) lap2 += std::norm(Kmu[v]) / ops.lumped_mass()[v];
  out.harmonic_residual = std::sqrt(lap2) / std::max(1.0, std::sqrt(out.dirichlet_energy));

  // loop integrals of the target on circles around a
  const double far = mesh.boundary_distance(a);
  MeshLocator loc(mesh);
  for (double frac : {0.4, 0.6, 0.8}) {
    const double rho = std::max(1.5 * exclude, frac * far);
    if (rho >= far) continue;
    const std::size_t n = 512;
    double loop = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double th = two_pi * (j + 0.5) / n;
      const cd x = a + std::polar(rho, th);
      const auto t = loc.locate(x);
      if (!t) continue;
      loop += dot(out.target[t->triangle], I * std::exp(I * th)) * rho * two_pi / n;
    }
    out.loop_residual = std::max(out.loop_residual, std::abs(loop));
  }
  if (out.loop_residual > loop_tol) fail(ErrorCode::NonClosedForm, "loop integral of *omega - dG is not zero");
  return out;
}

// ---------------------------------------------------------------------------
// report

nlohmann::json RenormReport::to_json() const {
  nlohmann::json table = nlohmann::json::array();
  for (const auto& r : direct.table) table.push_back({{"delta", r.delta}, {"truncated", r.truncated}, {"W", r.W}});
  return {{"W_direct", direct.W},
          {"W_direct_table", table},
          {"W_formula", W_formula},
          {"W0", W0},
          {"green_mass", green_mass},
          {"vortex_argmax",
           {{"omega", {vortex.omega.real(), vortex.omega.imag()}},
            {"a", {vortex.a.real(), vortex.a.imag()}},
            {"value", vortex.value}}},
          {"route_discrepancy", route_discrepancy}};
}

RenormReport renorm_report(const ConformalMap& f0, const BoundaryData& data, std::optional<cd> a) {
  RenormReport rep;
  rep.vortex = optimal_vortex(f0);
  const auto spec = make_canonical_spec(f0, data, a.value_or(rep.vortex.a));
  rep.direct = renormalized_energy_direct(spec);
  rep.W_formula = renormalized_energy_formula(spec);
  rep.W0 = w0(spec.f);
  rep.green_mass = -std::log(std::abs(spec.f.derivative_at_0()));
  rep.route_discrepancy = std::abs(rep.direct.W - rep.W_formula);
  return rep;
}

}  // namespace gluni
