#include "gluni/gl_solver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/SparseCholesky>

#include "gluni/conformal.hpp"
#include "gluni/error.hpp"

namespace gluni {

void GLConfig::validate() const {
  if (eps_schedule.empty()) throw ConfigError("eps_schedule", "must not be empty");
  for (std::size_t k = 0; k < eps_schedule.size(); ++k) {
    if (!(eps_schedule[k] > 0)) throw ConfigError("eps_schedule[" + std::to_string(k) + "]", "must be positive");
    if (k > 0 && !(eps_schedule[k] < eps_schedule[k - 1]))
      throw ConfigError("eps_schedule[" + std::to_string(k) + "]", "schedule must be strictly decreasing");
  }
  if (max_iters == 0) throw ConfigError("max_iters", "must be positive");
  if (!(grad_tol > 0)) throw ConfigError("grad_tol", "must be positive");
  if (!(armijo_c1 > 0 && armijo_c1 < 1)) throw ConfigError("armijo_c1", "must lie in (0,1)");
  if (!(armijo_shrink > 0 && armijo_shrink < 1)) throw ConfigError("armijo_shrink", "must lie in (0,1)");
  if (!(eta0 > 0)) throw ConfigError("eta0", "must be positive");
}

nlohmann::json GLConfig::to_json() const {
  const char* init_name = init == InitKind::harmonic_extension ? "harmonic"
                          : init == InitKind::prior_solution   ? "prior"
                                                               : "canonical_seed";
  return {{"eps_schedule", eps_schedule}, {"max_iters", max_iters},     {"grad_tol", grad_tol},
          {"armijo_c1", armijo_c1},       {"armijo_shrink", armijo_shrink}, {"restart_every", restart_every},
          {"init", init_name},            {"seed_center", {seed_center.real(), seed_center.imag()}},
          {"eta0", eta0},                 {"j0", j0},                   {"gap_band", gap_band}};
}

nlohmann::json BadDiskReport::to_json() const {
  nlohmann::json cl = nlohmann::json::array();
  for (const auto& c : clusters)
    cl.push_back({{"center", {c.center.real(), c.center.imag()}},
                  {"radius", c.radius},
                  {"min_modulus", c.min_modulus},
                  {"n_vertices", c.n_vertices}});
  return {{"count", clusters.size()},
          {"clusters", cl},
          {"boundary_clearance", std::isfinite(boundary_clearance) ? nlohmann::json(boundary_clearance) : nlohmann::json(nullptr)}};
}

// ---------------------------------------------------------------------------
// minimizer

GLMinimizer::GLMinimizer(const TriMesh& mesh) : mesh_(&mesh), ops_(mesh) {}

namespace {

double cdot(std::span<const cd> a, std::span<const cd> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += dot(a[i], b[i]);
  return s;
}

}  // namespace

GLSolution GLMinimizer::minimize(const P1Field& init, double eps, const GLConfig& config,
                                 const std::function<void(std::size_t, double)>& observer) const {
  if (!(eps > 0)) fail(ErrorCode::InvalidArgument, "eps must be positive");
  const auto& mesh = *mesh_;
  const std::size_t n = mesh.n_vertices();
  if (init.values.size() != n) fail(ErrorCode::InvalidArgument, "initial field does not match the mesh");
  std::vector<char> mask = init.dirichlet_mask;
  if (mask.size() != n) mask = mesh.boundary_mask();

  // preconditioner K_II + M_II / eps^p, one factorization per stage
  std::vector<int> index(n, -1);
  std::vector<int> free;
  for (std::size_t v = 0; v < n; ++v)
    if (!mask[v]) {
      index[v] = static_cast<int>(free.size());
      free.push_back(static_cast<int>(v));
    }
  const auto nf = static_cast<Eigen::Index>(free.size());
  std::vector<Eigen::Triplet<double>> trip;
  const auto& K = ops_.stiffness();
  const auto& mass = ops_.lumped_mass();
  for (Eigen::Index k = 0; k < K.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(K, k); it; ++it) {
      const int r = index[it.row()], c = index[it.col()];
      if (r >= 0 && c >= 0) trip.emplace_back(r, c, it.value());
    }
  for (std::size_t k = 0; k < free.size(); ++k)
    trip.emplace_back(static_cast<int>(k), static_cast<int>(k), mass[free[k]] / std::pow(eps, config.precond_power));
  Eigen::SparseMatrix<double> P(nf, nf);
  P.setFromTriplets(trip.begin(), trip.end());
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
  if (nf > 0) {
    ldlt.compute(P);
    if (ldlt.info() != Eigen::Success) fail(ErrorCode::SolverFailure, "preconditioner factorization failed");
  }
  Eigen::VectorXd br(nf), bi(nf);
  auto precondition = [&](std::span<const cd> g, std::span<cd> z) {
    std::fill(z.begin(), z.end(), cd{0.0});
    if (nf == 0) return;
    for (Eigen::Index k = 0; k < nf; ++k) {
      br[k] = g[free[k]].real();
      bi[k] = g[free[k]].imag();
    }
    const Eigen::VectorXd xr = ldlt.solve(br), xi = ldlt.solve(bi);
    for (Eigen::Index k = 0; k < nf; ++k) z[free[k]] = {xr[k], xi[k]};
  };

  GLSolution sol;
  sol.eps = eps;
  sol.field = P1Field{init.values, mask};
  sol.resolution_warning = mesh.h > eps / 3.0;
  auto& u = sol.field.values;

  std::vector<cd> g(n), z(n), d(n), g_new(n), z_new(n), Kd(n);
  double E = ops_.gl_energy(u, eps).total;
  ops_.gl_gradient(u, eps, mask, g);
  precondition(g, z);
  for (std::size_t i = 0; i < n; ++i) d[i] = -z[i];
  double gz = cdot(g, z);
  std::size_t since_restart = 0;

  std::size_t it = 0;
  for (; it < config.max_iters; ++it) {
    const double gnorm = std::sqrt(cdot(g, g));
    sol.grad_norm = gnorm;
    if (gnorm <= config.grad_tol * (1.0 + std::abs(E))) {
      sol.converged = true;
      break;
    }
    double slope = cdot(g, d);
    if (!(slope < 0.0)) {
      for (std::size_t i = 0; i < n; ++i) d[i] = -z[i];
      slope = -gz;
      since_restart = 0;
    }
    // E(u + alpha d) - E(u) is a quartic in alpha; its coefficients are free of cancellation
    ops_.apply_stiffness(d, Kd);
    double c2 = 0.0, c3 = 0.0, c4 = 0.0;
    const double w_scale = 1.0 / (4.0 * eps * eps);
    for (std::size_t i = 0; i < n; ++i) {
      if (mask[i]) continue;
      const double w = mass[i] * w_scale;
      const double a0 = 1.0 - std::norm(u[i]), p = 2.0 * dot(u[i], d[i]), q = std::norm(d[i]);
      c2 += 0.5 * dot(Kd[i], d[i]) + w * (p * p - 2.0 * a0 * q);
      c3 += w * 2.0 * p * q;
      c4 += w * q * q;
    }
    const double c1 = slope;
    auto dphi = [&](double x) { return c1 + x * (2.0 * c2 + x * (3.0 * c3 + 4.0 * c4 * x)); };
    auto phi = [&](double x) { return x * (c1 + x * (c2 + x * (c3 + c4 * x))); };
    // bracket the first minimizer along d, then bisect on the derivative
    double hi = c2 > 0 ? -c1 / (2.0 * c2) : 1.0;
    hi = std::max(hi, 1e-12);
    int guard_iters = 0;
    while (dphi(hi) < 0.0 && guard_iters++ < 200) hi *= 2.0;
    double lo = 0.0;
    for (int k = 0; k < 200 && hi - lo > 1e-15 * hi; ++k) {
      const double mid = 0.5 * (lo + hi);
      (dphi(mid) < 0.0 ? lo : hi) = mid;
    }
    double alpha = 0.5 * (lo + hi);
    int backtracks = 0;
    while (phi(alpha) > config.armijo_c1 * alpha * c1 && backtracks++ < 60) alpha *= config.armijo_shrink;
    const double decrease = phi(alpha);
    if (!(decrease < 0.0)) {
      if (since_restart == 0) break;  // stationary to rounding
      for (std::size_t i = 0; i < n; ++i) d[i] = -z[i];
      since_restart = 0;
      --it;
      continue;
    }
    for (std::size_t i = 0; i < n; ++i) u[i] += alpha * d[i];
    const double E_new = ops_.gl_energy(u, eps).total;
    // the exact decrease is negative; the recomputed energy may only differ by rounding
    if (E_new > E + 1e-12 * (1.0 + std::abs(E))) fail(ErrorCode::NonMonotone, "energy increased along an accepted step");
    E = E_new;
    if (observer) observer(it, E);
    ops_.gl_gradient(u, eps, mask, g_new);
    precondition(g_new, z_new);
    const double gz_new = cdot(g_new, z_new);
    double beta = 0.0;
    ++since_restart;
    if (since_restart < config.restart_every && gz > 0) {
      double num = 0.0;
      for (std::size_t i = 0; i < n; ++i) num += dot(z_new[i], g_new[i] - g[i]);
      beta = std::max(0.0, num / gz);
    } else {
      since_restart = 0;
    }
    for (std::size_t i = 0; i < n; ++i) d[i] = -z_new[i] + beta * d[i];
    g.swap(g_new);
    z.swap(z_new);
    gz = gz_new;
  }
  sol.iterations = it;
  if (!sol.converged) sol.converged = sol.grad_norm <= config.grad_tol * (1.0 + std::abs(E));
  sol.energy = ops_.gl_energy(u, eps);
  return sol;
}

GLSolution minimize(const TriMesh& mesh, double eps, const GLConfig& config, const P1Field& init) {
  return GLMinimizer(mesh).minimize(init, eps, config);
}

// ---------------------------------------------------------------------------
// initial fields

std::vector<cd> impose_boundary(const TriMesh& mesh, const std::function<cd(double)>& g) {
  std::vector<cd> out(mesh.boundary_loop.size());
  for (std::size_t k = 0; k < out.size(); ++k) {
    const double t = k < mesh.boundary_param.size() ? mesh.boundary_param[k] : static_cast<double>(k) / out.size();
    const cd v = g(t);
    out[k] = v / std::abs(v);
  }
  return out;
}

P1Field harmonic_initial_field(const FemOperators& ops, std::span<const cd> bvals) {
  auto v = ops.solve_laplace(bvals);
  for (auto& x : v) {
    const double r = std::abs(x);
    x = r > 0.5 ? x / r : 2.0 * x;
  }
  const auto& mesh = ops.mesh();
  for (std::size_t k = 0; k < bvals.size(); ++k) v[mesh.boundary_loop[k]] = bvals[k];
  return make_field(mesh, std::move(v));
}

P1Field seeded_initial_field(const TriMesh& mesh, std::span<const cd> bvals, const std::function<cd(cd)>& seed, cd a,
                             double eps) {
  std::vector<cd> v(mesh.n_vertices());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const cd x = mesh.vertices[i];
    const double r = std::abs(x - a);
    v[i] = r > 0 ? seed(x) * std::min(r / eps, 1.0) : cd{0.0};
  }
  for (std::size_t k = 0; k < bvals.size(); ++k) v[mesh.boundary_loop[k]] = bvals[k];
  return make_field(mesh, std::move(v));
}

// ---------------------------------------------------------------------------
// continuation

ContinuationResult continuation(const TriMesh& mesh, std::span<const cd> bvals, const GLConfig& config,
                                const std::function<cd(cd)>& seed) {
  config.validate();
  GLMinimizer solver(mesh);
  ContinuationResult out;
  P1Field current;
  for (std::size_t k = 0; k < config.eps_schedule.size(); ++k) {
    const double eps = config.eps_schedule[k];
    if (k == 0) {
      if (config.init == InitKind::canonical_seed && seed)
        current = seeded_initial_field(mesh, bvals, seed, config.seed_center, eps);
      else
        current = harmonic_initial_field(solver.operators(), bvals);
    }
    auto sol = solver.minimize(current, eps, config);
    current = sol.field;
    auto rep = bad_disks(mesh, sol, config.eta0);
    std::vector<cd> centers;
    for (const auto& c : rep.clusters) centers.push_back(c.center);
    out.vortex_path.push_back(std::move(centers));
    out.reports.push_back(std::move(rep));
    out.stages.push_back(std::move(sol));
  }
  return out;
}

// ---------------------------------------------------------------------------
// diagnostics

BadDiskReport bad_disks(const TriMesh& mesh, std::span<const cd> u, double eps, double eta0) {
  std::vector<double> mass(mesh.n_vertices(), 0.0);
  for (std::size_t t = 0; t < mesh.n_triangles(); ++t)
    for (int v : mesh.triangles[t]) mass[v] += mesh.triangle_area(t) / 3.0;

  std::vector<int> low;
  for (std::size_t v = 0; v < u.size(); ++v)
    if (std::abs(u[v]) <= 0.5) low.push_back(static_cast<int>(v));
  std::stable_sort(low.begin(), low.end(), [&](int a, int b) { return std::abs(u[a]) < std::abs(u[b]); });

  const double r0 = eta0 * eps;
  std::vector<int> chosen;
  for (int v : low) {
    bool disjoint = true;
    for (int c : chosen)
      if (std::abs(mesh.vertices[v] - mesh.vertices[c]) < 2.0 * r0) {
        disjoint = false;
        break;
      }
    if (disjoint) chosen.push_back(v);
  }
  // group disks whose doubled disks overlap
  std::vector<int> parent(chosen.size());
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t a = 0; a < chosen.size(); ++a)
    for (std::size_t b = a + 1; b < chosen.size(); ++b)
      if (std::abs(mesh.vertices[chosen[a]] - mesh.vertices[chosen[b]]) < 4.0 * r0) {
        const int ra = find(static_cast<int>(a)), rb = find(static_cast<int>(b));
        if (ra != rb) parent[std::max(ra, rb)] = std::min(ra, rb);
      }
  std::vector<int> group_of(chosen.size());
  std::vector<int> roots;
  for (std::size_t a = 0; a < chosen.size(); ++a) {
    const int r = find(static_cast<int>(a));
    auto it = std::find(roots.begin(), roots.end(), r);
    if (it == roots.end()) {
      group_of[a] = static_cast<int>(roots.size());
      roots.push_back(r);
    } else {
      group_of[a] = static_cast<int>(it - roots.begin());
    }
  }
  std::vector<cd> wsum(roots.size(), 0.0);
  std::vector<double> wtot(roots.size(), 0.0), minmod(roots.size(), 1.0);
  std::vector<std::size_t> count(roots.size(), 0);
  for (int v : low) {
    std::size_t best = 0;
    double bd = 1e300;
    for (std::size_t a = 0; a < chosen.size(); ++a) {
      const double d = std::abs(mesh.vertices[v] - mesh.vertices[chosen[a]]);
      if (d < bd) {
        bd = d;
        best = a;
      }
    }
    const int gidx = group_of[best];
    const double w = (0.5 - std::abs(u[v])) * mass[v] + 1e-300;
    wsum[gidx] += w * mesh.vertices[v];
    wtot[gidx] += w;
    minmod[gidx] = std::min(minmod[gidx], std::abs(u[v]));
    ++count[gidx];
  }
  BadDiskReport rep;
  const auto poly = mesh.boundary_polyline();
  for (std::size_t gidx = 0; gidx < roots.size(); ++gidx) {
    Cluster c;
    c.center = wsum[gidx] / wtot[gidx];
    c.radius = 5.0 * r0;
    c.min_modulus = minmod[gidx];
    c.n_vertices = count[gidx];
    rep.boundary_clearance = std::min(rep.boundary_clearance, polyline_distance(poly, c.center) / eps);
    rep.clusters.push_back(c);
  }
  return rep;
}

BadDiskReport bad_disks(const TriMesh& mesh, const GLSolution& s, double eta0) {
  return bad_disks(mesh, s.field.values, s.eps, eta0);
}

ClearanceCheck boundary_clearance_check(const BadDiskReport& report, double eps, double eta0) {
  (void)eps;
  ClearanceCheck out;
  out.margin = report.boundary_clearance;
  out.pass = !(report.boundary_clearance <= eta0);
  return out;
}

double energy_quantum(const TriMesh& mesh, const GLSolution& s, cd center, double r) {
  double acc = 0.0;
  std::vector<double> mass(mesh.n_vertices(), 0.0);
  for (std::size_t t = 0; t < mesh.n_triangles(); ++t)
    for (int v : mesh.triangles[t]) mass[v] += mesh.triangle_area(t) / 3.0;
  for (std::size_t v = 0; v < mesh.n_vertices(); ++v) {
    if (std::abs(mesh.vertices[v] - center) > r) continue;
    const double d = 1.0 - std::norm(s.field.values[v]);
    acc += mass[v] * d * d;
  }
  return acc / (4.0 * s.eps * s.eps);
}

double max_modulus_check(const GLSolution& s) {
  double m = 0.0;
  for (cd v : s.field.values) m = std::max(m, std::abs(v));
  return m;
}

GapReport log_energy_gap(std::span<const GLSolution> sols, double band) {
  if (sols.size() < 2) fail(ErrorCode::InvalidArgument, "need at least two solutions");
  GapReport rep;
  for (const auto& s : sols) {
    rep.eps.push_back(s.eps);
    rep.gaps.push_back(s.energy.total - pi * std::abs(std::log(s.eps)));
    rep.potentials.push_back(s.energy.potential);
  }
  const auto [gmin, gmax] = std::minmax_element(rep.gaps.begin(), rep.gaps.end());
  rep.gap_spread = *gmax - *gmin;
  const auto [pmin, pmax] = std::minmax_element(rep.potentials.begin(), rep.potentials.end());
  rep.potential_ratio = *pmin > 0 ? *pmax / *pmin : std::numeric_limits<double>::infinity();
  rep.bounded = rep.gap_spread <= band;
  return rep;
}

double el_residual(const FemOperators& ops, const GLSolution& s) {
  const auto& u = s.field.values;
  std::vector<cd> g(u.size());
  ops.gl_gradient(u, s.eps, s.field.dirichlet_mask, g);
  const auto& m = ops.lumped_mass();
  double acc = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) acc += std::norm(g[i]) / m[i];
  return std::sqrt(acc) / (1.0 + std::abs(ops.gl_energy(u, s.eps).total));
}

double el_residual(const TriMesh& mesh, const GLSolution& s) { return el_residual(FemOperators(mesh), s); }

}  // namespace gluni
