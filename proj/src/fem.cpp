#include "gluni/fem.hpp"

#include <cmath>

#include <Eigen/IterativeLinearSolvers>

#include "gluni/error.hpp"

namespace gluni {

nlohmann::json P1Field::to_json() const {
  nlohmann::json v = nlohmann::json::array();
  for (cd x : values) v.push_back({x.real(), x.imag()});
  std::vector<int> m(dirichlet_mask.begin(), dirichlet_mask.end());
  return {{"values", v}, {"dirichlet_mask", m}};
}

P1Field P1Field::from_json(const nlohmann::json& j) {
  P1Field f;
  for (const auto& p : j.at("values")) f.values.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
  if (j.contains("dirichlet_mask"))
    for (int m : j.at("dirichlet_mask").get<std::vector<int>>()) f.dirichlet_mask.push_back(static_cast<char>(m));
  else
    f.dirichlet_mask.assign(f.values.size(), 0);
  return f;
}

FemOperators::FemOperators(const TriMesh& mesh) : mesh_(&mesh) {
  const std::size_t nv = mesh.n_vertices(), nt = mesh.n_triangles();
  mass_.assign(nv, 0.0);
  grad_.resize(3 * nt);
  area_.resize(nt);
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(9 * nt);
  for (std::size_t t = 0; t < nt; ++t) {
    const auto& tr = mesh.triangles[t];
    const cd p[3] = {mesh.vertices[tr[0]], mesh.vertices[tr[1]], mesh.vertices[tr[2]]};
    const double A = 0.5 * wedge(p[1] - p[0], p[2] - p[0]);
    area_[t] = A;
    for (int k = 0; k < 3; ++k) {
      // opposite edge turned toward the vertex, scaled by 1/height
      grad_[3 * t + k] = I * (p[(k + 2) % 3] - p[(k + 1) % 3]) / (2.0 * A);
      mass_[tr[k]] += A / 3.0;
    }
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) trip.emplace_back(tr[i], tr[j], A * dot(grad_[3 * t + i], grad_[3 * t + j]));
  }
  K_.resize(static_cast<Eigen::Index>(nv), static_cast<Eigen::Index>(nv));
  K_.setFromTriplets(trip.begin(), trip.end());
}

std::pair<cd, cd> FemOperators::field_gradient(std::size_t t, std::span<const cd> u) const {
  const auto& tr = mesh_->triangles[t];
  cd ux = 0.0, uy = 0.0;
  for (int k = 0; k < 3; ++k) {
    const cd g = grad_[3 * t + k];
    ux += u[tr[k]] * g.real();
    uy += u[tr[k]] * g.imag();
  }
  return {ux, uy};
}

cd FemOperators::scalar_gradient(std::size_t t, std::span<const double> u) const {
  const auto& tr = mesh_->triangles[t];
  cd g = 0.0;
  for (int k = 0; k < 3; ++k) g += u[tr[k]] * grad_[3 * t + k];
  return g;
}

double FemOperators::dirichlet_energy(std::span<const cd> u) const {
  double e = 0.0;
  for (std::size_t t = 0; t < area_.size(); ++t) {
    const auto [ux, uy] = field_gradient(t, u);
    e += area_[t] * (std::norm(ux) + std::norm(uy));
  }
  return 0.5 * e;
}

double FemOperators::potential_energy(std::span<const cd> u, double eps) const {
  double e = 0.0;
  for (std::size_t i = 0; i < mass_.size(); ++i) {
    const double d = 1.0 - std::norm(u[i]);
    e += mass_[i] * d * d;
  }
  return e / (4.0 * eps * eps);
}

GLEnergy FemOperators::gl_energy(std::span<const cd> u, double eps) const {
  GLEnergy out;
  out.dirichlet = dirichlet_energy(u);
  out.potential = potential_energy(u, eps);
  out.total = out.dirichlet + out.potential;
  return out;
}

void FemOperators::apply_stiffness(std::span<const cd> u, std::span<cd> out) const {
  std::fill(out.begin(), out.end(), cd{0.0});
  for (Eigen::Index k = 0; k < K_.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(K_, k); it; ++it) out[it.row()] += it.value() * u[it.col()];
}

void FemOperators::gl_gradient(std::span<const cd> u, double eps, std::span<const char> mask, std::span<cd> out) const {
  apply_stiffness(u, out);
  const double inv = 1.0 / (eps * eps);
  for (std::size_t i = 0; i < mass_.size(); ++i) {
    if (!mask.empty() && mask[i]) {
      out[i] = 0.0;
      continue;
    }
    out[i] -= mass_[i] * (1.0 - std::norm(u[i])) * u[i] * inv;
  }
}

namespace {

struct InteriorSystem {
  std::vector<int> index;  // vertex -> unknown or -1
  std::vector<int> interior;
  Eigen::SparseMatrix<double> A;
};

InteriorSystem interior_system(const TriMesh& mesh, const Eigen::SparseMatrix<double>& K) {
  InteriorSystem s;
  const auto mask = mesh.boundary_mask();
  s.index.assign(mesh.n_vertices(), -1);
  for (std::size_t v = 0; v < mesh.n_vertices(); ++v)
    if (!mask[v]) {
      s.index[v] = static_cast<int>(s.interior.size());
      s.interior.push_back(static_cast<int>(v));
    }
  std::vector<Eigen::Triplet<double>> trip;
  for (Eigen::Index k = 0; k < K.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(K, k); it; ++it) {
      const int r = s.index[it.row()], c = s.index[it.col()];
      if (r >= 0 && c >= 0) trip.emplace_back(r, c, it.value());
    }
  const auto n = static_cast<Eigen::Index>(s.interior.size());
  s.A.resize(n, n);
  s.A.setFromTriplets(trip.begin(), trip.end());
  return s;
}

Eigen::VectorXd cg_solve(const Eigen::SparseMatrix<double>& A, const Eigen::VectorXd& b) {
  if (b.size() == 0) return b;
  Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper, Eigen::IncompleteCholesky<double>> cg;
  cg.setTolerance(1e-13);
  cg.setMaxIterations(20 * static_cast<Eigen::Index>(A.rows()) + 100);
  cg.compute(A);
  if (cg.info() != Eigen::Success) fail(ErrorCode::SolverFailure, "preconditioner setup failed");
  Eigen::VectorXd x = cg.solve(b);
  if (b.norm() > 0 && cg.error() > 1e-10)
    fail(ErrorCode::SolverFailure, "CG stopped at relative residual " + std::to_string(cg.error()));
  return x;
}

}  // namespace

std::vector<double> FemOperators::solve_laplace_real(std::span<const double> bvals) const {
  const auto& mesh = *mesh_;
  if (bvals.size() != mesh.boundary_loop.size())
    fail(ErrorCode::InvalidArgument, "boundary values must match the boundary loop");
  std::vector<double> u(mesh.n_vertices(), 0.0);
  for (std::size_t k = 0; k < bvals.size(); ++k) u[mesh.boundary_loop[k]] = bvals[k];
  const auto sys = interior_system(mesh, K_);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(sys.interior.size()));
  for (Eigen::Index k = 0; k < K_.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(K_, k); it; ++it) {
      const int r = sys.index[it.row()];
      if (r >= 0 && sys.index[it.col()] < 0) rhs[r] -= it.value() * u[it.col()];
    }
  const Eigen::VectorXd x = cg_solve(sys.A, rhs);
  for (std::size_t k = 0; k < sys.interior.size(); ++k) u[sys.interior[k]] = x[static_cast<Eigen::Index>(k)];
  return u;
}

std::vector<cd> FemOperators::solve_laplace(std::span<const cd> bvals) const {
  std::vector<double> re(bvals.size()), im(bvals.size());
  for (std::size_t k = 0; k < bvals.size(); ++k) {
    re[k] = bvals[k].real();
    im[k] = bvals[k].imag();
  }
  const auto ur = solve_laplace_real(re), ui = solve_laplace_real(im);
  std::vector<cd> out(ur.size());
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = {ur[k], ui[k]};
  return out;
}

double dirichlet_energy(const TriMesh& mesh, const P1Field& field) {
  return FemOperators(mesh).dirichlet_energy(field.values);
}

GLEnergy gl_energy(const TriMesh& mesh, const P1Field& field, double eps) {
  return FemOperators(mesh).gl_energy(field.values, eps);
}

P1Field gl_gradient(const TriMesh& mesh, const P1Field& field, double eps) {
  P1Field out{std::vector<cd>(field.size()), field.dirichlet_mask};
  FemOperators(mesh).gl_gradient(field.values, eps, field.dirichlet_mask, out.values);
  return out;
}

P1Field solve_laplace_dirichlet(const TriMesh& mesh, std::span<const cd> boundary_values) {
  return make_field(mesh, FemOperators(mesh).solve_laplace(boundary_values));
}

P1Field make_field(const TriMesh& mesh, std::vector<cd> values) {
  return {std::move(values), mesh.boundary_mask()};
}

GreenResult green_dirichlet_fem(const FemOperators& ops, cd a) {
  const auto& mesh = ops.mesh();
  const double d = mesh.boundary_distance(a);
  const MeshLocator loc(mesh);
  if (!loc.locate(a)) fail(ErrorCode::TooCloseToBoundary, "pole lies outside the mesh");
  if (d <= 2.0 * mesh.h) fail(ErrorCode::TooCloseToBoundary, "pole within 2h of the boundary");
  std::vector<double> bv(mesh.boundary_loop.size());
  for (std::size_t k = 0; k < bv.size(); ++k) bv[k] = -std::log(std::abs(mesh.vertices[mesh.boundary_loop[k]] - a));
  GreenResult out;
  out.pole = a;
  out.regular = ops.solve_laplace_real(bv);
  out.green.resize(mesh.n_vertices());
  for (std::size_t v = 0; v < mesh.n_vertices(); ++v)
    out.green[v] = std::log(std::max(std::abs(mesh.vertices[v] - a), 1e-300)) + out.regular[v];
  out.mass = loc.interpolate(std::span<const double>(out.regular), a);
  return out;
}

GreenResult green_dirichlet_fem(const TriMesh& mesh, cd a) { return green_dirichlet_fem(FemOperators(mesh), a); }

}  // namespace gluni
