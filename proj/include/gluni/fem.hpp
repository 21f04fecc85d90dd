#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Sparse>
#include <json.hpp>

#include "gluni/mesh.hpp"
#include "gluni/types.hpp"

namespace gluni {

struct P1Field {
  std::vector<cd> values;
  std::vector<char> dirichlet_mask;

  [[nodiscard]] std::size_t size() const { return values.size(); }
  [[nodiscard]] nlohmann::json to_json() const;
  [[nodiscard]] static P1Field from_json(const nlohmann::json& j);
};

struct GLEnergy {
  double total = 0.0;
  double dirichlet = 0.0;
  double potential = 0.0;
};

// Assembled P1 operators on a fixed mesh.
class FemOperators {
 public:
  explicit FemOperators(const TriMesh& mesh);

  [[nodiscard]] const TriMesh& mesh() const { return *mesh_; }
  [[nodiscard]] const Eigen::SparseMatrix<double>& stiffness() const { return K_; }
  [[nodiscard]] const std::vector<double>& lumped_mass() const { return mass_; }
  // gradient of the k-th barycentric basis function on triangle t, as (d/dx + i d/dy)
  [[nodiscard]] cd basis_gradient(std::size_t t, int k) const { return grad_[3 * t + k]; }
  // (du/dx, du/dy) of a complex P1 field on triangle t
  [[nodiscard]] std::pair<cd, cd> field_gradient(std::size_t t, std::span<const cd> u) const;
  // gradient of a real P1 field as a complex number
  [[nodiscard]] cd scalar_gradient(std::size_t t, std::span<const double> u) const;

  [[nodiscard]] double dirichlet_energy(std::span<const cd> u) const;
  [[nodiscard]] double potential_energy(std::span<const cd> u, double eps) const;
  [[nodiscard]] GLEnergy gl_energy(std::span<const cd> u, double eps) const;
  void apply_stiffness(std::span<const cd> u, std::span<cd> out) const;
  // dE/d(Re u) + i dE/d(Im u), zero where mask is set
  void gl_gradient(std::span<const cd> u, double eps, std::span<const char> mask, std::span<cd> out) const;

  // Harmonic extension of boundary values (indexed like mesh.boundary_loop).
  [[nodiscard]] std::vector<cd> solve_laplace(std::span<const cd> boundary_values) const;
  [[nodiscard]] std::vector<double> solve_laplace_real(std::span<const double> boundary_values) const;

 private:
  const TriMesh* mesh_;
  Eigen::SparseMatrix<double> K_;
  std::vector<double> mass_;
  std::vector<cd> grad_;
  std::vector<double> area_;
};

[[nodiscard]] double dirichlet_energy(const TriMesh& mesh, const P1Field& field);
[[nodiscard]] GLEnergy gl_energy(const TriMesh& mesh, const P1Field& field, double eps);
[[nodiscard]] P1Field gl_gradient(const TriMesh& mesh, const P1Field& field, double eps);
[[nodiscard]] P1Field solve_laplace_dirichlet(const TriMesh& mesh, std::span<const cd> boundary_values);

struct GreenResult {
  std::vector<double> green;    // G = ln|x-a| + h at vertices
  std::vector<double> regular;  // h
  double mass = 0.0;            // h(a)
  cd pole;
};
[[nodiscard]] GreenResult green_dirichlet_fem(const TriMesh& mesh, cd a);
[[nodiscard]] GreenResult green_dirichlet_fem(const FemOperators& ops, cd a);

// Field with the mesh boundary mask and given values.
[[nodiscard]] P1Field make_field(const TriMesh& mesh, std::vector<cd> values);

}  // namespace gluni
