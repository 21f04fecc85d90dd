#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "gluni/fem.hpp"
#include "gluni/mesh.hpp"
#include "gluni/types.hpp"

namespace gluni {

enum class InitKind { harmonic_extension, prior_solution, canonical_seed };

struct GLConfig {
  std::vector<double> eps_schedule{0.2, 0.1, 0.05};
  std::size_t max_iters = 5000;
  double grad_tol = 1e-8;         // relative to 1 + |E|
  double armijo_c1 = 1e-4;
  double armijo_shrink = 0.5;
  std::size_t restart_every = 50;
  double precond_power = 2.0;     // preconditioner K + M / eps^p
  InitKind init = InitKind::harmonic_extension;
  cd seed_center{0.0, 0.0};       // for canonical_seed
  double eta0 = 1.0;
  std::size_t j0 = 4;
  double gap_band = 2.0;

  void validate() const;
  [[nodiscard]] nlohmann::json to_json() const;
};

struct GLSolution {
  P1Field field;
  double eps = 0.0;
  GLEnergy energy;
  std::size_t iterations = 0;
  bool converged = false;
  double grad_norm = 0.0;
  bool resolution_warning = false;  // h > eps / 3
};

struct Cluster {
  cd center;
  double radius = 0.0;  // cover radius 5 eta0 eps
  double min_modulus = 1.0;
  std::size_t n_vertices = 0;
};

struct BadDiskReport {
  std::vector<Cluster> clusters;
  double boundary_clearance = std::numeric_limits<double>::infinity();  // min dist(center, boundary)/eps
  [[nodiscard]] std::size_t count() const { return clusters.size(); }
  [[nodiscard]] nlohmann::json to_json() const;
};

// Minimizer bound to one mesh; reuses the assembled operators across stages.
class GLMinimizer {
 public:
  explicit GLMinimizer(const TriMesh& mesh);
  [[nodiscard]] const FemOperators& operators() const { return ops_; }
  [[nodiscard]] const TriMesh& mesh() const { return *mesh_; }

  // Dirichlet values are taken from init at masked vertices and never modified.
  // Optional observer receives the energy after every accepted step.
  [[nodiscard]] GLSolution minimize(const P1Field& init, double eps, const GLConfig& config,
                                    const std::function<void(std::size_t, double)>& observer = {}) const;

 private:
  const TriMesh* mesh_;
  FemOperators ops_;
};

[[nodiscard]] GLSolution minimize(const TriMesh& mesh, double eps, const GLConfig& config, const P1Field& init);

// Boundary values of g at the mesh boundary loop (projected to S^1).
[[nodiscard]] std::vector<cd> impose_boundary(const TriMesh& mesh, const std::function<cd(double)>& g);

// Harmonic extension renormalized away from its zero set: v/|v| for |v| > 1/2, else 2v.
[[nodiscard]] P1Field harmonic_initial_field(const FemOperators& ops, std::span<const cd> boundary_values);
// seed(x) * min(|x - a| / eps, 1) at interior vertices, boundary values at the boundary.
[[nodiscard]] P1Field seeded_initial_field(const TriMesh& mesh, std::span<const cd> boundary_values,
                                           const std::function<cd(cd)>& seed, cd a, double eps);

struct ContinuationResult {
  std::vector<GLSolution> stages;
  std::vector<BadDiskReport> reports;
  std::vector<std::vector<cd>> vortex_path;  // cluster centers per stage
};

[[nodiscard]] ContinuationResult continuation(const TriMesh& mesh, std::span<const cd> boundary_values,
                                              const GLConfig& config,
                                              const std::function<cd(cd)>& seed = {});

[[nodiscard]] BadDiskReport bad_disks(const TriMesh& mesh, std::span<const cd> u, double eps, double eta0 = 1.0);
[[nodiscard]] BadDiskReport bad_disks(const TriMesh& mesh, const GLSolution& s, double eta0 = 1.0);

struct ClearanceCheck {
  bool pass = true;
  double margin = std::numeric_limits<double>::infinity();
};
[[nodiscard]] ClearanceCheck boundary_clearance_check(const BadDiskReport& report, double eps, double eta0 = 1.0);

[[nodiscard]] double energy_quantum(const TriMesh& mesh, const GLSolution& s, cd center, double r);
[[nodiscard]] double max_modulus_check(const GLSolution& s);

struct GapReport {
  std::vector<double> eps;
  std::vector<double> gaps;        // E - pi |ln eps|
  std::vector<double> potentials;  // potential part
  double gap_spread = 0.0;
  double potential_ratio = 0.0;    // max/min
  bool bounded = true;             // spread <= band
};
[[nodiscard]] GapReport log_energy_gap(std::span<const GLSolution> solutions, double band = 2.0);

// sqrt(sum |g_i|^2 / m_i) / (1 + |E|) over interior vertices
[[nodiscard]] double el_residual(const FemOperators& ops, const GLSolution& s);
[[nodiscard]] double el_residual(const TriMesh& mesh, const GLSolution& s);

}  // namespace gluni
