#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "gluni/conformal.hpp"
#include "gluni/gl_solver.hpp"
#include "gluni/mesh.hpp"
#include "gluni/renorm.hpp"
#include "gluni/types.hpp"

namespace gluni {

enum class FrameSource { conformal, gl };
[[nodiscard]] std::string to_string(FrameSource s);

// Orthonormal frame (v, u) with v = -i u, and the potential Phi = mu + G.
struct FrameField {
  FrameSource source = FrameSource::conformal;
  cd a;
  std::function<cd(cd)> u;
  std::function<double(cd)> phi;
  // e^Phi v and e^Phi u; derived from u and phi when left empty
  std::function<cd(cd)> x_s, x_theta;
  // polar chart (r, theta) -> point, r in (0, 1), centered at a
  std::function<cd(double, double)> chart;
  std::vector<cd> boundary;  // counterclockwise samples of the boundary
  double core_radius = 0.0;  // flows stop before reaching this distance from a
  double green_coefficient = 1.0;
  std::optional<ConformalMap> map;

  [[nodiscard]] cd v(cd x) const { return -I * u(x); }
  [[nodiscard]] cd velocity_s(cd x) const;
  [[nodiscard]] cd velocity_theta(cd x) const;
};

// f(0) = a; u = f_theta/|f_theta|, v = f_r/|f_r|, Phi = ln|z f'(z)| at z = f^{-1}(x).
[[nodiscard]] FrameField frame_from_conformal(const ConformalMap& f);

struct GLFrameInfo {
  MuMesh mu;
  double min_modulus_outside_core = 1.0;
  int degree = 1;
};
// u_eps/|u_eps| after one Jacobi pass; Phi = mu + G from the mesh least-squares decomposition.
[[nodiscard]] FrameField frame_from_gl(const TriMesh& mesh, const GLSolution& solution, cd a,
                                       GLFrameInfo* info = nullptr, double core_factor = 3.0);

struct CartanReport {
  double max_residual = 0.0;  // max |*omega - dPhi| on the grid
  double loop_error = 0.0;    // loop integral of omega around a minus 2 pi deg
  double loop_integral = 0.0;
  std::size_t n_r = 0, n_theta = 0;
  [[nodiscard]] nlohmann::json to_json() const;
};
[[nodiscard]] CartanReport cartan_identity_check(const FrameField& frame, std::size_t n_r = 128,
                                                 std::size_t n_theta = 256, double r_min = 0.05,
                                                 double r_max = 0.95);

struct FlowOptions {
  double sigma_min = -3.0;       // inward extent in units where the period is 2 pi
  std::size_t n_s = 64;
  std::size_t n_theta = 128;
  double step_tol = 1e-10;       // local RK4 error per step
  double tolerance = 1e-4;       // closure acceptance
  double return_tol = 1e-6;
  std::size_t max_steps = 200000;
};

struct FlowResult {
  std::vector<double> s;      // s[0] = 0 at the boundary, decreasing
  std::vector<double> theta;  // j rho / n_theta
  std::vector<std::vector<cd>> psi;     // psi[k][j] = psi(s[k], theta[j])
  std::vector<std::vector<cd>> psi_s;   // d psi / ds on the grid
  double rho = 0.0;
  double return_error = 0.0;
  double closure_error = 0.0;
  double commutator_error = 0.0;
  double tolerance = 1e-4;
  bool accepted = false;
  cd anchor;
  cd a;
  [[nodiscard]] nlohmann::json to_json() const;
};
[[nodiscard]] FlowResult integrate_flow(const FrameField& frame, const FlowOptions& options = {});

struct Reconstruction {
  ConformalMap map;
  std::vector<cd> coefficients;  // gauge fixed Taylor coefficients
  double cr_residual = 0.0;
  double fit_residual = 0.0;     // relative size of negative-frequency content
  [[nodiscard]] nlohmann::json to_json() const;
};
// f(r e^{i theta}) = psi((rho/2 pi) ln r, (rho/2 pi) theta), fitted on circles r in {0.3, ..., 0.9}.
[[nodiscard]] Reconstruction reconstruct_map(const FlowResult& flow, std::size_t n_coefficients = 24,
                                             double cr_tol = 1e-3);

// Boundary relation r d_r mu~ = <d_theta u~, i u~> - 1 checked on the circle of radius r.
[[nodiscard]] double liouville_residual(const FrameField& frame, const ConformalMap& f, double r = 0.99,
                                        std::size_t n_theta = 256);

}  // namespace gluni
