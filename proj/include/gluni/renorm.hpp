#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include <json.hpp>

#include "gluni/conformal.hpp"
#include "gluni/curves.hpp"
#include "gluni/disk_analysis.hpp"
#include "gluni/fem.hpp"
#include "gluni/mesh.hpp"

namespace gluni {

// Domain f0(D), data g over the parameter t of f0(e^{2 pi i t}), singularity a.
struct CanonicalMapSpec {
  ConformalMap f0;
  BoundaryData data;
  cd a;
  ConformalMap f;            // rebased at f0^{-1}(a): f(0) = a, f'(0) > 0
  DiskAutomorphism to_base;  // z -> f0^{-1}(f(z))
  FourierBoundary pulled;    // g o f on the unit circle
  PhiTilde phi;
};

[[nodiscard]] CanonicalMapSpec make_canonical_spec(const ConformalMap& f0, const BoundaryData& data, cd a,
                                                   int n_modes = 128);

// Degree-one canonical harmonic map, u o f = C (z/|z|) exp(i Im F).
class CanonicalHarmonicMap {
 public:
  explicit CanonicalHarmonicMap(CanonicalMapSpec spec);

  [[nodiscard]] cd operator()(cd x) const;  // on the domain, through f^{-1}
  [[nodiscard]] cd on_disk(cd z) const;
  [[nodiscard]] const CanonicalMapSpec& spec() const { return spec_; }
  [[nodiscard]] double trace_error() const { return trace_error_; }  // L2 mismatch with g o f on S^1
  [[nodiscard]] int degree_around_pole(double radius = 0.05, std::size_t n = 512) const;

 private:
  CanonicalMapSpec spec_;
  cd anchor_;
  double trace_error_ = 0.0;
};

[[nodiscard]] CanonicalHarmonicMap canonical_harmonic_map(const CanonicalMapSpec& spec);

struct DirectEnergyRow {
  double delta = 0.0;
  double truncated = 0.0;  // integral of |grad u|^2 outside D_delta(a)
  double W = 0.0;          // truncated - 2 pi ln(1/delta)
};

struct DirectEnergy {
  double W = 0.0;  // extrapolated to delta = 0
  std::vector<DirectEnergyRow> table;
};

[[nodiscard]] DirectEnergy renormalized_energy_direct(const CanonicalMapSpec& spec,
                                                      std::span<const double> deltas = {},
                                                      std::size_t n_theta = 256);
[[nodiscard]] double renormalized_energy_formula(const CanonicalMapSpec& spec);
// wp(f) + 2 pi ln|f'(0)| for f rebased at f0^{-1}(a)
[[nodiscard]] double renormalized_energy_formula(const ConformalMap& f0, cd a);

struct OptimalVortex {
  cd omega;
  cd a;
  double value = 0.0;
};
// argmax of |f0'(w)| (1 - |w|^2) over the disk
[[nodiscard]] OptimalVortex optimal_vortex(const ConformalMap& f0, std::size_t grid = 101);

struct GreenMassCheck {
  double spectral = 0.0;
  double fem = 0.0;
  double diff = 0.0;
};
[[nodiscard]] GreenMassCheck green_mass_consistency(const ConformalMap& f0, cd a, const TriMesh& mesh);

// Spectral route on the disk side: takes u o f with f(0) = a, returns mu o f.
struct MuSpectral {
  std::vector<double> radii;
  std::size_t n_theta = 0;
  std::vector<std::vector<double>> mu;  // mu[k][j] at radii[k] e^{2 pi i j / n_theta}, mu = 0 at the anchor
  double harmonic_residual = 0.0;       // max |Laplacian| / max |grad mu| over interior rings
  double loop_residual = 0.0;           // max |loop integral of *omega - dG|
  double dirichlet_energy = 0.0;        // integral of |grad mu|^2 over the disk
  [[nodiscard]] double at(std::size_t k, std::size_t j) const { return mu[k][j]; }
};
[[nodiscard]] MuSpectral mu_decomposition(const std::function<cd(cd)>& u_pullback,
                                          std::span<const double> radii = {}, std::size_t n_theta = 256,
                                          double loop_tol = 1e-4);

// Mesh route: least-squares mu from per-triangle *omega - dG outside D_{exclude}(a).
struct MuMesh {
  std::vector<double> mu;       // at vertices
  std::vector<cd> target;       // per triangle *omega - dG
  GreenResult green;
  double closedness_residual = 0.0;  // |target - grad mu|_L2 / |target|_L2 on used triangles
  double harmonic_residual = 0.0;    // |K mu|_2 on interior vertices away from a, relative
  double loop_residual = 0.0;        // max loop integral of the target around a
  double dirichlet_energy = 0.0;     // sum A_T |grad mu|^2 over used triangles
  double oscillation = 0.0;          // max - min of mu on used vertices
};
// green_coefficient = 0 drops the Green part (degree-zero fields).
[[nodiscard]] MuMesh mu_decomposition(const FemOperators& ops, std::span<const cd> u, cd a, double exclude,
                                      double loop_tol = 1e-4, double green_coefficient = 1.0);

struct RenormReport {
  DirectEnergy direct;
  double W_formula = 0.0;
  double W0 = 0.0;
  double green_mass = 0.0;
  OptimalVortex vortex;
  double route_discrepancy = 0.0;
  [[nodiscard]] nlohmann::json to_json() const;
};

// Both routes at a (defaults to the optimal vortex) plus the argmax itself.
[[nodiscard]] RenormReport renorm_report(const ConformalMap& f0, const BoundaryData& data, std::optional<cd> a = {});

}  // namespace gluni
