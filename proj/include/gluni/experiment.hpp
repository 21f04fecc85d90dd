#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "gluni/conformal.hpp"
#include "gluni/curves.hpp"
#include "gluni/frame_flow.hpp"
#include "gluni/gl_solver.hpp"
#include "gluni/mesh.hpp"

namespace gluni {

// Catalog: disk, taylor {coefficients}, mobius {omega, theta}, square {side}, log_spiral {t_min, smoothing}.
struct DomainSpec {
  std::string kind = "disk";
  std::vector<cd> coefficients;  // taylor
  cd omega{0.0, 0.0};            // mobius
  double theta = 0.0;
  double side = 2.0;             // square
  double t_min = 0.05;           // log_spiral
  double smoothing = 0.02;
  [[nodiscard]] nlohmann::json to_json() const;
};

// tangential, or power {degree, phase, amp, freq}
struct DataSpec {
  std::string kind = "tangential";
  int degree = 1;
  double phase = 0.0;
  double amp = 0.0;
  int freq = 1;
  [[nodiscard]] nlohmann::json to_json() const;
};

struct RenormSpec {
  bool enabled = true;
  std::vector<double> deltas;  // empty: module default
  std::size_t heatmap_grid = 25;
  [[nodiscard]] nlohmann::json to_json() const;
};

struct FlowSpec {
  bool enabled = true;
  std::string source = "gl";  // gl | conformal
  FlowOptions options;
  std::size_t n_coefficients = 16;
  double cr_tol = 5e-2;
  [[nodiscard]] nlohmann::json to_json() const;
};

struct ExperimentConfig {
  std::string name = "experiment";
  DomainSpec domain;
  DataSpec data;
  double h = 0.02;
  GLConfig gl;
  RenormSpec renorm;
  FlowSpec flow;
  std::string output_dir = "out";
  std::uint64_t seed = 0;
  unsigned threads = 0;

  // Throws ConfigError naming the offending field path.
  [[nodiscard]] static ExperimentConfig from_json(const nlohmann::json& j);
  [[nodiscard]] static ExperimentConfig load(const std::string& path);
  [[nodiscard]] nlohmann::json to_json() const;
};

struct Domain {
  JordanCurve curve;
  std::optional<ConformalMap> map;  // uniformization, when the catalog has one
  std::vector<cd> polyline;
  std::vector<double> params;
};

[[nodiscard]] Domain build_domain(const DomainSpec& spec, double h);
[[nodiscard]] TriMesh build_mesh(const Domain& domain, double h);
[[nodiscard]] BoundaryData build_data(const DataSpec& spec, const Domain& domain);

// Deterministic JSON text (sorted keys, fixed indentation).
[[nodiscard]] std::string dump_json(const nlohmann::json& j);
void write_json(const std::string& path, const nlohmann::json& j);

// Stages of the pipeline; each writes its artifacts under dir and returns a summary.
[[nodiscard]] nlohmann::json run_mesh(const ExperimentConfig& config, const std::string& dir);
[[nodiscard]] nlohmann::json run_gl(const ExperimentConfig& config, const std::string& dir);
[[nodiscard]] nlohmann::json run_renorm(const ExperimentConfig& config, const std::string& dir);
[[nodiscard]] nlohmann::json run_frame_flow(const ExperimentConfig& config, const std::string& dir);

// Full pipeline. Writes manifest.json; stage failures are rethrown tagged with the stage name.
[[nodiscard]] nlohmann::json run_experiment(const ExperimentConfig& config, const std::string& dir);

}  // namespace gluni
