#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "gluni/types.hpp"

namespace gluni {

using json = nlohmann::json;

enum class CurveKind { circle, analytic_image, log_spiral, polyline };

[[nodiscard]] std::string to_string(CurveKind kind);

struct ArclengthTable {
  std::vector<double> t;   // k / n
  std::vector<double> s;   // cumulative length at t[k]; s.size() == n + 1
  [[nodiscard]] double total() const { return s.back(); }
};

// Closed curve parametrized over t in [0, 1), counterclockwise.
class JordanCurve {
 public:
  using Map = std::function<cd(double)>;

  JordanCurve(CurveKind kind, Map param, Map derivative, json params);

  [[nodiscard]] cd point(double t) const;
  [[nodiscard]] cd derivative(double t) const;
  [[nodiscard]] CurveKind kind() const { return kind_; }
  [[nodiscard]] const json& params() const { return params_; }

  [[nodiscard]] std::vector<cd> sample(std::size_t n) const;
  [[nodiscard]] ArclengthTable arclength_table(std::size_t n) const;
  [[nodiscard]] double length(std::size_t n = 4096) const { return arclength_table(n).total(); }
  // Closed polyline with (near) uniform arclength spacing and the parameter of each vertex.
  [[nodiscard]] std::vector<cd> equal_arclength_polyline(std::size_t n, std::vector<double>* params = nullptr) const;

  // Throws SelfIntersection when two non-adjacent sample segments cross or samples coincide.
  void check_injective(std::size_t n = 512) const;

  [[nodiscard]] json to_json(std::size_t n_samples) const;

 private:
  CurveKind kind_;
  Map param_;
  Map derivative_;
  json params_;
};

[[nodiscard]] JordanCurve circle_curve(cd center, double radius);
// Image of the unit circle under an analytic map with derivative df.
[[nodiscard]] JordanCurve analytic_image_curve(std::function<cd(cd)> f, std::function<cd(cd)> df, json params);
// Closed polygon, parametrized proportionally to arclength.
[[nodiscard]] JordanCurve polyline_curve(std::vector<cd> vertices, json params = {});
[[nodiscard]] JordanCurve square_curve(double side, cd center = {0.0, 0.0});
// Spiral arc t e^{i ln ln(1/t)}, t in [t_min, 1/e], closed by the circular arc of
// radius 1/e and a radial segment back to the inner end.
[[nodiscard]] JordanCurve log_spiral_curve(double t_min, double smoothing);
// Periodic Gaussian smoothing (width sigma in parameter units) via truncated Fourier series.
[[nodiscard]] JordanCurve smoothed_curve(const JordanCurve& curve, double sigma, std::size_t n_samples = 4096);

[[nodiscard]] bool segments_cross(cd a, cd b, cd c, cd d);
// Throws SelfIntersection if the closed polyline is not simple.
void check_simple_polygon(std::span<const cd> poly);
[[nodiscard]] double signed_area(std::span<const cd> poly);

enum class DataKind { tangential, power, tabulated };

[[nodiscard]] std::string to_string(DataKind kind);

// S^1-valued boundary data over the curve parameter t in [0, 1).
class BoundaryData {
 public:
  using Map = std::function<cd(double)>;

  BoundaryData(DataKind kind, Map value, std::optional<int> degree_hint, json params);

  [[nodiscard]] cd value(double t) const { return value_(t); }
  [[nodiscard]] DataKind kind() const { return kind_; }
  [[nodiscard]] std::optional<int> degree_hint() const { return degree_hint_; }
  [[nodiscard]] const json& params() const { return params_; }
  [[nodiscard]] std::vector<cd> sample(std::size_t n) const;
  [[nodiscard]] json to_json(std::size_t n_samples) const;

 private:
  DataKind kind_;
  Map value_;
  std::optional<int> degree_hint_;
  json params_;
};

[[nodiscard]] BoundaryData tangent_data(const JordanCurve& curve, std::size_t check_n = 1024);
// e^{i(d 2πt + phase + amp sin(freq 2πt))}
[[nodiscard]] BoundaryData power_data(int d, double phase, double amp = 0.0, int freq = 1);
// Samples at t = k/n; values between samples follow the shorter arc on S^1.
[[nodiscard]] BoundaryData tabulated_data(std::vector<cd> samples);
[[nodiscard]] BoundaryData product(const BoundaryData& a, const BoundaryData& b);
[[nodiscard]] BoundaryData rotated(const BoundaryData& g, double alpha);

// Winding number of closed samples (equispaced in the parameter).
[[nodiscard]] double winding_integral(std::span<const cd> samples);
[[nodiscard]] int degree_of_samples(std::span<const cd> samples);
[[nodiscard]] int degree(const BoundaryData& data, std::size_t n_quad = 1024);

// Double integral of |g(x)-g(y)|^2/|x-y|^2 ds ds over the curve.
[[nodiscard]] double h_half_seminorm(const BoundaryData& data, const JordanCurve& curve, std::size_t n = 1024);
// Single-level product midpoint rule with |i-j| <= 1 skipped.
[[nodiscard]] double h_half_seminorm_raw(const BoundaryData& data, const JordanCurve& curve, std::size_t n);

[[nodiscard]] double chord_arc_constant(const JordanCurve& curve, std::size_t n = 4096);

}  // namespace gluni
