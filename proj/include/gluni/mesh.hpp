#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include <json.hpp>

#include "gluni/types.hpp"

namespace gluni {

struct TriMesh {
  std::vector<cd> vertices;
  std::vector<std::array<int, 3>> triangles;  // counterclockwise
  std::vector<int> boundary_loop;              // counterclockwise cycle
  std::vector<double> boundary_param;          // curve parameter of each boundary_loop entry
  double h = 0.0;
  double quality = 0.0;  // min angle in degrees

  [[nodiscard]] std::size_t n_vertices() const { return vertices.size(); }
  [[nodiscard]] std::size_t n_triangles() const { return triangles.size(); }
  [[nodiscard]] double triangle_area(std::size_t t) const;
  [[nodiscard]] double area() const;
  [[nodiscard]] double min_angle_degrees() const;
  [[nodiscard]] double max_edge() const;
  [[nodiscard]] std::vector<char> boundary_mask() const;
  [[nodiscard]] std::vector<cd> boundary_polyline() const;
  // distance from x to the boundary polyline
  [[nodiscard]] double boundary_distance(cd x) const;

  [[nodiscard]] nlohmann::json to_json() const;
  [[nodiscard]] static TriMesh from_json(const nlohmann::json& j);
};

struct MeshOptions {
  double min_angle_deg = 20.5;
  double max_circumradius_factor = 0.7;  // times h
  std::size_t max_insertions = 0;        // 0: automatic cap
};

// Conforming Delaunay refinement of the region bounded by a simple ccw polyline.
// params, if given, are the curve parameters of the polyline vertices (wrapping in [0,1)).
[[nodiscard]] TriMesh triangulate(std::span<const cd> polyline, double h, std::span<const double> params = {},
                                  const MeshOptions& options = {});

struct Barycentric {
  int triangle = -1;
  std::array<double, 3> weights{0.0, 0.0, 0.0};
};

// Bucket grid over the triangles for point location.
class MeshLocator {
 public:
  explicit MeshLocator(const TriMesh& mesh, std::size_t buckets_per_side = 0);
  [[nodiscard]] std::optional<Barycentric> locate(cd x) const;
  // Falls back to the closest triangle with clamped weights when x is outside.
  [[nodiscard]] Barycentric locate_or_nearest(cd x) const;
  [[nodiscard]] cd interpolate(std::span<const cd> values, cd x) const;
  [[nodiscard]] double interpolate(std::span<const double> values, cd x) const;

 private:
  [[nodiscard]] std::size_t bucket(double x, double y) const;
  const TriMesh* mesh_;
  double x0_, y0_, dx_, dy_;
  std::size_t nx_, ny_;
  std::vector<std::vector<int>> buckets_;
};

[[nodiscard]] Barycentric barycentric(const TriMesh& mesh, int t, cd x);

}  // namespace gluni
