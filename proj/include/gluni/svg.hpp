#pragma once

#include <span>
#include <string>
#include <vector>

#include "gluni/fem.hpp"
#include "gluni/frame_flow.hpp"
#include "gluni/mesh.hpp"
#include "gluni/types.hpp"

namespace gluni {

// Minimal SVG writer in world coordinates (y up). Numbers are printed with fixed
// precision so identical inputs give identical files.
class SvgCanvas {
 public:
  SvgCanvas(cd lower_left, cd upper_right, double width_px = 640.0, double margin = 0.05);

  void polygon(std::span<const cd> pts, const std::string& fill, const std::string& stroke = "none",
               double stroke_px = 0.0);
  void polyline(std::span<const cd> pts, const std::string& stroke, double stroke_px = 1.0, bool closed = false);
  void circle(cd c, double r_px, const std::string& fill, const std::string& stroke = "none");
  void arrow(cd from, cd to, const std::string& stroke, double stroke_px = 1.0);
  void text(cd at, const std::string& s, double size_px = 12.0);
  // Vertical color bar on the right edge.
  void colorbar(double lo, double hi);

  [[nodiscard]] std::string str() const;
  void save(const std::string& path) const;

 private:
  [[nodiscard]] std::string xy(cd p) const;
  cd lo_, hi_;
  double scale_, width_, height_, pad_;
  std::string body_;
};

// Perceptually ordered map of t in [0, 1] to "#rrggbb".
[[nodiscard]] std::string color_map(double t);

[[nodiscard]] std::string plot_modulus(const TriMesh& mesh, std::span<const cd> u, const std::string& title);
[[nodiscard]] std::string plot_quiver(const TriMesh& mesh, std::span<const cd> u, const std::string& title,
                                      std::size_t per_side = 24);
// One polyline through the first cluster center of each stage; optional target marker.
[[nodiscard]] std::string plot_vortex_path(const TriMesh& mesh, const std::vector<std::vector<cd>>& path,
                                           std::span<const double> eps, const cd* target);
[[nodiscard]] std::string plot_streamlines(std::span<const cd> boundary, const FlowResult& flow);
// Values on grid points (NaN entries are skipped); marks the minimum.
[[nodiscard]] std::string plot_scalar_grid(std::span<const cd> boundary, std::span<const cd> points,
                                           std::span<const double> values, double cell, const std::string& title);

}  // namespace gluni
