#include "gluni/svg.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "gluni/error.hpp"

namespace gluni {

namespace {

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", x);
  return buf;
}

struct Bounds {
  cd lo{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  cd hi{-std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
  void add(cd p) {
    lo = {std::min(lo.real(), p.real()), std::min(lo.imag(), p.imag())};
    hi = {std::max(hi.real(), p.real()), std::max(hi.imag(), p.imag())};
  }
};

Bounds bounds_of(std::span<const cd> pts) {
  Bounds b;
  for (cd p : pts) b.add(p);
  return b;
}

}  // namespace

SvgCanvas::SvgCanvas(cd lower_left, cd upper_right, double width_px, double margin) : lo_(lower_left), hi_(upper_right) {
  const double w = hi_.real() - lo_.real(), h = hi_.imag() - lo_.imag();
  if (!(w > 0 && h > 0)) fail(ErrorCode::InvalidArgument, "empty plot window");
  pad_ = margin * width_px;
  scale_ = (width_px - 2 * pad_) / w;
  width_ = width_px + 60.0;  // room for the color bar
  height_ = h * scale_ + 2 * pad_ + 20.0;
}

std::string SvgCanvas::xy(cd p) const {
  const double x = pad_ + (p.real() - lo_.real()) * scale_;
  const double y = 20.0 + pad_ + (hi_.imag() - p.imag()) * scale_;
  return num(x) + "," + num(y);
}

void SvgCanvas::polygon(std::span<const cd> pts, const std::string& fill, const std::string& stroke, double stroke_px) {
  body_ += "<polygon points=\"";
  for (std::size_t i = 0; i < pts.size(); ++i) body_ += (i ? " " : "") + xy(pts[i]);
  body_ += "\" fill=\"" + fill + "\" stroke=\"" + (stroke == "none" ? fill : stroke) + "\" stroke-width=\"" +
           num(stroke == "none" ? 0.3 : stroke_px) + "\"/>\n";
}

void SvgCanvas::polyline(std::span<const cd> pts, const std::string& stroke, double stroke_px, bool closed) {
  body_ += std::string(closed ? "<polygon" : "<polyline") + " points=\"";
  for (std::size_t i = 0; i < pts.size(); ++i) body_ += (i ? " " : "") + xy(pts[i]);
  body_ += "\" fill=\"none\" stroke=\"" + stroke + "\" stroke-width=\"" + num(stroke_px) + "\"/>\n";
}

void SvgCanvas::circle(cd c, double r_px, const std::string& fill, const std::string& stroke) {
  const auto p = xy(c);
  const auto comma = p.find(',');
  body_ += "<circle cx=\"" + p.substr(0, comma) + "\" cy=\"" + p.substr(comma + 1) + "\" r=\"" + num(r_px) +
           "\" fill=\"" + fill + "\" stroke=\"" + stroke + "\"/>\n";
}

void SvgCanvas::arrow(cd from, cd to, const std::string& stroke, double stroke_px) {
  const cd d = to - from;
  const double L = std::abs(d);
  if (L == 0) return;
  const cd head = 0.3 * d;
  const std::array<cd, 2> shaft{from, to};
  polyline(shaft, stroke, stroke_px);
  const std::array<cd, 3> tip{to - head * std::exp(I * 0.4), to, to - head * std::exp(-I * 0.4)};
  polyline(tip, stroke, stroke_px);
}

void SvgCanvas::text(cd at, const std::string& s, double size_px) {
  const auto p = xy(at);
  const auto comma = p.find(',');
  body_ += "<text x=\"" + p.substr(0, comma) + "\" y=\"" + p.substr(comma + 1) + "\" font-size=\"" + num(size_px) +
           "\" font-family=\"sans-serif\">" + s + "</text>\n";
}

void SvgCanvas::colorbar(double lo, double hi) {
  const double x0 = width_ - 50.0, top = 20.0 + pad_, bottom = height_ - pad_;
  const int n = 32;
  for (int k = 0; k < n; ++k) {
    const double y = bottom - (bottom - top) * (k + 1) / n;
    body_ += "<rect x=\"" + num(x0) + "\" y=\"" + num(y) + "\" width=\"12\" height=\"" + num((bottom - top) / n + 0.5) +
             "\" fill=\"" + color_map((k + 0.5) / n) + "\"/>\n";
  }
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3g", hi);
  body_ += "<text x=\"" + num(x0 - 4) + "\" y=\"" + num(top - 4) + "\" font-size=\"10\" font-family=\"sans-serif\">" +
           buf + "</text>\n";
  std::snprintf(buf, sizeof buf, "%.3g", lo);
  body_ += "<text x=\"" + num(x0 - 4) + "\" y=\"" + num(bottom + 12) +
           "\" font-size=\"10\" font-family=\"sans-serif\">" + buf + "</text>\n";
}

std::string SvgCanvas::str() const {
  return "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width_) + "\" height=\"" + num(height_) +
         "\" viewBox=\"0 0 " + num(width_) + " " + num(height_) + "\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n" +
         body_ + "</svg>\n";
}

void SvgCanvas::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw ConfigError(path, "cannot open for writing");
  out << str();
}

std::string color_map(double t) {
  // piecewise-linear through a few viridis anchors
  static const std::array<std::array<double, 3>, 5> anchors{{{68, 1, 84}, {59, 82, 139}, {33, 145, 140},
                                                              {94, 201, 98}, {253, 231, 37}}};
  t = std::clamp(std::isfinite(t) ? t : 0.0, 0.0, 1.0);
  const double x = t * (anchors.size() - 1);
  const auto k = std::min<std::size_t>(static_cast<std::size_t>(x), anchors.size() - 2);
  const double f = x - k;
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", static_cast<int>(std::lround(anchors[k][0] * (1 - f) + anchors[k + 1][0] * f)),
                static_cast<int>(std::lround(anchors[k][1] * (1 - f) + anchors[k + 1][1] * f)),
                static_cast<int>(std::lround(anchors[k][2] * (1 - f) + anchors[k + 1][2] * f)));
  return buf;
}

std::string plot_modulus(const TriMesh& mesh, std::span<const cd> u, const std::string& title) {
  const auto poly = mesh.boundary_polyline();
  const auto b = bounds_of(poly);
  SvgCanvas c(b.lo, b.hi);
  for (const auto& t : mesh.triangles) {
    const double m = (std::abs(u[t[0]]) + std::abs(u[t[1]]) + std::abs(u[t[2]])) / 3.0;
    const std::array<cd, 3> pts{mesh.vertices[t[0]], mesh.vertices[t[1]], mesh.vertices[t[2]]};
    c.polygon(pts, color_map(m));
  }
  c.polyline(poly, "black", 1.0, true);
  c.colorbar(0.0, 1.0);
  c.text({b.lo.real(), b.hi.imag()}, title);
  return c.str();
}

std::string plot_quiver(const TriMesh& mesh, std::span<const cd> u, const std::string& title, std::size_t per_side) {
  const auto poly = mesh.boundary_polyline();
  const auto b = bounds_of(poly);
  SvgCanvas c(b.lo, b.hi);
  c.polyline(poly, "black", 1.0, true);
  const MeshLocator loc(mesh);
  const double step = std::max(b.hi.real() - b.lo.real(), b.hi.imag() - b.lo.imag()) / per_side;
  for (std::size_t i = 0; i <= per_side; ++i)
    for (std::size_t j = 0; j <= per_side; ++j) {
      const cd x = b.lo + cd{(i + 0.5) * step, (j + 0.5) * step};
      if (!loc.locate(x)) continue;
      const cd v = loc.interpolate(u, x);
      const double m = std::abs(v);
      c.arrow(x - 0.4 * step * v, x + 0.4 * step * v, color_map(m));
    }
  c.colorbar(0.0, 1.0);
  c.text({b.lo.real(), b.hi.imag()}, title);
  return c.str();
}

std::string plot_vortex_path(const TriMesh& mesh, const std::vector<std::vector<cd>>& path,
                             std::span<const double> eps, const cd* target) {
  const auto poly = mesh.boundary_polyline();
  const auto b = bounds_of(poly);
  SvgCanvas c(b.lo, b.hi);
  c.polyline(poly, "black", 1.0, true);
  std::vector<cd> centers;
  for (std::size_t k = 0; k < path.size(); ++k)
    for (cd p : path[k]) {
      c.circle(p, 4.0, color_map(path.size() > 1 ? double(k) / (path.size() - 1) : 1.0), "black");
      if (k < eps.size()) c.text(p + cd{0.02, 0.02}, "eps=" + num(eps[k]), 10.0);
    }
  for (const auto& stage : path)
    if (!stage.empty()) centers.push_back(stage.front());
  if (centers.size() > 1) c.polyline(centers, "#444444", 1.0);
  if (target) {
    c.circle(*target, 6.0, "none", "red");
    c.text(*target + cd{0.02, -0.06}, "target", 10.0);
  }
  c.text({b.lo.real(), b.hi.imag()}, "vortex path");
  return c.str();
}

std::string plot_streamlines(std::span<const cd> boundary, const FlowResult& flow) {
  auto b = bounds_of(boundary);
  for (const auto& row : flow.psi)
    for (cd p : row) b.add(p);
  SvgCanvas c(b.lo, b.hi);
  c.polyline(boundary, "black", 1.0, true);
  const std::size_t ns = flow.s.size(), nt = flow.theta.size();
  // theta-orbits (level sets of s)
  for (std::size_t k = 0; k < ns; k += std::max<std::size_t>(1, ns / 12)) {
    std::vector<cd> row(flow.psi[k].begin(), flow.psi[k].end());
    c.polyline(row, "#3b528b", 0.8, true);
  }
  // s-trajectories
  for (std::size_t j = 0; j < nt; j += std::max<std::size_t>(1, nt / 24)) {
    std::vector<cd> col;
    for (std::size_t k = 0; k < ns; ++k) col.push_back(flow.psi[k][j]);
    c.polyline(col, "#21918c", 0.8);
  }
  c.circle(flow.anchor, 4.0, "red");
  c.circle(flow.a, 3.0, "black");
  c.text({b.lo.real(), b.hi.imag()}, "frame flow, rho=" + num(flow.rho));
  return c.str();
}

std::string plot_scalar_grid(std::span<const cd> boundary, std::span<const cd> points, std::span<const double> values,
                             double cell, const std::string& title) {
  const auto b = bounds_of(boundary);
  SvgCanvas c(b.lo, b.hi);
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  std::size_t best = points.size();
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) continue;
    if (values[i] < lo) {
      lo = values[i];
      best = i;
    }
    hi = std::max(hi, values[i]);
  }
  const double span = hi > lo ? hi - lo : 1.0;
  const double hc = 0.5 * cell;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (!std::isfinite(values[i])) continue;
    const cd p = points[i];
    const std::array<cd, 4> sq{p + cd{-hc, -hc}, p + cd{hc, -hc}, p + cd{hc, hc}, p + cd{-hc, hc}};
    c.polygon(sq, color_map((values[i] - lo) / span));
  }
  c.polyline(boundary, "black", 1.0, true);
  if (best < points.size()) {
    c.circle(points[best], 5.0, "none", "red");
    c.text(points[best] + cd{0.03, 0.03}, "min", 10.0);
  }
  if (std::isfinite(lo)) c.colorbar(lo, hi);
  c.text({b.lo.real(), b.hi.imag()}, title);
  return c.str();
}

}  // namespace gluni
