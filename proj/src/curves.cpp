#include "gluni/curves.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gluni/error.hpp"
#include "gluni/parallel.hpp"
#include "gluni/quadrature.hpp"

namespace gluni {

std::string to_string(CurveKind kind) {
  switch (kind) {
    case CurveKind::circle: return "circle";
    case CurveKind::analytic_image: return "analytic_image";
    case CurveKind::log_spiral: return "log_spiral";
    case CurveKind::polyline: return "polyline";
  }
  return "unknown";
}

std::string to_string(DataKind kind) {
  switch (kind) {
    case DataKind::tangential: return "tangential";
    case DataKind::power: return "power";
    case DataKind::tabulated: return "tabulated";
  }
  return "unknown";
}

namespace {

double wrap01(double t) {
  t -= std::floor(t);
  return t >= 1.0 ? 0.0 : t;
}

json points_json(const std::vector<cd>& pts) {
  json arr = json::array();
  for (cd p : pts) arr.push_back({p.real(), p.imag()});
  return arr;
}

}  // namespace

// ---------------------------------------------------------------------------
// JordanCurve

JordanCurve::JordanCurve(CurveKind kind, Map param, Map derivative, json params)
    : kind_(kind), param_(std::move(param)), derivative_(std::move(derivative)), params_(std::move(params)) {}

cd JordanCurve::point(double t) const { return param_(wrap01(t)); }
cd JordanCurve::derivative(double t) const { return derivative_(wrap01(t)); }

std::vector<cd> JordanCurve::sample(std::size_t n) const {
  std::vector<cd> out(n);
  for (std::size_t k = 0; k < n; ++k) out[k] = point(static_cast<double>(k) / n);
  return out;
}

ArclengthTable JordanCurve::arclength_table(std::size_t n) const {
  ArclengthTable table;
  table.t.resize(n + 1);
  table.s.assign(n + 1, 0.0);
  const auto& g = gauss_legendre(4);
  const double dt = 1.0 / static_cast<double>(n);
  for (std::size_t k = 0; k <= n; ++k) table.t[k] = static_cast<double>(k) * dt;
  for (std::size_t k = 0; k < n; ++k) {
    double seg = 0.0;
    for (std::size_t q = 0; q < g.nodes.size(); ++q) {
      const double t = table.t[k] + 0.5 * dt * (1.0 + g.nodes[q]);
      seg += 0.5 * dt * g.weights[q] * std::abs(derivative_(t));
    }
    table.s[k + 1] = table.s[k] + seg;
  }
  return table;
}

std::vector<cd> JordanCurve::equal_arclength_polyline(std::size_t n, std::vector<double>* params) const {
  std::vector<double> ts(n);
  if (kind_ == CurveKind::polyline || kind_ == CurveKind::circle) {
    for (std::size_t k = 0; k < n; ++k) ts[k] = static_cast<double>(k) / n;
  } else {
    const auto table = arclength_table(16 * n);
    const double L = table.total();
    std::size_t j = 0;
    for (std::size_t k = 0; k < n; ++k) {
      const double s = L * static_cast<double>(k) / n;
      while (j + 1 < table.s.size() - 1 && table.s[j + 1] < s) ++j;
      const double ds = table.s[j + 1] - table.s[j];
      const double frac = ds > 0 ? (s - table.s[j]) / ds : 0.0;
      ts[k] = table.t[j] + frac * (table.t[j + 1] - table.t[j]);
    }
  }
  std::vector<cd> out(n);
  for (std::size_t k = 0; k < n; ++k) out[k] = point(ts[k]);
  if (params) *params = std::move(ts);
  return out;
}

void JordanCurve::check_injective(std::size_t n) const { check_simple_polygon(sample(n)); }

json JordanCurve::to_json(std::size_t n_samples) const {
  return json{{"kind", to_string(kind_)}, {"params", params_}, {"n_samples", n_samples},
              {"samples", points_json(sample(n_samples))}};
}

// ---------------------------------------------------------------------------
// polygon helpers

bool segments_cross(cd a, cd b, cd c, cd d) {
  auto orient = [](cd p, cd q, cd r) { return wedge(q - p, r - p); };
  const double o1 = orient(a, b, c), o2 = orient(a, b, d);
  const double o3 = orient(c, d, a), o4 = orient(c, d, b);
  if (((o1 > 0 && o2 < 0) || (o1 < 0 && o2 > 0)) && ((o3 > 0 && o4 < 0) || (o3 < 0 && o4 > 0))) return true;
  auto on_seg = [](cd p, cd q, cd r) {
    return std::min(p.real(), q.real()) <= r.real() && r.real() <= std::max(p.real(), q.real()) &&
           std::min(p.imag(), q.imag()) <= r.imag() && r.imag() <= std::max(p.imag(), q.imag());
  };
  if (o1 == 0 && on_seg(a, b, c)) return true;
  if (o2 == 0 && on_seg(a, b, d)) return true;
  if (o3 == 0 && on_seg(c, d, a)) return true;
  if (o4 == 0 && on_seg(c, d, b)) return true;
  return false;
}

void check_simple_polygon(std::span<const cd> poly) {
  const std::size_t n = poly.size();
  if (n < 3) fail(ErrorCode::SelfIntersection, "polygon with fewer than 3 vertices");
  double scale = 0.0;
  for (cd p : poly) scale = std::max(scale, std::abs(p - poly[0]));
  const double tiny = 1e-12 * std::max(scale, 1e-300);
  for (std::size_t i = 0; i < n; ++i) {
    if (std::abs(poly[(i + 1) % n] - poly[i]) <= tiny)
      fail(ErrorCode::SelfIntersection, "coincident consecutive samples at index " + std::to_string(i));
  }
  std::vector<char> bad(n, 0);
  parallel_for(n, [&](std::size_t i) {
    const cd a = poly[i], b = poly[(i + 1) % n];
    for (std::size_t j = i + 2; j < n; ++j) {
      if (i == 0 && j == n - 1) continue;
      if (segments_cross(a, b, poly[j], poly[(j + 1) % n])) {
        bad[i] = 1;
        return;
      }
    }
  });
  for (std::size_t i = 0; i < n; ++i)
    if (bad[i]) fail(ErrorCode::SelfIntersection, "polyline segment " + std::to_string(i) + " crosses another");
}

double signed_area(std::span<const cd> poly) {
  double a = 0.0;
  for (std::size_t i = 0; i < poly.size(); ++i) a += wedge(poly[i], poly[(i + 1) % poly.size()]);
  return 0.5 * a;
}

// ---------------------------------------------------------------------------
// catalog

JordanCurve circle_curve(cd center, double radius) {
  if (!(radius > 0)) fail(ErrorCode::InvalidArgument, "circle radius must be positive");
  return JordanCurve(
      CurveKind::circle, [=](double t) { return center + radius * std::exp(I * (two_pi * t)); },
      [=](double t) { return I * two_pi * radius * std::exp(I * (two_pi * t)); },
      json{{"center", {center.real(), center.imag()}}, {"radius", radius}});
}

JordanCurve analytic_image_curve(std::function<cd(cd)> f, std::function<cd(cd)> df, json params) {
  return JordanCurve(
      CurveKind::analytic_image, [f](double t) { return f(std::exp(I * (two_pi * t))); },
      [df](double t) {
        const cd z = std::exp(I * (two_pi * t));
        return I * two_pi * z * df(z);
      },
      std::move(params));
}

JordanCurve polyline_curve(std::vector<cd> vertices, json params) {
  const std::size_t n = vertices.size();
  if (n < 3) fail(ErrorCode::InvalidArgument, "polyline needs at least 3 vertices");
  check_simple_polygon(vertices);
  std::vector<double> cum(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) cum[i + 1] = cum[i] + std::abs(vertices[(i + 1) % n] - vertices[i]);
  const double L = cum[n];
  auto locate = [cum, L, n](double t) {
    const double s = t * L;
    std::size_t i = static_cast<std::size_t>(std::upper_bound(cum.begin(), cum.end(), s) - cum.begin());
    i = std::clamp<std::size_t>(i, 1, n) - 1;
    return std::pair{i, (s - cum[i]) / (cum[i + 1] - cum[i])};
  };
  auto param = [vertices, locate, n](double t) {
    auto [i, f] = locate(t);
    return vertices[i] + f * (vertices[(i + 1) % n] - vertices[i]);
  };
  auto deriv = [vertices, locate, n, cum, L](double t) {
    auto [i, f] = locate(t);
    (void)f;
    const cd e = vertices[(i + 1) % n] - vertices[i];
    return e / (cum[i + 1] - cum[i]) * L;
  };
  if (params.is_null()) params = json{{"vertices", points_json(vertices)}};
  return JordanCurve(CurveKind::polyline, param, deriv, std::move(params));
}

JordanCurve square_curve(double side, cd center) {
  const double h = 0.5 * side;
  std::vector<cd> v{center + cd{h, -h}, center + cd{h, h}, center + cd{-h, h}, center + cd{-h, -h}};
  // start at the midpoint of the right edge so t=0 is not a corner
  std::vector<cd> verts{center + cd{h, 0.0}, v[1], v[2], v[3], v[0]};
  return polyline_curve(verts, json{{"side", side}, {"center", {center.real(), center.imag()}}});
}

JordanCurve log_spiral_curve(double t_min, double smoothing) {
  const double t_max = std::exp(-1.0);
  if (!(t_min > 0.0) || !(t_min < t_max))
    fail(ErrorCode::InvalidArgument, "log spiral needs 0 < t_min < 1/e");
  if (smoothing < 0) fail(ErrorCode::InvalidArgument, "smoothing must be >= 0");
  const double alpha_in = std::log(std::log(1.0 / t_min));
  if (alpha_in < 1e-6 || t_max - t_min < 1e-9)
    fail(ErrorCode::SelfIntersection, "closure degenerates as t_min approaches 1/e");

  auto spiral = [](double t) { return t * std::exp(I * std::log(std::log(1.0 / t))); };
  auto spiral_d = [](double t) {
    const double l = std::log(1.0 / t);
    return std::exp(I * std::log(l)) * (1.0 - I / l);
  };
  const auto rule = gauss_on(t_min, t_max, 64);
  double L1 = 0.0;
  for (std::size_t q = 0; q < rule.x.size(); ++q) L1 += rule.w[q] * std::abs(spiral_d(rule.x[q]));
  const double L2 = t_max * alpha_in;
  const double L3 = t_max - t_min;
  const double L = L1 + L2 + L3;
  const double w1 = L1 / L, w2 = L2 / L, w3 = L3 / L;
  const cd dir = std::exp(I * alpha_in);

  auto param = [=](double t) -> cd {
    if (t < w1) return spiral(t_min + (t_max - t_min) * (t / w1));
    if (t < w1 + w2) return t_max * std::exp(I * (alpha_in * (t - w1) / w2));
    const double tau = std::min(1.0, (t - w1 - w2) / w3);
    return (t_max + (t_min - t_max) * tau) * dir;
  };
  auto deriv = [=](double t) -> cd {
    if (t < w1) return spiral_d(t_min + (t_max - t_min) * (t / w1)) * ((t_max - t_min) / w1);
    if (t < w1 + w2) {
      const double phi = alpha_in * (t - w1) / w2;
      return I * t_max * std::exp(I * phi) * (alpha_in / w2);
    }
    return (t_min - t_max) * dir / w3;
  };
  json params{{"t_min", t_min}, {"t_max", t_max}, {"smoothing", smoothing}, {"inner_angle", alpha_in}};
  JordanCurve raw(CurveKind::log_spiral, param, deriv, params);
  raw.check_injective(512);
  if (smoothing == 0.0) return raw;
  auto smooth = smoothed_curve(raw, smoothing);
  smooth.check_injective(1024);
  return smooth;
}

JordanCurve smoothed_curve(const JordanCurve& curve, double sigma, std::size_t n) {
  if (!(sigma > 0)) return curve;
  const auto pts = curve.sample(n);
  const int K = std::min<int>(static_cast<int>(n / 2) - 1,
                              static_cast<int>(std::ceil(std::sqrt(2.0 * 36.0) / (two_pi * sigma))));
  std::vector<cd> coeff(2 * K + 1);
  parallel_for(coeff.size(), [&](std::size_t idx) {
    const int m = static_cast<int>(idx) - K;
    cd acc = 0.0;
    for (std::size_t k = 0; k < n; ++k)
      acc += pts[k] * std::exp(-I * (two_pi * m * static_cast<double>(k) / n));
    const double damp = std::exp(-0.5 * std::pow(two_pi * m * sigma, 2));
    coeff[idx] = acc / static_cast<double>(n) * damp;
  });
  auto param = [coeff, K](double t) {
    cd acc = 0.0;
    for (int m = -K; m <= K; ++m) acc += coeff[m + K] * std::exp(I * (two_pi * m * t));
    return acc;
  };
  auto deriv = [coeff, K](double t) {
    cd acc = 0.0;
    for (int m = -K; m <= K; ++m) acc += coeff[m + K] * (I * two_pi * static_cast<double>(m)) * std::exp(I * (two_pi * m * t));
    return acc;
  };
  json params = curve.params();
  params["smoothing"] = sigma;
  return JordanCurve(curve.kind(), param, deriv, params);
}

// ---------------------------------------------------------------------------
// BoundaryData

BoundaryData::BoundaryData(DataKind kind, Map value, std::optional<int> degree_hint, json params)
    : kind_(kind), value_(std::move(value)), degree_hint_(degree_hint), params_(std::move(params)) {}

std::vector<cd> BoundaryData::sample(std::size_t n) const {
  std::vector<cd> out(n);
  for (std::size_t k = 0; k < n; ++k) out[k] = value_(static_cast<double>(k) / n);
  return out;
}

json BoundaryData::to_json(std::size_t n_samples) const {
  json j{{"kind", to_string(kind_)}, {"params", params_}, {"samples", points_json(sample(n_samples))}};
  j["degree_hint"] = degree_hint_ ? json(*degree_hint_) : json(nullptr);
  return j;
}

BoundaryData tangent_data(const JordanCurve& curve, std::size_t check_n) {
  for (std::size_t k = 0; k < check_n; ++k) {
    const double t = static_cast<double>(k) / check_n;
    if (std::abs(curve.derivative(t)) < 1e-12)
      fail(ErrorCode::DegenerateTangent, "vanishing tangent at t=" + std::to_string(t));
  }
  return BoundaryData(
      DataKind::tangential,
      [curve](double t) {
        const cd d = curve.derivative(t);
        return d / std::abs(d);
      },
      1, json{{"curve", to_string(curve.kind())}});
}

BoundaryData power_data(int d, double phase, double amp, int freq) {
  return BoundaryData(
      DataKind::power,
      [=](double t) {
        const double th = two_pi * t;
        return std::exp(I * (d * th + phase + amp * std::sin(freq * th)));
      },
      d, json{{"degree", d}, {"phase", phase}, {"amplitude", amp}, {"frequency", freq}});
}

BoundaryData tabulated_data(std::vector<cd> samples) {
  if (samples.size() < 3) fail(ErrorCode::InvalidArgument, "tabulated data needs at least 3 samples");
  for (auto& s : samples) {
    if (std::abs(s) < 1e-14) fail(ErrorCode::InvalidArgument, "tabulated data has a zero sample");
    s /= std::abs(s);
  }
  const std::size_t n = samples.size();
  auto value = [samples, n](double t) {
    const double x = wrap01(t) * static_cast<double>(n);
    const std::size_t i = std::min<std::size_t>(static_cast<std::size_t>(x), n - 1);
    const double f = x - static_cast<double>(i);
    const cd a = samples[i], b = samples[(i + 1) % n];
    const double ang = std::arg(b / a);
    return a * std::exp(I * (f * ang));
  };
  return BoundaryData(DataKind::tabulated, value, std::nullopt, json{{"n", n}});
}

BoundaryData product(const BoundaryData& a, const BoundaryData& b) {
  std::optional<int> hint;
  if (a.degree_hint() && b.degree_hint()) hint = *a.degree_hint() + *b.degree_hint();
  return BoundaryData(DataKind::tabulated, [a, b](double t) { return a.value(t) * b.value(t); }, hint,
                      json{{"product_of", {a.params(), b.params()}}});
}

BoundaryData rotated(const BoundaryData& g, double alpha) {
  const cd r = std::exp(I * alpha);
  json p = g.params();
  p["rotation"] = alpha;
  return BoundaryData(g.kind(), [g, r](double t) { return r * g.value(t); }, g.degree_hint(), p);
}

// ---------------------------------------------------------------------------
// degree

double winding_integral(std::span<const cd> g) {
  const std::size_t n = g.size();
  if (n < 3) fail(ErrorCode::InvalidArgument, "need at least 3 samples");
  const double dth = two_pi / static_cast<double>(n);
  double acc = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const cd next = g[(k + 1) % n];
    if (std::abs(std::arg(next / g[k])) >= 0.5 * pi)
      fail(ErrorCode::UnresolvedWinding, "adjacent samples jump by >= pi/2 at index " + std::to_string(k));
    const cd dg = (next - g[(k + n - 1) % n]) / (2.0 * dth);
    acc += wedge(g[k], dg) / std::norm(g[k]);
  }
  return acc * dth / two_pi;
}

int degree_of_samples(std::span<const cd> samples) {
  const double w = winding_integral(samples);
  const double r = std::round(w);
  if (std::abs(w - r) > 0.25)
    fail(ErrorCode::UnresolvedWinding, "winding integral " + std::to_string(w) + " is not near an integer");
  return static_cast<int>(r);
}

int degree(const BoundaryData& data, std::size_t n_quad) {
  if (n_quad < 256) n_quad = 256;
  const auto s = data.sample(n_quad);
  return degree_of_samples(s);
}

// ---------------------------------------------------------------------------
// H^{1/2}

double h_half_seminorm_raw(const BoundaryData& data, const JordanCurve& curve, std::size_t n) {
  std::vector<cd> x(n), g(n);
  std::vector<double> ds(n);
  const auto table = curve.arclength_table(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double t = (static_cast<double>(k) + 0.5) / n;
    x[k] = curve.point(t);
    g[k] = data.value(t);
    ds[k] = table.s[k + 1] - table.s[k];
  }
  std::vector<double> row(n, 0.0);
  parallel_for(n, [&](std::size_t i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t d = i > j ? i - j : j - i;
      if (std::min(d, n - d) <= 1) continue;
      acc += std::norm(g[i] - g[j]) / std::norm(x[i] - x[j]) * ds[j];
    }
    row[i] = acc * ds[i];
  });
  double total = 0.0;
  for (double r : row) total += r;
  return total;
}

double h_half_seminorm(const BoundaryData& data, const JordanCurve& curve, std::size_t n) {
  // The skipped near-diagonal band is an O(1/n) defect; one Richardson step removes it.
  return 2.0 * h_half_seminorm_raw(data, curve, 2 * n) - h_half_seminorm_raw(data, curve, n);
}

// ---------------------------------------------------------------------------
// chord-arc

double chord_arc_constant(const JordanCurve& curve, std::size_t n) {
  const auto table = curve.arclength_table(n);
  const double L = table.total();
  const auto x = curve.sample(n);
  std::vector<double> row(n, 0.0);
  std::vector<char> zero(n, 0);
  parallel_for(n, [&](std::size_t i) {
    double best = 0.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      const double chord = std::abs(x[i] - x[j]);
      if (chord < 1e-14) {
        zero[i] = 1;
        return;
      }
      const double along = table.s[j] - table.s[i];
      best = std::max(best, std::min(along, L - along) / chord);
    }
    row[i] = best;
  });
  for (std::size_t i = 0; i < n; ++i)
    if (zero[i]) fail(ErrorCode::ZeroChord, "distinct samples coincide at index " + std::to_string(i));
  return *std::max_element(row.begin(), row.end());
}

}  // namespace gluni
