#include "gluni/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <string>
#include <unordered_map>
#include <unordered_set>

#include "gluni/conformal.hpp"
#include "gluni/curves.hpp"
#include "gluni/error.hpp"

namespace gluni {

// ---------------------------------------------------------------------------
// TriMesh

double TriMesh::triangle_area(std::size_t t) const {
  const auto& tr = triangles[t];
  return 0.5 * wedge(vertices[tr[1]] - vertices[tr[0]], vertices[tr[2]] - vertices[tr[0]]);
}

double TriMesh::area() const {
  double a = 0.0;
  for (std::size_t t = 0; t < triangles.size(); ++t) a += triangle_area(t);
  return a;
}

namespace {

double min_angle_of(cd a, cd b, cd c) {
  auto ang = [](cd p, cd q, cd r) { return std::abs(std::atan2(wedge(q - p, r - p), dot(q - p, r - p))); };
  return std::min({ang(a, b, c), ang(b, c, a), ang(c, a, b)});
}

}  // namespace

double TriMesh::min_angle_degrees() const {
  double m = 180.0;
  for (const auto& t : triangles)
    m = std::min(m, min_angle_of(vertices[t[0]], vertices[t[1]], vertices[t[2]]) * 180.0 / pi);
  return m;
}

double TriMesh::max_edge() const {
  double m = 0.0;
  for (const auto& t : triangles)
    for (int k = 0; k < 3; ++k) m = std::max(m, std::abs(vertices[t[k]] - vertices[t[(k + 1) % 3]]));
  return m;
}

std::vector<char> TriMesh::boundary_mask() const {
  std::vector<char> mask(vertices.size(), 0);
  for (int v : boundary_loop) mask[v] = 1;
  return mask;
}

std::vector<cd> TriMesh::boundary_polyline() const {
  std::vector<cd> out;
  out.reserve(boundary_loop.size());
  for (int v : boundary_loop) out.push_back(vertices[v]);
  return out;
}

double TriMesh::boundary_distance(cd x) const {
  const auto poly = boundary_polyline();
  return polyline_distance(poly, x);
}

nlohmann::json TriMesh::to_json() const {
  nlohmann::json v = nlohmann::json::array(), t = nlohmann::json::array();
  for (cd p : vertices) v.push_back({p.real(), p.imag()});
  for (const auto& tr : triangles) t.push_back({tr[0], tr[1], tr[2]});
  return {{"vertices", v}, {"triangles", t}, {"boundary_loop", boundary_loop},
          {"boundary_param", boundary_param}, {"h", h}, {"min_angle", quality}};
}

TriMesh TriMesh::from_json(const nlohmann::json& j) {
  TriMesh m;
  for (const auto& p : j.at("vertices")) m.vertices.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
  for (const auto& t : j.at("triangles")) m.triangles.push_back({t.at(0).get<int>(), t.at(1).get<int>(), t.at(2).get<int>()});
  m.boundary_loop = j.at("boundary_loop").get<std::vector<int>>();
  if (j.contains("boundary_param")) m.boundary_param = j.at("boundary_param").get<std::vector<double>>();
  m.h = j.value("h", 0.0);
  m.quality = m.min_angle_degrees();
  return m;
}

// ---------------------------------------------------------------------------
// Delaunay refinement

namespace {

double orient(cd a, cd b, cd c) { return wedge(b - a, c - a); }

// > 0 when d lies inside the circumcircle of ccw (a, b, c)
double incircle(cd a, cd b, cd c, cd d) {
  const cd ad = a - d, bd = b - d, cd_ = c - d;
  const double a2 = std::norm(ad), b2 = std::norm(bd), c2 = std::norm(cd_);
  return ad.real() * (bd.imag() * c2 - b2 * cd_.imag()) - ad.imag() * (bd.real() * c2 - b2 * cd_.real()) +
         a2 * (bd.real() * cd_.imag() - bd.imag() * cd_.real());
}

cd circumcenter(cd a, cd b, cd c) {
  const cd B = b - a, C = c - a;
  const double D = 2.0 * wedge(B, C);
  const double b2 = std::norm(B), c2 = std::norm(C);
  return a + cd{(C.imag() * b2 - B.imag() * c2) / D, (B.real() * c2 - C.real() * b2) / D};
}

std::uint64_t edge_key(int a, int b) {
  if (a > b) std::swap(a, b);
  return (static_cast<std::uint64_t>(a) << 32) | static_cast<std::uint32_t>(b);
}

double wrap_mid(double ta, double tb) {
  if (tb < ta) tb += 1.0;
  double m = 0.5 * (ta + tb);
  return m >= 1.0 ? m - 1.0 : m;
}

struct Tri {
  std::array<int, 3> v;
  std::array<int, 3> nb;  // nb[i] is across the edge opposite v[i]
  bool alive = true;
};

class Builder {
 public:
  std::vector<cd> pts;
  std::vector<Tri> tris;
  std::vector<int> vtri;            // an alive triangle incident to each vertex
  std::unordered_set<std::uint64_t> segments;
  std::vector<int> next_bnd;        // boundary successor, -1 for interior vertices
  std::vector<double> tparam;
  int last = 0;
  bool protect = false;
  std::vector<unsigned> mark;
  unsigned stamp = 0;

  int add_point(cd p) {
    pts.push_back(p);
    vtri.push_back(-1);
    next_bnd.push_back(-1);
    tparam.push_back(0.0);
    return static_cast<int>(pts.size()) - 1;
  }

  bool is_segment(int a, int b) const { return segments.count(edge_key(a, b)) != 0; }

  cd P(int v) const { return pts[v]; }

  bool in_circle(int t, cd p) const {
    const auto& tr = tris[t];
    return incircle(P(tr.v[0]), P(tr.v[1]), P(tr.v[2]), p) > 0.0;
  }

  // Walk toward p. Returns the containing triangle, or -1 with (blocked_t, blocked_i)
  // set to the constrained edge that stops the walk.
  int locate(cd p, int start, int* blocked_t = nullptr, int* blocked_i = nullptr) {
    int t = (start >= 0 && tris[start].alive) ? start : -1;
    if (t < 0)
      for (int k = static_cast<int>(tris.size()) - 1; k >= 0; --k)
        if (tris[k].alive) {
          t = k;
          break;
        }
    const std::size_t cap = 4 * tris.size() + 100;
    unsigned rot = 0;
    for (std::size_t step = 0; step < cap; ++step) {
      const auto& tr = tris[t];
      bool moved = false;
      ++rot;
      for (int k = 0; k < 3; ++k) {
        const int i = static_cast<int>((k + rot) % 3);
        const int a = tr.v[(i + 1) % 3], b = tr.v[(i + 2) % 3];
        if (orient(P(a), P(b), p) < 0.0) {
          if (tr.nb[i] < 0 || (protect && is_segment(a, b))) {
            if (blocked_t) *blocked_t = t;
            if (blocked_i) *blocked_i = i;
            return -1;
          }
          t = tr.nb[i];
          moved = true;
          break;
        }
      }
      if (!moved) return t;
    }
    fail(ErrorCode::MeshFailure, "point location did not terminate");
  }

  std::vector<int> cavity(cd p, int t0) {
    ++stamp;
    if (mark.size() < tris.size()) mark.resize(tris.size() + 1024, 0);
    std::vector<int> cav{t0};
    mark[t0] = stamp;
    for (std::size_t k = 0; k < cav.size(); ++k) {
      const auto tr = tris[cav[k]];
      for (int i = 0; i < 3; ++i) {
        const int n = tr.nb[i];
        if (n < 0 || mark[n] == stamp) continue;
        if (protect && is_segment(tr.v[(i + 1) % 3], tr.v[(i + 2) % 3])) continue;
        if (in_circle(n, p)) {
          mark[n] = stamp;
          cav.push_back(n);
        }
      }
    }
    return cav;
  }

  struct BEdge {
    int t, i, a, b, outer;
  };

  std::vector<BEdge> cavity_boundary(const std::vector<int>& cav) {
    std::vector<BEdge> out;
    for (int t : cav)
      for (int i = 0; i < 3; ++i) {
        const int n = tris[t].nb[i];
        if (n >= 0 && mark[n] == stamp) continue;
        out.push_back({t, i, tris[t].v[(i + 1) % 3], tris[t].v[(i + 2) % 3], n});
      }
    return out;
  }

  // Shrinks the cavity until every boundary edge sees p on its left.
  void make_star(cd p, std::vector<int>& cav, int t0, std::uint64_t skip_edge) {
    for (bool changed = true; changed;) {
      changed = false;
      for (const auto& e : cavity_boundary(cav)) {
        if (skip_edge && edge_key(e.a, e.b) == skip_edge) continue;
        if (orient(P(e.a), P(e.b), p) <= 0.0) {
          if (e.t == t0) fail(ErrorCode::MeshFailure, "degenerate insertion");
          mark[e.t] = stamp - 1;
          cav.erase(std::find(cav.begin(), cav.end(), e.t));
          changed = true;
          break;
        }
      }
    }
  }

  // Replace the cavity by a fan around vertex v.
  void retriangulate(int v, const std::vector<int>& cav, std::uint64_t skip_edge) {
    const auto edges = cavity_boundary(cav);
    for (int t : cav) tris[t].alive = false;
    std::unordered_map<int, int> by_start, by_end;
    std::vector<int> created;
    for (const auto& e : edges) {
      if (skip_edge && edge_key(e.a, e.b) == skip_edge) continue;
      Tri nt;
      nt.v = {v, e.a, e.b};
      nt.nb = {e.outer, -1, -1};
      const int id = static_cast<int>(tris.size());
      tris.push_back(nt);
      if (e.outer >= 0) {
        auto& o = tris[e.outer];
        for (int j = 0; j < 3; ++j)
          if (o.nb[j] == e.t) o.nb[j] = id;
      }
      by_start[e.a] = id;
      by_end[e.b] = id;
      created.push_back(id);
    }
    for (int id : created) {
      auto& t = tris[id];
      const int a = t.v[1], b = t.v[2];
      auto it = by_end.find(a);
      t.nb[2] = it != by_end.end() ? it->second : -1;   // edge v-a
      auto jt = by_start.find(b);
      t.nb[1] = jt != by_start.end() ? jt->second : -1;  // edge b-v
      for (int k = 0; k < 3; ++k) vtri[t.v[k]] = id;
    }
    if (!created.empty()) last = created.back();
  }

  // Insert p; returns the new vertex or -1 when blocked (walk stopped by a segment).
  int insert(cd p, int start, int* blocked_t = nullptr, int* blocked_i = nullptr) {
    const int t0 = locate(p, start, blocked_t, blocked_i);
    if (t0 < 0) return -1;
    auto cav = cavity(p, t0);
    make_star(p, cav, t0, 0);
    const int v = add_point(p);
    retriangulate(v, cav, 0);
    return v;
  }

  // Triangle holding directed or undirected edge (a, b); -1 if absent.
  int find_edge(int a, int b, int* local = nullptr) const {
    const int start = vtri[a];
    if (start < 0) return -1;
    auto check = [&](int t) {
      const auto& tr = tris[t];
      for (int i = 0; i < 3; ++i) {
        const int x = tr.v[(i + 1) % 3], y = tr.v[(i + 2) % 3];
        if ((x == a && y == b) || (x == b && y == a)) {
          if (local) *local = i;
          return true;
        }
      }
      return false;
    };
    for (int dir = 0; dir < 2; ++dir) {
      int t = start;
      for (std::size_t guard = 0; guard < 1000 && t >= 0; ++guard) {
        if (check(t)) return t;
        const auto& tr = tris[t];
        int k = 0;
        while (tr.v[k] != a) ++k;
        t = dir == 0 ? tr.nb[(k + 2) % 3] : tr.nb[(k + 1) % 3];
        if (t == start) break;
      }
    }
    return -1;
  }

  // Split boundary segment (a, b) at its midpoint.
  int split_segment(int a, int b) {
    if (next_bnd[a] != b) std::swap(a, b);
    int local = -1;
    const int t = find_edge(a, b, &local);
    if (t < 0) fail(ErrorCode::MeshFailure, "segment lost from the triangulation");
    const cd m = 0.5 * (P(a) + P(b));
    const std::uint64_t key = edge_key(a, b);
    ++stamp;
    if (mark.size() < tris.size()) mark.resize(tris.size() + 1024, 0);
    std::vector<int> cav{t};
    mark[t] = stamp;
    for (std::size_t k = 0; k < cav.size(); ++k) {
      const auto tr = tris[cav[k]];
      for (int i = 0; i < 3; ++i) {
        const int n = tr.nb[i];
        if (n < 0 || mark[n] == stamp) continue;
        if (is_segment(tr.v[(i + 1) % 3], tr.v[(i + 2) % 3])) continue;
        if (in_circle(n, m)) {
          mark[n] = stamp;
          cav.push_back(n);
        }
      }
    }
    make_star(m, cav, t, key);
    const int v = add_point(m);
    retriangulate(v, cav, key);
    segments.erase(key);
    segments.insert(edge_key(a, v));
    segments.insert(edge_key(v, b));
    next_bnd[a] = v;
    next_bnd[v] = b;
    tparam[v] = wrap_mid(tparam[a], tparam[b]);
    return v;
  }
};

bool point_in_polygon(std::span<const cd> poly, cd p) {
  bool inside = false;
  const std::size_t n = poly.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const cd a = poly[i], b = poly[j];
    if ((a.imag() > p.imag()) != (b.imag() > p.imag())) {
      const double x = a.real() + (p.imag() - a.imag()) * (b.real() - a.real()) / (b.imag() - a.imag());
      if (p.real() < x) inside = !inside;
    }
  }
  return inside;
}

}  // namespace

TriMesh triangulate(std::span<const cd> polyline_in, double h, std::span<const double> params_in,
                    const MeshOptions& options) {
  if (!(h > 0)) fail(ErrorCode::InvalidArgument, "mesh size must be positive");
  if (polyline_in.size() < 16) fail(ErrorCode::MeshFailure, "polyline needs at least 16 vertices");
  try {
    check_simple_polygon(polyline_in);
  } catch (const NumericalError& e) {
    fail(ErrorCode::MeshFailure, std::string("input polyline is not simple: ") + e.what());
  }
  std::vector<cd> poly(polyline_in.begin(), polyline_in.end());
  std::vector<double> par(params_in.begin(), params_in.end());
  if (par.size() != poly.size()) {
    par.resize(poly.size());
    for (std::size_t k = 0; k < poly.size(); ++k) par[k] = static_cast<double>(k) / poly.size();
  }
  if (signed_area(poly) < 0) fail(ErrorCode::MeshFailure, "polyline must be counterclockwise");

  // pre-split long edges so the boundary resolution matches h
  std::vector<cd> bpts;
  std::vector<double> bpar;
  for (std::size_t k = 0; k < poly.size(); ++k) {
    const cd a = poly[k], b = poly[(k + 1) % poly.size()];
    const double ta = par[k];
    double tb = par[(k + 1) % poly.size()];
    if (tb < ta) tb += 1.0;
    const int pieces = std::max(1, static_cast<int>(std::ceil(std::abs(b - a) / h - 1e-9)));
    for (int s = 0; s < pieces; ++s) {
      const double f = static_cast<double>(s) / pieces;
      bpts.push_back(a + f * (b - a));
      double t = ta + f * (tb - ta);
      bpar.push_back(t >= 1.0 ? t - 1.0 : t);
    }
  }

  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (cd p : bpts) {
    xmin = std::min(xmin, p.real());
    xmax = std::max(xmax, p.real());
    ymin = std::min(ymin, p.imag());
    ymax = std::max(ymax, p.imag());
  }
  const cd center{0.5 * (xmin + xmax), 0.5 * (ymin + ymax)};
  const double extent = std::max(xmax - xmin, ymax - ymin);

  Builder B;
  const double R = 20.0 * extent;
  for (double ang : {0.5 * pi, 7.0 * pi / 6.0, 11.0 * pi / 6.0}) B.add_point(center + R * std::exp(I * ang));
  B.tris.push_back(Tri{{0, 1, 2}, {-1, -1, -1}, true});
  B.vtri[0] = B.vtri[1] = B.vtri[2] = 0;

  // boundary vertices
  const int first_bnd = static_cast<int>(B.pts.size());
  std::vector<int> bidx;
  for (std::size_t k = 0; k < bpts.size(); ++k) {
    const int v = B.insert(bpts[k], B.last);
    if (v < 0) fail(ErrorCode::MeshFailure, "boundary vertex outside the super triangle");
    B.tparam[v] = bpar[k];
    bidx.push_back(v);
  }
  for (std::size_t k = 0; k < bidx.size(); ++k) B.next_bnd[bidx[k]] = bidx[(k + 1) % bidx.size()];

  // interior hexagonal lattice
  const double dy = h * std::sqrt(3.0) / 2.0;
  const auto ny = static_cast<long>(std::ceil((ymax - ymin) / dy));
  for (long j = 0; j <= ny; ++j) {
    const double y = ymin + j * dy;
    const double shift = (j % 2) ? 0.5 * h : 0.0;
    for (double x = xmin + shift; x <= xmax; x += h) {
      const cd p{x, y};
      if (!point_in_polygon(bpts, p)) continue;
      if (polyline_distance(bpts, p) < 0.6 * h) continue;
      B.insert(p, B.last);
    }
  }

  // recover boundary segments by midpoint splitting
  for (std::size_t pass = 0;; ++pass) {
    if (pass > 60) fail(ErrorCode::MeshFailure, "segment recovery did not converge");
    bool all = true;
    int a = first_bnd;
    do {
      const int b = B.next_bnd[a];
      if (B.find_edge(a, b) < 0) {
        all = false;
        const int t0 = B.locate(0.5 * (B.P(a) + B.P(b)), B.vtri[a]);
        auto cav = B.cavity(0.5 * (B.P(a) + B.P(b)), t0);
        B.make_star(0.5 * (B.P(a) + B.P(b)), cav, t0, 0);
        const int m = B.add_point(0.5 * (B.P(a) + B.P(b)));
        B.retriangulate(m, cav, 0);
        B.next_bnd[a] = m;
        B.next_bnd[m] = b;
        B.tparam[m] = wrap_mid(B.tparam[a], B.tparam[b]);
        a = b;
      } else {
        a = b;
      }
    } while (a != first_bnd);
    if (all) break;
  }
  {
    int a = first_bnd;
    do {
      B.segments.insert(edge_key(a, B.next_bnd[a]));
      a = B.next_bnd[a];
    } while (a != first_bnd);
  }

  // remove the exterior: flood from the super-triangle corners without crossing segments
  {
    std::vector<char> outside(B.tris.size(), 0);
    std::deque<int> queue;
    for (std::size_t t = 0; t < B.tris.size(); ++t) {
      const auto& tr = B.tris[t];
      if (!tr.alive) continue;
      if (tr.v[0] < 3 || tr.v[1] < 3 || tr.v[2] < 3) {
        outside[t] = 1;
        queue.push_back(static_cast<int>(t));
      }
    }
    while (!queue.empty()) {
      const int t = queue.front();
      queue.pop_front();
      const auto& tr = B.tris[t];
      for (int i = 0; i < 3; ++i) {
        const int n = tr.nb[i];
        if (n < 0 || outside[n]) continue;
        if (B.is_segment(tr.v[(i + 1) % 3], tr.v[(i + 2) % 3])) continue;
        outside[n] = 1;
        queue.push_back(n);
      }
    }
    for (std::size_t t = 0; t < B.tris.size(); ++t)
      if (outside[t]) B.tris[t].alive = false;
    for (auto& tr : B.tris) {
      if (!tr.alive) continue;
      for (int i = 0; i < 3; ++i)
        if (tr.nb[i] >= 0 && !B.tris[tr.nb[i]].alive) tr.nb[i] = -1;
    }
    std::fill(B.vtri.begin(), B.vtri.end(), -1);
    for (std::size_t t = 0; t < B.tris.size(); ++t)
      if (B.tris[t].alive)
        for (int k = 0; k < 3; ++k) B.vtri[B.tris[t].v[k]] = static_cast<int>(t);
    for (std::size_t t = B.tris.size(); t-- > 0;)
      if (B.tris[t].alive) {
        B.last = static_cast<int>(t);
        break;
      }
  }

  // Ruppert refinement
  B.protect = true;
  const double min_angle = options.min_angle_deg * pi / 180.0;
  const double max_radius = options.max_circumradius_factor * h;
  const std::size_t cap = options.max_insertions ? options.max_insertions : 20 * B.pts.size() + 10000;
  std::size_t inserted = 0;

  auto encroached = [&](int a, int b, cd p) { return dot(B.P(a) - p, B.P(b) - p) < 0.0; };

  auto split_encroached_segments = [&]() {
    for (bool any = true; any;) {
      any = false;
      int a = first_bnd;
      do {
        const int b = B.next_bnd[a];
        int local = -1;
        const int t = B.find_edge(a, b, &local);
        if (t < 0) fail(ErrorCode::MeshFailure, "segment lost during refinement");
        const int c = B.tris[t].v[local];
        if (encroached(a, b, B.P(c))) {
          B.split_segment(a, b);
          any = true;
          if (++inserted > cap) fail(ErrorCode::MeshFailure, "refinement exceeded the insertion cap");
        } else {
          a = b;
        }
      } while (a != first_bnd);
    }
  };

  split_encroached_segments();
  for (bool changed = true; changed;) {
    changed = false;
    const std::size_t n_now = B.tris.size();
    for (std::size_t t = 0; t < n_now; ++t) {
      if (!B.tris[t].alive) continue;
      const auto tr = B.tris[t];
      const cd pa = B.P(tr.v[0]), pb = B.P(tr.v[1]), pc = B.P(tr.v[2]);
      const double ang = min_angle_of(pa, pb, pc);
      const cd cc = circumcenter(pa, pb, pc);
      const double rad = std::abs(cc - pa);
      if (ang >= min_angle && rad <= max_radius) continue;
      // a small angle squeezed between two boundary segments cannot be improved
      if (ang < min_angle && rad <= max_radius) {
        bool corner = false;
        for (int k = 0; k < 3; ++k) {
          const int v = tr.v[k], p = tr.v[(k + 1) % 3], q = tr.v[(k + 2) % 3];
          if (B.is_segment(v, p) && B.is_segment(v, q)) {
            const double a_k = std::abs(std::atan2(wedge(B.P(p) - B.P(v), B.P(q) - B.P(v)),
                                                   dot(B.P(p) - B.P(v), B.P(q) - B.P(v))));
            if (a_k <= ang + 1e-12) corner = true;
          }
        }
        if (corner) continue;
      }
      int bt = -1, bi = -1;
      const int loc = B.locate(cc, static_cast<int>(t), &bt, &bi);
      if (loc < 0) {
        const auto& btr = B.tris[bt];
        B.split_segment(btr.v[(bi + 1) % 3], btr.v[(bi + 2) % 3]);
      } else {
        auto cav = B.cavity(cc, loc);
        std::vector<std::pair<int, int>> hit;
        for (const auto& e : B.cavity_boundary(cav))
          if (B.is_segment(e.a, e.b) && encroached(e.a, e.b, cc)) hit.emplace_back(e.a, e.b);
        if (!hit.empty()) {
          for (auto [a, b] : hit)
            if (B.is_segment(a, b)) B.split_segment(a, b);
        } else {
          B.make_star(cc, cav, loc, 0);
          const int v = B.add_point(cc);
          B.retriangulate(v, cav, 0);
        }
      }
      changed = true;
      if (++inserted > cap) fail(ErrorCode::MeshFailure, "refinement exceeded the insertion cap");
      split_encroached_segments();
    }
  }

  // compact
  TriMesh mesh;
  mesh.h = h;
  std::vector<int> remap(B.pts.size(), -1);
  for (std::size_t v = 3; v < B.pts.size(); ++v) {
    if (B.vtri[v] < 0 || !B.tris[B.vtri[v]].alive) continue;
    remap[v] = static_cast<int>(mesh.vertices.size());
    mesh.vertices.push_back(B.pts[v]);
  }
  for (const auto& tr : B.tris) {
    if (!tr.alive) continue;
    mesh.triangles.push_back({remap[tr.v[0]], remap[tr.v[1]], remap[tr.v[2]]});
  }
  int a = first_bnd;
  do {
    mesh.boundary_loop.push_back(remap[a]);
    mesh.boundary_param.push_back(B.tparam[a]);
    a = B.next_bnd[a];
  } while (a != first_bnd);
  for (int v : mesh.boundary_loop)
    if (v < 0) fail(ErrorCode::MeshFailure, "boundary vertex lost");
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t)
    if (!(mesh.triangle_area(t) > 0)) fail(ErrorCode::MeshFailure, "inverted triangle");
  mesh.quality = mesh.min_angle_degrees();
  return mesh;
}

// ---------------------------------------------------------------------------
// point location

Barycentric barycentric(const TriMesh& mesh, int t, cd x) {
  const auto& tr = mesh.triangles[t];
  const cd a = mesh.vertices[tr[0]], b = mesh.vertices[tr[1]], c = mesh.vertices[tr[2]];
  const double A = wedge(b - a, c - a);
  Barycentric out;
  out.triangle = t;
  out.weights = {wedge(b - x, c - x) / A, wedge(c - x, a - x) / A, wedge(a - x, b - x) / A};
  return out;
}

MeshLocator::MeshLocator(const TriMesh& mesh, std::size_t n) : mesh_(&mesh) {
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (cd p : mesh.vertices) {
    xmin = std::min(xmin, p.real());
    xmax = std::max(xmax, p.real());
    ymin = std::min(ymin, p.imag());
    ymax = std::max(ymax, p.imag());
  }
  if (n == 0) n = std::max<std::size_t>(8, static_cast<std::size_t>(std::sqrt(static_cast<double>(mesh.triangles.size()) / 2.0)));
  nx_ = ny_ = n;
  const double pad = 1e-9 * std::max(xmax - xmin, ymax - ymin);
  x0_ = xmin - pad;
  y0_ = ymin - pad;
  dx_ = (xmax - xmin + 2 * pad) / nx_;
  dy_ = (ymax - ymin + 2 * pad) / ny_;
  buckets_.resize(nx_ * ny_);
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    double bx0 = 1e300, bx1 = -1e300, by0 = 1e300, by1 = -1e300;
    for (int v : mesh.triangles[t]) {
      const cd p = mesh.vertices[v];
      bx0 = std::min(bx0, p.real());
      bx1 = std::max(bx1, p.real());
      by0 = std::min(by0, p.imag());
      by1 = std::max(by1, p.imag());
    }
    const auto i0 = static_cast<std::size_t>(std::clamp((bx0 - x0_) / dx_, 0.0, nx_ - 1.0));
    const auto i1 = static_cast<std::size_t>(std::clamp((bx1 - x0_) / dx_, 0.0, nx_ - 1.0));
    const auto j0 = static_cast<std::size_t>(std::clamp((by0 - y0_) / dy_, 0.0, ny_ - 1.0));
    const auto j1 = static_cast<std::size_t>(std::clamp((by1 - y0_) / dy_, 0.0, ny_ - 1.0));
    for (std::size_t j = j0; j <= j1; ++j)
      for (std::size_t i = i0; i <= i1; ++i) buckets_[j * nx_ + i].push_back(static_cast<int>(t));
  }
}

std::size_t MeshLocator::bucket(double x, double y) const {
  const auto i = static_cast<std::size_t>(std::clamp((x - x0_) / dx_, 0.0, nx_ - 1.0));
  const auto j = static_cast<std::size_t>(std::clamp((y - y0_) / dy_, 0.0, ny_ - 1.0));
  return j * nx_ + i;
}

std::optional<Barycentric> MeshLocator::locate(cd x) const {
  if (x.real() < x0_ || x.imag() < y0_ || x.real() > x0_ + nx_ * dx_ || x.imag() > y0_ + ny_ * dy_) return std::nullopt;
  for (int t : buckets_[bucket(x.real(), x.imag())]) {
    auto b = barycentric(*mesh_, t, x);
    if (b.weights[0] >= -1e-12 && b.weights[1] >= -1e-12 && b.weights[2] >= -1e-12) return b;
  }
  return std::nullopt;
}

Barycentric MeshLocator::locate_or_nearest(cd x) const {
  if (auto b = locate(x)) return *b;
  // nearest point over triangles in growing rings of buckets
  const auto bi = bucket(x.real(), x.imag());
  const long ci = static_cast<long>(bi % nx_), cj = static_cast<long>(bi / nx_);
  double best = 1e300;
  Barycentric out;
  for (long ring = 0; ring < static_cast<long>(std::max(nx_, ny_)); ++ring) {
    for (long j = cj - ring; j <= cj + ring; ++j)
      for (long i = ci - ring; i <= ci + ring; ++i) {
        if (i < 0 || j < 0 || i >= static_cast<long>(nx_) || j >= static_cast<long>(ny_)) continue;
        if (std::max(std::abs(i - ci), std::abs(j - cj)) != ring) continue;
        for (int t : buckets_[j * nx_ + i]) {
          auto b = barycentric(*mesh_, t, x);
          for (auto& w : b.weights) w = std::max(w, 0.0);
          const double s = b.weights[0] + b.weights[1] + b.weights[2];
          for (auto& w : b.weights) w /= s;
          const auto& tr = mesh_->triangles[t];
          const cd y = b.weights[0] * mesh_->vertices[tr[0]] + b.weights[1] * mesh_->vertices[tr[1]] +
                       b.weights[2] * mesh_->vertices[tr[2]];
          const double d = std::abs(y - x);
          if (d < best) {
            best = d;
            out = b;
          }
        }
      }
    if (best < 1e300 && ring >= 1) break;
  }
  if (out.triangle < 0) fail(ErrorCode::MeshFailure, "point location on an empty mesh");
  return out;
}

cd MeshLocator::interpolate(std::span<const cd> values, cd x) const {
  const auto b = locate_or_nearest(x);
  const auto& tr = mesh_->triangles[b.triangle];
  return b.weights[0] * values[tr[0]] + b.weights[1] * values[tr[1]] + b.weights[2] * values[tr[2]];
}

double MeshLocator::interpolate(std::span<const double> values, cd x) const {
  const auto b = locate_or_nearest(x);
  const auto& tr = mesh_->triangles[b.triangle];
  return b.weights[0] * values[tr[0]] + b.weights[1] * values[tr[1]] + b.weights[2] * values[tr[2]];
}

}  // namespace gluni
