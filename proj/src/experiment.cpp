#include "gluni/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "gluni/error.hpp"
#include "gluni/parallel.hpp"
#include "gluni/renorm.hpp"
#include "gluni/svg.hpp"

namespace gluni {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json pair_of(cd z) { return json::array({z.real(), z.imag()}); }

// Strict reader over one JSON object; remembers which keys were consumed.
class Fields {
 public:
  Fields(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_.empty() ? "<root>" : path_, "expected an object");
  }

  [[nodiscard]] std::string at(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
  [[nodiscard]] bool has(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key);
  }
  [[nodiscard]] const json& raw(const std::string& key) {
    seen_.insert(key);
    return j_.at(key);
  }

  double number(const std::string& key, double fallback) {
    if (!has(key)) return fallback;
    const auto& v = j_.at(key);
    if (!v.is_number()) throw ConfigError(at(key), "expected a number");
    return v.get<double>();
  }
  long long integer(const std::string& key, long long fallback) {
    if (!has(key)) return fallback;
    const auto& v = j_.at(key);
    if (!v.is_number_integer()) throw ConfigError(at(key), "expected an integer");
    return v.get<long long>();
  }
  std::size_t count(const std::string& key, std::size_t fallback) {
    const auto v = integer(key, static_cast<long long>(fallback));
    if (v < 0) throw ConfigError(at(key), "must be non-negative");
    return static_cast<std::size_t>(v);
  }
  bool boolean(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    const auto& v = j_.at(key);
    if (!v.is_boolean()) throw ConfigError(at(key), "expected true or false");
    return v.get<bool>();
  }
  std::string string(const std::string& key, const std::string& fallback) {
    if (!has(key)) return fallback;
    const auto& v = j_.at(key);
    if (!v.is_string()) throw ConfigError(at(key), "expected a string");
    return v.get<std::string>();
  }
  cd complex(const std::string& key, cd fallback) {
    if (!has(key)) return fallback;
    return complex_value(j_.at(key), at(key));
  }
  std::vector<double> numbers(const std::string& key, std::vector<double> fallback) {
    if (!has(key)) return fallback;
    const auto& v = j_.at(key);
    if (!v.is_array()) throw ConfigError(at(key), "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number()) throw ConfigError(at(key) + "[" + std::to_string(i) + "]", "expected a number");
      out.push_back(v[i].get<double>());
    }
    return out;
  }

  static cd complex_value(const json& v, const std::string& path) {
    if (v.is_number()) return {v.get<double>(), 0.0};
    if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
      return {v[0].get<double>(), v[1].get<double>()};
    throw ConfigError(path, "expected a number or a [re, im] pair");
  }

  void finish() const {
    for (const auto& [k, v] : j_.items())
      if (!seen_.count(k)) throw ConfigError(at(k), "unknown field");
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

const std::set<std::string> kDomains{"disk", "taylor", "mobius", "square", "log_spiral"};
const std::set<std::string> kData{"tangential", "power"};

std::string join(const std::set<std::string>& s) {
  std::string out;
  for (const auto& x : s) out += (out.empty() ? "" : ", ") + x;
  return out;
}

DomainSpec parse_domain(const json& j) {
  Fields f(j, "domain");
  DomainSpec d;
  d.kind = f.string("kind", "");
  if (!kDomains.count(d.kind))
    throw ConfigError("domain.kind", "unknown catalog name '" + d.kind + "'; expected one of " + join(kDomains));
  if (d.kind == "taylor") {
    if (!f.has("coefficients")) throw ConfigError("domain.coefficients", "required for taylor domains");
    const auto& c = f.raw("coefficients");
    if (!c.is_array() || c.size() < 2) throw ConfigError("domain.coefficients", "expected at least two coefficients");
    for (std::size_t i = 0; i < c.size(); ++i)
      d.coefficients.push_back(Fields::complex_value(c[i], "domain.coefficients[" + std::to_string(i) + "]"));
    if (std::abs(d.coefficients[1]) == 0) throw ConfigError("domain.coefficients[1]", "derivative at 0 must be nonzero");
  } else if (d.kind == "mobius") {
    d.omega = f.complex("omega", 0.0);
    d.theta = f.number("theta", 0.0);
    if (!(std::abs(d.omega) < 1)) throw ConfigError("domain.omega", "must lie in the open unit disk");
  } else if (d.kind == "square") {
    d.side = f.number("side", 2.0);
    if (!(d.side > 0)) throw ConfigError("domain.side", "must be positive");
  } else if (d.kind == "log_spiral") {
    d.t_min = f.number("t_min", 0.05);
    d.smoothing = f.number("smoothing", 0.02);
    if (!(d.t_min > 0 && d.t_min < std::exp(-1.0))) throw ConfigError("domain.t_min", "must lie in (0, 1/e)");
    if (!(d.smoothing >= 0)) throw ConfigError("domain.smoothing", "must be non-negative");
  }
  f.finish();
  return d;
}

DataSpec parse_data(const json& j) {
  Fields f(j, "data");
  DataSpec d;
  d.kind = f.string("kind", "tangential");
  if (!kData.count(d.kind))
    throw ConfigError("data.kind", "unknown data kind '" + d.kind + "'; expected one of " + join(kData));
  if (d.kind == "power") {
    d.degree = static_cast<int>(f.integer("degree", 1));
    d.phase = f.number("phase", 0.0);
    d.amp = f.number("amp", 0.0);
    d.freq = static_cast<int>(f.integer("freq", 1));
  }
  f.finish();
  return d;
}

GLConfig parse_gl(const json& j) {
  Fields f(j, "gl");
  GLConfig c;
  c.eps_schedule = f.numbers("eps_schedule", c.eps_schedule);
  c.max_iters = f.count("max_iters", c.max_iters);
  c.grad_tol = f.number("grad_tol", c.grad_tol);
  c.armijo_c1 = f.number("armijo_c1", c.armijo_c1);
  c.armijo_shrink = f.number("armijo_shrink", c.armijo_shrink);
  c.restart_every = f.count("restart_every", c.restart_every);
  c.precond_power = f.number("precond_power", c.precond_power);
  const auto init = f.string("init", "harmonic");
  if (init == "harmonic")
    c.init = InitKind::harmonic_extension;
  else if (init == "prior")
    c.init = InitKind::prior_solution;
  else if (init == "canonical_seed")
    c.init = InitKind::canonical_seed;
  else
    throw ConfigError("gl.init", "expected harmonic, prior or canonical_seed");
  c.seed_center = f.complex("seed_center", c.seed_center);
  c.eta0 = f.number("eta0", c.eta0);
  c.j0 = f.count("j0", c.j0);
  c.gap_band = f.number("gap_band", c.gap_band);
  f.finish();
  try {
    c.validate();
  } catch (const ConfigError& e) {
    throw ConfigError("gl." + e.path(), e.what());
  }
  return c;
}

RenormSpec parse_renorm(const json& j) {
  Fields f(j, "renorm");
  RenormSpec r;
  r.enabled = f.boolean("enabled", r.enabled);
  r.deltas = f.numbers("deltas", r.deltas);
  for (std::size_t i = 0; i < r.deltas.size(); ++i)
    if (!(r.deltas[i] > 0 && r.deltas[i] < 1)) throw ConfigError("renorm.deltas[" + std::to_string(i) + "]", "must lie in (0, 1)");
  r.heatmap_grid = f.count("heatmap_grid", r.heatmap_grid);
  f.finish();
  return r;
}

FlowSpec default_flow() {
  // GL frames exclude a core of a few eps around the vortex; stay outside radius 1/4
  FlowSpec s;
  s.options.sigma_min = std::log(0.25);
  s.options.tolerance = 1e-2;
  s.options.return_tol = 1e-2;
  s.options.step_tol = 1e-8;
  return s;
}

FlowSpec parse_flow(const json& j) {
  Fields f(j, "flow");
  FlowSpec s = default_flow();
  s.enabled = f.boolean("enabled", s.enabled);
  s.source = f.string("source", s.source);
  if (s.source != "gl" && s.source != "conformal") throw ConfigError("flow.source", "expected gl or conformal");
  auto& o = s.options;
  o.sigma_min = f.number("sigma_min", o.sigma_min);
  o.n_s = f.count("n_s", o.n_s);
  o.n_theta = f.count("n_theta", o.n_theta);
  o.step_tol = f.number("step_tol", o.step_tol);
  o.tolerance = f.number("tolerance", o.tolerance);
  o.return_tol = f.number("return_tol", o.return_tol);
  o.max_steps = f.count("max_steps", o.max_steps);
  s.n_coefficients = f.count("n_coefficients", s.n_coefficients);
  s.cr_tol = f.number("cr_tol", s.cr_tol);
  if (!(o.sigma_min < 0)) throw ConfigError("flow.sigma_min", "must be negative");
  if (o.n_s < 2) throw ConfigError("flow.n_s", "must be at least 2");
  if (o.n_theta < 8) throw ConfigError("flow.n_theta", "must be at least 8");
  if (s.n_coefficients < 2) throw ConfigError("flow.n_coefficients", "must be at least 2");
  f.finish();
  return s;
}


std::string eps_tag(double eps) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", eps);
  return buf;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError(path, "cannot open for writing");
  out << text;
}

// Everything a stage may need, built lazily and shared across stages of one run.
struct Pipeline {
  const ExperimentConfig& cfg;
  fs::path dir;
  Domain domain;
  TriMesh mesh;
  BoundaryData data;
  std::vector<cd> bvals;
  std::optional<ContinuationResult> gl;
  std::vector<std::string> artifacts;

  Pipeline(const ExperimentConfig& c, const std::string& out)
      : cfg(c), dir(out), domain(build_domain(c.domain, c.h)), mesh(build_mesh(domain, c.h)),
        data(build_data(c.data, domain)) {
    fs::create_directories(dir);
    fs::remove(dir / "error.json");
    bvals = impose_boundary(mesh, [this](double t) { return data.value(t); });
  }

  void json_artifact(const std::string& rel, const json& j) {
    fs::create_directories((dir / rel).parent_path());
    write_json((dir / rel).string(), j);
    artifacts.push_back(rel);
  }
  void svg_artifact(const std::string& rel, const std::string& text) {
    fs::create_directories((dir / rel).parent_path());
    write_text((dir / rel).string(), text);
    artifacts.push_back(rel);
  }

  [[nodiscard]] bool degree_one() const { return degree_of_samples(bvals) == 1; }

  // Optimal vortex when the domain has a uniformization and the data is degree one.
  [[nodiscard]] std::optional<OptimalVortex> target() const {
    if (!domain.map || !degree_one()) return std::nullopt;
    return optimal_vortex(*domain.map);
  }
};

json mesh_stage(Pipeline& p) {
  p.json_artifact("mesh.json", p.mesh.to_json());
  return {{"n_vertices", p.mesh.n_vertices()},
          {"n_triangles", p.mesh.n_triangles()},
          {"n_boundary", p.mesh.boundary_loop.size()},
          {"h", p.mesh.h},
          {"max_edge", p.mesh.max_edge()},
          {"min_angle_deg", p.mesh.min_angle_degrees()},
          {"area", p.mesh.area()},
          {"boundary_degree", degree_of_samples(p.bvals)},
          {"has_uniformization", p.domain.map.has_value()}};
}

json gl_stage(Pipeline& p) {
  const auto& cfg = p.cfg;
  std::function<cd(cd)> seed;
  if (cfg.gl.init == InitKind::canonical_seed) {
    const cd a = cfg.gl.seed_center;
    if (p.domain.map && p.degree_one()) {
      auto u = std::make_shared<CanonicalHarmonicMap>(make_canonical_spec(*p.domain.map, p.data, a));
      seed = [u](cd x) { return (*u)(x); };
    } else {
      seed = [a](cd x) { return x == a ? cd{1.0} : I * (x - a) / std::abs(x - a); };
    }
  }
  p.gl = continuation(p.mesh, p.bvals, cfg.gl, seed);
  const auto& res = *p.gl;
  const FemOperators ops(p.mesh);
  json stages = json::array();
  for (std::size_t k = 0; k < res.stages.size(); ++k) {
    const auto& s = res.stages[k];
    const auto clear = boundary_clearance_check(res.reports[k], s.eps, cfg.gl.eta0);
    json summary{{"eps", s.eps},
                 {"energy", {{"total", s.energy.total}, {"dirichlet", s.energy.dirichlet}, {"potential", s.energy.potential}}},
                 {"iterations", s.iterations},
                 {"converged", s.converged},
                 {"grad_norm", s.grad_norm},
                 {"el_residual", el_residual(ops, s)},
                 {"max_modulus", max_modulus_check(s)},
                 {"resolution_warning", s.resolution_warning},
                 {"bad_disks", res.reports[k].to_json()},
                 {"clearance_pass", clear.pass}};
    const std::string tag = eps_tag(s.eps);
    json field = summary;
    field["field"] = s.field.to_json();
    p.json_artifact("fields/u_eps" + tag + ".json", field);
    p.svg_artifact("plots/modulus_eps" + tag + ".svg", plot_modulus(p.mesh, s.field.values, "|u|, eps=" + tag));
    p.svg_artifact("plots/quiver_eps" + tag + ".svg", plot_quiver(p.mesh, s.field.values, "u, eps=" + tag));
    stages.push_back(summary);
  }
  json path = json::array();
  for (const auto& centers : res.vortex_path) {
    json row = json::array();
    for (cd c : centers) row.push_back(pair_of(c));
    path.push_back(row);
  }
  json out{{"stages", stages}, {"vortex_path", path}};
  if (res.stages.size() >= 2) {
    const auto gap = log_energy_gap(res.stages, cfg.gl.gap_band);
    out["gap"] = {{"gaps", gap.gaps},
                  {"potentials", gap.potentials},
                  {"gap_spread", gap.gap_spread},
                  {"potential_ratio", gap.potential_ratio},
                  {"bounded", gap.bounded}};
  }
  const auto tgt = p.target();
  if (tgt) {
    out["target"] = pair_of(tgt->a);
    if (!res.vortex_path.empty() && res.vortex_path.back().size() == 1)
      out["target_distance"] = std::abs(res.vortex_path.back()[0] - tgt->a);
  }
  p.svg_artifact("plots/vortex_path.svg",
                 plot_vortex_path(p.mesh, res.vortex_path, cfg.gl.eps_schedule, tgt ? &tgt->a : nullptr));
  p.json_artifact("gl_summary.json", out);
  return out;
}

json skipped(const std::string& why) { return {{"status", "skipped"}, {"reason", why}}; }

json renorm_stage(Pipeline& p) {
  if (!p.cfg.renorm.enabled) return skipped("disabled in config");
  if (!p.domain.map) return skipped("domain has no uniformization in the catalog");
  if (!p.degree_one()) return skipped("boundary data is not of degree one");
  const auto& f0 = *p.domain.map;
  const bool tangential = p.cfg.data.kind == "tangential";

  RenormReport rep;
  rep.vortex = optimal_vortex(f0);
  const auto spec = make_canonical_spec(f0, p.data, rep.vortex.a);
  rep.direct = renormalized_energy_direct(spec, p.cfg.renorm.deltas);
  rep.W_formula = renormalized_energy_formula(spec);
  rep.W0 = w0(spec.f);
  rep.green_mass = -std::log(std::abs(spec.f.derivative_at_0()));
  rep.route_discrepancy = std::abs(rep.direct.W - rep.W_formula);
  json out = rep.to_json();
  out["formula_applicable"] = tangential;

  // W over a grid of singularity positions inside the domain
  const std::size_t n = p.cfg.renorm.heatmap_grid;
  if (n >= 2) {
    const auto& poly = p.domain.polyline;
    double x0 = poly[0].real(), x1 = x0, y0 = poly[0].imag(), y1 = y0;
    for (cd q : poly) {
      x0 = std::min(x0, q.real());
      x1 = std::max(x1, q.real());
      y0 = std::min(y0, q.imag());
      y1 = std::max(y1, q.imag());
    }
    const double cell = std::max(x1 - x0, y1 - y0) / n;
    std::vector<cd> pts;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) pts.push_back({x0 + (i + 0.5) * cell, y0 + (j + 0.5) * cell});
    std::vector<double> W(pts.size(), std::numeric_limits<double>::quiet_NaN());
    parallel_for(pts.size(), [&](std::size_t k) {
      cd z;
      if (!f0.try_inverse(pts[k], z) || std::abs(z) > 0.9) return;
      if (tangential)
        W[k] = renormalized_energy_formula(f0, pts[k]);
      else
        W[k] = renormalized_energy_direct(make_canonical_spec(f0, p.data, pts[k], 64), {}, 128).W;
    });
    json grid_pts = json::array(), grid_vals = json::array();
    std::size_t best = pts.size();
    for (std::size_t k = 0; k < pts.size(); ++k) {
      if (!std::isfinite(W[k])) continue;
      grid_pts.push_back(pair_of(pts[k]));
      grid_vals.push_back(W[k]);
      if (best == pts.size() || W[k] < W[best]) best = k;
    }
    out["heatmap"] = {{"route", tangential ? "formula" : "direct"}, {"points", grid_pts}, {"W", grid_vals}};
    if (best < pts.size()) out["heatmap"]["argmin"] = pair_of(pts[best]);
    p.svg_artifact("plots/W_heatmap.svg", plot_scalar_grid(poly, pts, W, cell, "W(a)"));
  }
  p.json_artifact("renorm_report.json", out);
  return {{"W_direct", rep.direct.W},
          {"W_formula", rep.W_formula},
          {"route_discrepancy", rep.route_discrepancy},
          {"formula_applicable", tangential},
          {"optimal_vortex", pair_of(rep.vortex.a)}};
}

json flow_stage(Pipeline& p) {
  const auto& spec = p.cfg.flow;
  if (!spec.enabled) return skipped("disabled in config");
  if (!p.degree_one()) return skipped("boundary data is not of degree one");
  FrameField frame;
  cd a;
  if (spec.source == "gl") {
    if (!p.gl) gl_stage(p);
    const auto& res = *p.gl;
    if (res.vortex_path.back().size() != 1) return skipped("final GL stage does not have exactly one vortex");
    a = res.vortex_path.back()[0];
    GLFrameInfo info;
    frame = frame_from_gl(p.mesh, res.stages.back(), a, &info);
  } else {
    if (!p.domain.map) return skipped("conformal frames need a uniformization");
    const auto& f0 = *p.domain.map;
    a = p.gl && p.gl->vortex_path.back().size() == 1 ? p.gl->vortex_path.back()[0] : optimal_vortex(f0).a;
    frame = frame_from_conformal(rebase(f0, f0.inverse(a)));
  }
  const auto flow = integrate_flow(frame, spec.options);
  json out = flow.to_json();
  out["source"] = spec.source;
  json summary{{"source", spec.source},
               {"a", pair_of(a)},
               {"rho", flow.rho},
               {"closure_error", flow.closure_error},
               {"commutator_error", flow.commutator_error},
               {"accepted", flow.accepted}};
  if (flow.accepted) {
    const auto rec = reconstruct_map(flow, spec.n_coefficients, spec.cr_tol);
    out["reconstruction"] = rec.to_json();
    summary["cr_residual"] = rec.cr_residual;
    if (p.domain.map) {
      // compare with the uniformization rebased at the same point
      const auto g = rebase(*p.domain.map, p.domain.map->inverse(a)).gauge_fixed();
      double dev = 0.0;
      for (double r : {0.3, 0.5, 0.8})
        for (int j = 0; j < 16; ++j) {
          const cd z = std::polar(r, two_pi * j / 16);
          dev = std::max(dev, std::abs(rec.map(z) - g(z)));
        }
      out["reconstruction"]["deviation"] = dev;
      summary["reconstruction_deviation"] = dev;
    }
  }
  p.json_artifact("flow_result.json", out);
  p.svg_artifact("plots/streamlines.svg", plot_streamlines(p.domain.polyline, flow));
  return summary;
}

template <class Stage>
json guarded(Pipeline& p, const std::string& name, Stage stage) {
  try {
    return stage(p);
  } catch (const NumericalError& e) {
    std::string msg = e.what();
    const std::string prefix = std::string(to_string(e.code())) + ": ";
    if (msg.rfind(prefix, 0) == 0) msg.erase(0, prefix.size());
    throw NumericalError(e.code(), name + " stage: " + msg);
  }
}

json manifest(const Pipeline& p, json stages) {
  auto arts = p.artifacts;
  std::sort(arts.begin(), arts.end());
  auto cfg = p.cfg.to_json();
  cfg.erase("output_dir");  // location, not content: reruns elsewhere stay byte-identical
  return {{"name", p.cfg.name}, {"status", "ok"}, {"config", cfg}, {"stages", std::move(stages)},
          {"artifacts", arts}};
}

json single(const ExperimentConfig& cfg, const std::string& dir, const std::string& name, json (*stage)(Pipeline&)) {
  Pipeline p(cfg, dir);
  json out = guarded(p, name, stage);
  p.json_artifact("manifest.json", manifest(p, {{name, out}}));
  return out;
}

}  // namespace

nlohmann::json DomainSpec::to_json() const {
  json j{{"kind", kind}};
  if (kind == "taylor") {
    json c = json::array();
    for (cd z : coefficients) c.push_back(pair_of(z));
    j["coefficients"] = c;
  } else if (kind == "mobius") {
    j["omega"] = pair_of(omega);
    j["theta"] = theta;
  } else if (kind == "square") {
    j["side"] = side;
  } else if (kind == "log_spiral") {
    j["t_min"] = t_min;
    j["smoothing"] = smoothing;
  }
  return j;
}

nlohmann::json DataSpec::to_json() const {
  json j{{"kind", kind}};
  if (kind == "power") j.update({{"degree", degree}, {"phase", phase}, {"amp", amp}, {"freq", freq}});
  return j;
}

nlohmann::json RenormSpec::to_json() const {
  return {{"enabled", enabled}, {"deltas", deltas}, {"heatmap_grid", heatmap_grid}};
}

nlohmann::json FlowSpec::to_json() const {
  return {{"enabled", enabled},
          {"source", source},
          {"sigma_min", options.sigma_min},
          {"n_s", options.n_s},
          {"n_theta", options.n_theta},
          {"step_tol", options.step_tol},
          {"tolerance", options.tolerance},
          {"return_tol", options.return_tol},
          {"max_steps", options.max_steps},
          {"n_coefficients", n_coefficients},
          {"cr_tol", cr_tol}};
}

ExperimentConfig ExperimentConfig::from_json(const nlohmann::json& j) {
  Fields f(j, "");
  ExperimentConfig c;
  c.flow = default_flow();
  c.name = f.string("name", c.name);
  if (!f.has("domain")) throw ConfigError("domain", "required");
  c.domain = parse_domain(f.raw("domain"));
  if (f.has("data")) c.data = parse_data(f.raw("data"));
  if (f.has("mesh")) {
    Fields m(f.raw("mesh"), "mesh");
    c.h = m.number("h", c.h);
    m.finish();
  }
  if (!(c.h > 0 && c.h <= 0.5)) throw ConfigError("mesh.h", "must lie in (0, 0.5]");
  if (f.has("gl")) c.gl = parse_gl(f.raw("gl"));
  if (f.has("renorm")) c.renorm = parse_renorm(f.raw("renorm"));
  if (f.has("flow")) c.flow = parse_flow(f.raw("flow"));
  c.output_dir = f.string("output_dir", c.output_dir);
  const auto seed = f.integer("seed", 0);
  if (seed < 0) throw ConfigError("seed", "must be non-negative");
  c.seed = static_cast<std::uint64_t>(seed);
  c.threads = static_cast<unsigned>(f.count("threads", 0));
  f.finish();
  return c;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path, "cannot open config file");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path, std::string("invalid JSON: ") + e.what());
  }
  return from_json(j);
}

nlohmann::json ExperimentConfig::to_json() const {
  return {{"name", name},   {"domain", domain.to_json()}, {"data", data.to_json()}, {"mesh", {{"h", h}}},
          {"gl", gl.to_json()}, {"renorm", renorm.to_json()}, {"flow", flow.to_json()},
          {"output_dir", output_dir}, {"seed", seed}, {"threads", threads}};
}

Domain build_domain(const DomainSpec& spec, double h) {
  auto from_map = [h](const ConformalMap& f) {
    f.check_injective();
    auto curve = f.boundary_curve();
    const auto n = static_cast<std::size_t>(std::ceil(1.3 * curve.length() / h));
    auto tr = boundary_trace(f, std::max<std::size_t>(n, 16));
    return Domain{std::move(curve), f, std::move(tr.polyline), std::move(tr.params)};
  };
  auto from_curve = [h](JordanCurve curve) {
    curve.check_injective();
    const auto n = static_cast<std::size_t>(std::ceil(1.3 * curve.length() / h));
    std::vector<double> params;
    auto poly = curve.equal_arclength_polyline(std::max<std::size_t>(n, 16), &params);
    return Domain{std::move(curve), std::nullopt, std::move(poly), std::move(params)};
  };
  if (spec.kind == "disk") return from_map(ConformalMap::identity());
  if (spec.kind == "taylor") return from_map(ConformalMap::taylor(spec.coefficients));
  if (spec.kind == "mobius") return from_map(mobius(spec.omega, spec.theta));
  if (spec.kind == "square") return from_curve(square_curve(spec.side));
  if (spec.kind == "log_spiral") return from_curve(log_spiral_curve(spec.t_min, spec.smoothing));
  throw ConfigError("domain.kind", "unknown catalog name '" + spec.kind + "'");
}

TriMesh build_mesh(const Domain& domain, double h) { return triangulate(domain.polyline, h, domain.params); }

BoundaryData build_data(const DataSpec& spec, const Domain& domain) {
  if (spec.kind == "power") return power_data(spec.degree, spec.phase, spec.amp, spec.freq);
  if (domain.map) return boundary_trace(*domain.map, 16).tangent;
  // corner jumps of a polygon tangent have no H^{1/2} trace; use a slightly rounded copy
  if (domain.curve.kind() == CurveKind::polyline) return tangent_data(smoothed_curve(domain.curve, 0.01));
  return tangent_data(domain.curve);
}

std::string dump_json(const nlohmann::json& j) { return j.dump(2) + "\n"; }

void write_json(const std::string& path, const nlohmann::json& j) { write_text(path, dump_json(j)); }

nlohmann::json run_mesh(const ExperimentConfig& config, const std::string& dir) {
  return single(config, dir, "mesh", mesh_stage);
}

nlohmann::json run_gl(const ExperimentConfig& config, const std::string& dir) {
  return single(config, dir, "gl", gl_stage);
}

nlohmann::json run_renorm(const ExperimentConfig& config, const std::string& dir) {
  return single(config, dir, "renorm", renorm_stage);
}

nlohmann::json run_frame_flow(const ExperimentConfig& config, const std::string& dir) {
  return single(config, dir, "flow", flow_stage);
}

nlohmann::json run_experiment(const ExperimentConfig& config, const std::string& dir) {
  Pipeline p(config, dir);
  json stages;
  stages["mesh"] = guarded(p, "mesh", mesh_stage);
  stages["gl"] = guarded(p, "gl", gl_stage);
  stages["renorm"] = guarded(p, "renorm", renorm_stage);
  stages["flow"] = guarded(p, "flow", flow_stage);
  auto m = manifest(p, stages);
  write_json((p.dir / "manifest.json").string(), m);
  return m;
}

}  // namespace gluni
