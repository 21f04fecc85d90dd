#include "gluni/frame_flow.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <random>

#include "gluni/curves.hpp"
#include "gluni/error.hpp"
#include "gluni/parallel.hpp"

namespace gluni {

std::string to_string(FrameSource s) { return s == FrameSource::conformal ? "from-conformal" : "from-GL"; }

cd FrameField::velocity_s(cd x) const {
  if (x_s) return x_s(x);
  return std::exp(phi(x)) * v(x);
}

cd FrameField::velocity_theta(cd x) const {
  if (x_theta) return x_theta(x);
  return std::exp(phi(x)) * u(x);
}

// ---------------------------------------------------------------------------
// frames

FrameField frame_from_conformal(const ConformalMap& f) {
  FrameField fr;
  fr.source = FrameSource::conformal;
  fr.a = f(0.0);
  fr.map = f;
  auto zfp = [f](cd x) {
    const cd z = f.inverse(x);
    return z * f.derivative(z);
  };
  fr.u = [zfp](cd x) {
    const cd w = I * zfp(x);
    return w / std::abs(w);
  };
  fr.phi = [zfp](cd x) { return std::log(std::abs(zfp(x))); };
  fr.x_s = zfp;
  fr.x_theta = [zfp](cd x) { return I * zfp(x); };
  fr.chart = [f](double r, double th) { return f(std::polar(r, th)); };
  const std::size_t n = 4096;
  fr.boundary.resize(n);
  for (std::size_t j = 0; j < n; ++j) fr.boundary[j] = f(std::exp(I * (two_pi * j / n)));
  fr.core_radius = 0.0;
  return fr;
}

FrameField frame_from_gl(const TriMesh& mesh, const GLSolution& sol, cd a, GLFrameInfo* info, double core_factor) {
  const std::size_t nv = mesh.n_vertices();
  if (sol.field.values.size() != nv) fail(ErrorCode::InvalidArgument, "solution does not match the mesh");
  auto ops = std::make_shared<FemOperators>(mesh);
  const auto& u0 = sol.field.values;
  const auto bmask = mesh.boundary_mask();
  const double core = core_factor * sol.eps;

  GLFrameInfo local;
  GLFrameInfo& inf = info ? *info : local;
  std::vector<cd> bvals;
  for (int v : mesh.boundary_loop) bvals.push_back(u0[v]);
  inf.degree = degree_of_samples(bvals);
  if (inf.degree != 0 && inf.degree != 1) fail(ErrorCode::InvalidArgument, "GL frames need degree 0 or 1 data");
  const bool singular = inf.degree == 1;

  inf.min_modulus_outside_core = 1e300;
  for (std::size_t v = 0; v < nv; ++v) {
    if (singular && std::abs(mesh.vertices[v] - a) <= core) continue;
    inf.min_modulus_outside_core = std::min(inf.min_modulus_outside_core, std::abs(u0[v]));
  }
  if (inf.min_modulus_outside_core < 0.5)
    fail(ErrorCode::ModulusTooSmall, "|u| < 1/2 outside the excluded core");

  // one Jacobi pass of the discrete Laplacian on interior vertices
  const auto& K = ops->stiffness();
  std::vector<cd> off(nv, 0.0);
  std::vector<double> diag(nv, 0.0);
  for (Eigen::Index k = 0; k < K.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(K, k); it; ++it) {
      if (it.row() == it.col()) diag[it.row()] = it.value();
      else off[it.row()] += it.value() * u0[it.col()];
    }
  auto w = std::make_shared<std::vector<cd>>(nv);
  for (std::size_t v = 0; v < nv; ++v) {
    cd s = bmask[v] || diag[v] == 0.0 ? u0[v] : -off[v] / diag[v];
    const double m = std::abs(s);
    (*w)[v] = m > 1e-12 ? s / m : cd{1.0};
  }

  const double gc = singular ? 1.0 : 0.0;
  inf.mu = mu_decomposition(*ops, *w, a, singular ? core : 0.0, std::numeric_limits<double>::infinity(), gc);
  auto phi_vals = std::make_shared<std::vector<double>>(nv);
  for (std::size_t v = 0; v < nv; ++v) (*phi_vals)[v] = inf.mu.mu[v] + gc * inf.mu.green.regular[v];

  auto loc = std::make_shared<MeshLocator>(mesh);
  const double R = mesh.boundary_distance(a);
  if (singular) {
    // Phi - ln|x - a| -> 0 at the pole, which makes the theta period 2 pi.
    // mu + h is harmonic, so its value at a is the mean over a circle outside the core.
    const double rc = std::min(2.0 * core, 0.5 * R);
    const std::size_t n = 256;
    double mean = 0.0;
    for (std::size_t j = 0; j < n; ++j) mean += loc->interpolate(*phi_vals, a + std::polar(rc, two_pi * j / n));
    mean /= n;
    for (auto& p : *phi_vals) p -= mean;
  }
  FrameField fr;
  fr.source = FrameSource::gl;
  fr.a = a;
  fr.green_coefficient = gc;
  fr.u = [loc, w](cd x) {
    const cd s = loc->interpolate(*w, x);
    const double m = std::abs(s);
    return m > 1e-12 ? s / m : cd{1.0};
  };
  fr.phi = [loc, phi_vals, a, gc](cd x) {
    double p = loc->interpolate(*phi_vals, x);
    if (gc != 0.0) p += gc * std::log(std::abs(x - a));
    return p;
  };
  fr.chart = [a, R](double r, double th) { return a + std::polar(r * R, th); };
  fr.boundary = mesh.boundary_polyline();
  fr.core_radius = singular ? core : 0.0;
  return fr;
}

// ---------------------------------------------------------------------------
// Cartan identity

namespace {

// fourth-order central difference of g at 0
template <class G>
auto diff4(const G& g, double h) {
  return (g(-2 * h) - 8.0 * g(-h) + 8.0 * g(h) - g(2 * h)) / (12.0 * h);
}

struct FormSample {
  cd star_omega;  // *omega as a vector x + i y
  cd grad_phi;
  cd omega;       // omega as a vector
};

FormSample forms_at(const FrameField& fr, cd x, double h) {
  const cd u0 = fr.u(x);
  const cd ux = diff4([&](double t) { return fr.u(x + t); }, h);
  const cd uy = diff4([&](double t) { return fr.u(x + I * t); }, h);
  const double n = std::norm(u0);
  const double wx = (ux * std::conj(u0)).imag() / n, wy = (uy * std::conj(u0)).imag() / n;
  const double px = diff4([&](double t) { return fr.phi(x + t); }, h);
  const double py = diff4([&](double t) { return fr.phi(x + I * t); }, h);
  return {cd{wy, -wx}, cd{px, py}, cd{wx, wy}};
}

}  // namespace

nlohmann::json CartanReport::to_json() const {
  return {{"max_residual", max_residual}, {"loop_integral", loop_integral}, {"loop_error", loop_error},
          {"grid", {n_r, n_theta}}};
}

CartanReport cartan_identity_check(const FrameField& fr, std::size_t n_r, std::size_t n_theta, double r_min,
                                   double r_max) {
  if (!fr.chart) fail(ErrorCode::InvalidArgument, "frame has no chart");
  CartanReport rep;
  rep.n_r = n_r;
  rep.n_theta = n_theta;
  std::vector<double> row_max(n_r, 0.0);
  parallel_for(n_r, [&](std::size_t i) {
    const double r = n_r == 1 ? r_min : r_min + (r_max - r_min) * static_cast<double>(i) / (n_r - 1);
    for (std::size_t j = 0; j < n_theta; ++j) {
      const cd x = fr.chart(r, two_pi * j / n_theta);
      const double h = 1e-3 * std::min(1.0, std::abs(x - fr.a));
      const auto s = forms_at(fr, x, h);
      row_max[i] = std::max(row_max[i], std::abs(s.star_omega - s.grad_phi));
    }
  });
  rep.max_residual = *std::max_element(row_max.begin(), row_max.end());

  // loop integral of omega on the chart circle of radius 1/2
  const std::size_t n = 1024;
  double loop = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double t0 = two_pi * j / n, t1 = two_pi * (j + 1) / n;
    const cd xm = fr.chart(0.5, 0.5 * (t0 + t1));
    // midpoint rule in the chart angle
    const double h = 1e-3 * std::min(1.0, std::abs(xm - fr.a));
    const auto om = forms_at(fr, xm, h).omega;
    // tangent by differentiating the chart
    const cd tangent = diff4([&](double t) { return fr.chart(0.5, 0.5 * (t0 + t1) + t); }, 1e-4);
    loop += dot(om, tangent) * (t1 - t0);
  }
  rep.loop_integral = loop;
  rep.loop_error = loop - two_pi * fr.green_coefficient;
  return rep;
}

// ---------------------------------------------------------------------------
// flows

namespace {

using Field = std::function<cd(cd)>;

cd rk4(const Field& F, cd x, double h) {
  const cd k1 = F(x);
  const cd k2 = F(x + 0.5 * h * k1);
  const cd k3 = F(x + 0.5 * h * k2);
  const cd k4 = F(x + h * k3);
  return x + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

class Stepper {
 public:
  Stepper(Field F, double tol, std::size_t max_steps) : F_(std::move(F)), tol_(tol), max_steps_(max_steps) {}

  // One accepted adaptive step of signed size at most |t_end - t|; updates x, t and the suggested h.
  void step(cd& x, double& t, double& h, double t_end) {
    const double dir = t_end >= t ? 1.0 : -1.0;
    for (;;) {
      if (++count_ > max_steps_) fail(ErrorCode::NoReturn, "flow integration exceeded the step budget");
      double hs = dir * std::min(std::abs(h), std::abs(t_end - t));
      const cd full = rk4(F_, x, hs);
      const cd half = rk4(F_, rk4(F_, x, 0.5 * hs), 0.5 * hs);
      const double err = std::abs(half - full) / 15.0;
      const double scale = err > 0 ? 0.9 * std::pow(tol_ / err, 0.2) : 4.0;
      if (err <= tol_ || std::abs(hs) < 1e-12) {
        x = half + (half - full) / 15.0;
        t += hs;
        if (std::abs(t_end - t) < 1e-14) t = t_end;
        h = dir * std::abs(hs) * std::clamp(scale, 0.2, 4.0);
        return;
      }
      h = dir * std::abs(hs) * std::clamp(scale, 0.1, 0.9);
    }
  }

  cd advance(cd x, double t0, double t1, double& h, const std::function<void(cd)>& guard = {}) {
    double t = t0;
    if (h == 0.0) h = (t1 - t0) / 16.0;
    while (t != t1) {
      step(x, t, h, t1);
      if (guard) guard(x);
    }
    return x;
  }

  const Field& field() const { return F_; }

 private:
  Field F_;
  double tol_;
  std::size_t max_steps_;
  std::size_t count_ = 0;
};

}  // namespace

nlohmann::json FlowResult::to_json() const {
  nlohmann::json grid = nlohmann::json::array();
  for (const auto& row : psi) {
    nlohmann::json r = nlohmann::json::array();
    for (cd p : row) r.push_back({p.real(), p.imag()});
    grid.push_back(r);
  }
  return {{"rho", rho},
          {"return_error", return_error},
          {"closure_error", closure_error},
          {"commutator_error", commutator_error},
          {"tolerance", tolerance},
          {"accepted", accepted},
          {"anchor", {anchor.real(), anchor.imag()}},
          {"a", {a.real(), a.imag()}},
          {"s", s},
          {"theta", theta},
          {"psi", grid}};
}

FlowResult integrate_flow(const FrameField& fr, const FlowOptions& opt) {
  if (fr.boundary.size() < 3) fail(ErrorCode::InvalidArgument, "frame has no boundary samples");
  if (opt.n_s < 2 || opt.n_theta < 8) fail(ErrorCode::InvalidArgument, "flow grid too small");
  if (!(opt.sigma_min < 0)) fail(ErrorCode::InvalidArgument, "sigma_min must be negative");
  FlowResult out;
  out.a = fr.a;
  out.tolerance = opt.tolerance;

  // anchor: boundary sample whose direction from a is closest to angle 0
  std::size_t best = 0;
  for (std::size_t k = 1; k < fr.boundary.size(); ++k)
    if (std::abs(std::arg(fr.boundary[k] - fr.a)) < std::abs(std::arg(fr.boundary[best] - fr.a))) best = k;
  const cd x0 = fr.boundary[best];
  out.anchor = x0;

  Field Ft = [&fr](cd x) { return fr.velocity_theta(x); };
  Field Fs = [&fr](cd x) { return fr.velocity_s(x); };
  auto guard = [&fr](cd x) {
    if (std::abs(x - fr.a) < fr.core_radius)
      fail(ErrorCode::CoreReached, "trajectory entered the core around the singularity");
  };

  // theta-flow once around: first crossing of the anchor ray after a full turn
  {
    Stepper st(Ft, opt.step_tol, opt.max_steps);
    cd x = x0;
    double t = 0.0, h = 0.05, angle = 0.0;
    const double limit = 2.0 * two_pi * 4.0;  // generous multiple of the expected period
    for (;;) {
      const cd xp = x;
      const double tp = t;
      st.step(x, t, h, limit);
      const double dang = std::arg((x - fr.a) / (xp - fr.a));
      if (angle + dang >= two_pi) {
        // bisection on the sub-step hitting angle 2 pi
        double lo = 0.0, hi = t - tp;
        for (int it = 0; it < 60; ++it) {
          const double mid = 0.5 * (lo + hi);
          double hh = mid;
          const cd xm = Stepper(Ft, opt.step_tol * 1e-2, opt.max_steps).advance(xp, 0.0, mid, hh);
          (angle + std::arg((xm - fr.a) / (xp - fr.a)) >= two_pi ? hi : lo) = mid;
        }
        out.rho = tp + 0.5 * (lo + hi);
        double hh = 0.5 * (lo + hi);
        const cd xr = Stepper(Ft, opt.step_tol * 1e-2, opt.max_steps).advance(xp, 0.0, 0.5 * (lo + hi), hh);
        out.return_error = std::abs(xr - x0);
        break;
      }
      angle += dang;
      if (t >= limit) fail(ErrorCode::NoReturn, "theta orbit does not return to the anchor");
    }
  }
  if (out.return_error > opt.return_tol) fail(ErrorCode::NoReturn, "theta orbit misses the anchor");

  const double rho = out.rho;
  const std::size_t nt = opt.n_theta, ns = opt.n_s;
  out.theta.resize(nt);
  for (std::size_t j = 0; j < nt; ++j) out.theta[j] = rho * static_cast<double>(j) / nt;
  const double s_min = rho / two_pi * opt.sigma_min;
  out.s.resize(ns);
  for (std::size_t k = 0; k < ns; ++k) out.s[k] = s_min * static_cast<double>(k) / (ns - 1);

  // boundary points along the theta-flow
  std::vector<cd> start(nt);
  {
    Stepper st(Ft, opt.step_tol, opt.max_steps);
    cd x = x0;
    double h = 0.0;
    start[0] = x0;
    for (std::size_t j = 1; j < nt; ++j) {
      x = st.advance(x, out.theta[j - 1], out.theta[j], h);
      start[j] = x;
    }
  }
  // s-flows inward
  out.psi.assign(ns, std::vector<cd>(nt));
  out.psi_s.assign(ns, std::vector<cd>(nt));
  parallel_for(nt, [&](std::size_t j) {
    Stepper st(Fs, opt.step_tol, opt.max_steps);
    cd x = start[j];
    double h = 0.0;
    out.psi[0][j] = x;
    for (std::size_t k = 1; k < ns; ++k) {
      x = st.advance(x, out.s[k - 1], out.s[k], h, guard);
      out.psi[k][j] = x;
    }
    for (std::size_t k = 0; k < ns; ++k) out.psi_s[k][j] = fr.velocity_s(out.psi[k][j]);
  });
  // theta-first at each level: closure after one period and agreement with the grid
  std::vector<double> clos(ns, 0.0), comm(ns, 0.0);
  parallel_for(ns, [&](std::size_t k) {
    Stepper st(Ft, opt.step_tol, opt.max_steps);
    cd x = out.psi[k][0];
    double h = 0.0;
    for (std::size_t j = 1; j <= nt; ++j) {
      const double t1 = j < nt ? out.theta[j] : rho;
      x = st.advance(x, out.theta[j - 1], t1, h);
      if (j < nt) comm[k] = std::max(comm[k], std::abs(x - out.psi[k][j]));
    }
    clos[k] = std::abs(x - out.psi[k][0]);
  });
  out.closure_error = *std::max_element(clos.begin(), clos.end());
  out.commutator_error = *std::max_element(comm.begin(), comm.end());
  out.accepted = out.closure_error <= opt.tolerance;
  return out;
}

// ---------------------------------------------------------------------------
// reconstruction

nlohmann::json Reconstruction::to_json() const {
  nlohmann::json c = nlohmann::json::array();
  for (cd v : coefficients) c.push_back({v.real(), v.imag()});
  return {{"coefficients", c}, {"cr_residual", cr_residual}, {"fit_residual", fit_residual}};
}

Reconstruction reconstruct_map(const FlowResult& flow, std::size_t n_coef, double cr_tol) {
  if (!flow.accepted) fail(ErrorCode::InvalidArgument, "flow was not accepted");
  const std::size_t ns = flow.s.size(), nt = flow.theta.size();
  const double scale = flow.rho / two_pi;
  const double ds = flow.s[1] - flow.s[0];  // negative

  // cubic Hermite in s at fixed theta index
  auto psi_at = [&](double s, std::size_t j) {
    double x = s / ds;  // fractional index
    auto k = static_cast<std::size_t>(std::floor(x));
    if (k >= ns - 1) k = ns - 2;
    const double t = x - static_cast<double>(k);
    const cd p0 = flow.psi[k][j], p1 = flow.psi[k + 1][j];
    const cd m0 = flow.psi_s[k][j] * ds, m1 = flow.psi_s[k + 1][j] * ds;
    const double t2 = t * t, t3 = t2 * t;
    return (2 * t3 - 3 * t2 + 1) * p0 + (t3 - 2 * t2 + t) * m0 + (-2 * t3 + 3 * t2) * p1 + (t3 - t2) * m1;
  };

  const std::vector<double> radii{0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};
  for (double r : radii)
    if (scale * std::log(r) < flow.s.back() - 1e-12)
      fail(ErrorCode::InvalidArgument, "flow grid does not reach the fitting circles");
  const int N = static_cast<int>(std::min<std::size_t>(n_coef, nt / 2 - 1));
  std::vector<cd> num(N + 1, 0.0);
  std::vector<double> den(N + 1, 0.0);
  double neg = 0.0, pos = 0.0;
  for (double r : radii) {
    std::vector<cd> w(nt);
    for (std::size_t j = 0; j < nt; ++j) w[j] = psi_at(scale * std::log(r), j);
    for (int n = -N; n <= N; ++n) {
      cd c = 0.0;
      for (std::size_t j = 0; j < nt; ++j) c += w[j] * std::exp(-I * (n * two_pi * j / nt));
      c /= static_cast<double>(nt);
      if (n >= 0) {
        num[n] += std::pow(r, n) * c;
        den[n] += std::pow(r, 2 * n);
        pos += std::norm(c);
      } else {
        neg += std::norm(c);
      }
    }
  }
  std::vector<cd> coef(N + 1);
  for (int n = 0; n <= N; ++n) coef[n] = num[n] / den[n];
  // rotation gauge: f'(0) > 0
  const double alpha = -std::arg(coef[1]);
  for (int n = 0; n <= N; ++n) coef[n] *= std::exp(I * (n * alpha));

  Reconstruction rec;
  rec.fit_residual = std::sqrt(neg / std::max(pos, 1e-300));
  // Cauchy-Riemann in log-polar grid coordinates: d_theta psi = i d_s psi
  double worst = 0.0, sref = 0.0;
  const double dth = flow.theta[1] - flow.theta[0];
  for (std::size_t k = 0; k < ns; ++k) {
    for (std::size_t j = 0; j < nt; ++j) {
      auto at = [&](long jj) { return flow.psi[k][static_cast<std::size_t>((jj % static_cast<long>(nt) + nt) % nt)]; };
      const long jl = static_cast<long>(j);
      const cd pt = (at(jl - 2) - 8.0 * at(jl - 1) + 8.0 * at(jl + 1) - at(jl + 2)) / (12.0 * dth);
      cd psd;
      if (k >= 2 && k + 2 < ns) {
        psd = (flow.psi[k - 2][j] - 8.0 * flow.psi[k - 1][j] + 8.0 * flow.psi[k + 1][j] - flow.psi[k + 2][j]) /
              (12.0 * ds);
      } else {
        continue;
      }
      worst = std::max(worst, std::abs(pt - I * psd));
      sref = std::max(sref, std::abs(psd));
    }
  }
  rec.cr_residual = sref > 0 ? worst / sref : 0.0;
  rec.coefficients = coef;
  rec.map = ConformalMap::taylor(coef);
  if (rec.cr_residual > cr_tol) fail(ErrorCode::HolomorphyFailure, "reconstructed map fails Cauchy-Riemann");
  return rec;
}

// ---------------------------------------------------------------------------
// Liouville relation

double liouville_residual(const FrameField& fr, const ConformalMap& f, double r, std::size_t n_theta) {
  auto ut = [&](double rr, double th) { return fr.u(f(std::polar(rr, th))); };
  auto mut = [&](double rr, double th) {
    return fr.phi(f(std::polar(rr, th))) - fr.green_coefficient * std::log(rr);
  };
  const double h = std::min(1e-3, 0.2 * (1.0 - r));
  double worst = 0.0;
  for (std::size_t j = 0; j < n_theta; ++j) {
    const double th = two_pi * j / n_theta;
    const double mu_r = diff4([&](double t) { return mut(r + t, th); }, h);
    const cd u0 = ut(r, th);
    const cd du = diff4([&](double t) { return ut(r, th + t); }, 1e-3);
    const double phase = dot(du, I * u0) / std::norm(u0);
    worst = std::max(worst, std::abs(r * mu_r - (phase - fr.green_coefficient)));
  }
  return worst;
}

}  // namespace gluni
