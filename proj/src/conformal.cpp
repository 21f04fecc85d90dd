#include "gluni/conformal.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <limits>
#include <mutex>

#include "gluni/error.hpp"
#include "gluni/parallel.hpp"
#include "gluni/quadrature.hpp"

namespace gluni {

// ---------------------------------------------------------------------------
// DiskAutomorphism

DiskAutomorphism::DiskAutomorphism(cd a, cd b, cd c, cd d) : m_{a, b, c, d} {
  const cd det = a * d - b * c;
  if (std::abs(det) == 0.0) fail(ErrorCode::InvalidArgument, "singular Mobius matrix");
  // keep the matrix well scaled
  const cd s = std::sqrt(det);
  for (auto& v : m_) v /= s;
}

DiskAutomorphism DiskAutomorphism::psi(cd omega, double theta) {
  if (!(std::abs(omega) < 1.0)) fail(ErrorCode::OutsideDisk, "|omega| must be < 1");
  const cd e = std::exp(I * theta);
  return {e, -e * omega, std::conj(omega), -1.0};
}

cd DiskAutomorphism::operator()(cd z) const { return (m_[0] * z + m_[1]) / (m_[2] * z + m_[3]); }

cd DiskAutomorphism::derivative(cd z) const {
  const cd den = m_[2] * z + m_[3];
  return (m_[0] * m_[3] - m_[1] * m_[2]) / (den * den);
}

cd DiskAutomorphism::second_derivative(cd z) const {
  const cd den = m_[2] * z + m_[3];
  return -2.0 * m_[2] * (m_[0] * m_[3] - m_[1] * m_[2]) / (den * den * den);
}

cd DiskAutomorphism::log_derivative_ratio(cd z) const { return -2.0 * m_[2] / (m_[2] * z + m_[3]); }

DiskAutomorphism DiskAutomorphism::inverse() const { return {m_[3], -m_[1], -m_[2], m_[0]}; }

DiskAutomorphism DiskAutomorphism::compose(const DiskAutomorphism& inner) const {
  const auto& o = m_;
  const auto& i = inner.m_;
  return {o[0] * i[0] + o[1] * i[2], o[0] * i[1] + o[1] * i[3], o[2] * i[0] + o[3] * i[2],
          o[2] * i[1] + o[3] * i[3]};
}

std::pair<cd, double> DiskAutomorphism::psi_params() const {
  const cd omega = inverse()(0.0);
  const double theta = std::arg(-derivative(omega));
  return {omega, theta};
}

bool DiskAutomorphism::is_identity(double tol) const {
  return std::abs(m_[1]) <= tol && std::abs(m_[2]) <= tol && std::abs(m_[0] - m_[3]) <= tol * std::abs(m_[0]);
}

std::string to_string(MapRepresentation r) {
  switch (r) {
    case MapRepresentation::mobius: return "mobius";
    case MapRepresentation::taylor: return "taylor";
    case MapRepresentation::composite: return "composite";
  }
  return "unknown";
}

// ---------------------------------------------------------------------------
// inverse seeding

struct InverseSeeder {
  InverseSeeder() : id(next_id++) {}
  static inline std::atomic<std::uint64_t> next_id{1};
  const std::uint64_t id;
  std::once_flag once;
  std::vector<cd> w;
  std::vector<cd> image;
};

namespace {

struct PolyEval {
  cd p, dp, ddp;
};

PolyEval horner(const std::vector<cd>& c, cd w) {
  cd p = 0.0, dp = 0.0, ddp = 0.0;
  for (std::size_t k = c.size(); k-- > 0;) {
    ddp = ddp * w + 2.0 * dp;
    dp = dp * w + p;
    p = p * w + c[k];
  }
  return {p, dp, ddp};
}

bool is_identity_poly(const std::vector<cd>& c) {
  if (c.size() < 2 || c[0] != 0.0 || c[1] != 1.0) return false;
  for (std::size_t k = 2; k < c.size(); ++k)
    if (c[k] != 0.0) return false;
  return true;
}

}  // namespace

// ---------------------------------------------------------------------------
// ConformalMap

ConformalMap::ConformalMap() : ConformalMap({0.0, 1.0}, DiskAutomorphism::identity()) {}

ConformalMap::ConformalMap(std::vector<cd> coefficients, DiskAutomorphism pre)
    : coeffs_(std::move(coefficients)), pre_(pre), seeder_(std::make_shared<InverseSeeder>()) {
  while (coeffs_.size() > 2 && coeffs_.back() == 0.0) coeffs_.pop_back();
  if (coeffs_.size() < 2) coeffs_.resize(2, 0.0);
  if (coeffs_[1] == 0.0 && coeffs_.size() == 2) fail(ErrorCode::InvalidArgument, "constant map");
}

ConformalMap ConformalMap::identity() { return {}; }

ConformalMap ConformalMap::taylor(std::vector<cd> coefficients) {
  return ConformalMap(std::move(coefficients), DiskAutomorphism::identity());
}

cd ConformalMap::operator()(cd z) const { return horner(coeffs_, pre_(z)).p; }

cd ConformalMap::derivative(cd z) const { return horner(coeffs_, pre_(z)).dp * pre_.derivative(z); }

cd ConformalMap::second_derivative(cd z) const {
  const auto e = horner(coeffs_, pre_(z));
  const cd m1 = pre_.derivative(z);
  return e.ddp * m1 * m1 + e.dp * pre_.second_derivative(z);
}

cd ConformalMap::pre_schwarzian(cd z) const {
  const auto e = horner(coeffs_, pre_(z));
  return e.ddp * pre_.derivative(z) / e.dp + pre_.log_derivative_ratio(z);
}

MapRepresentation ConformalMap::representation() const {
  if (pre_.is_identity()) return MapRepresentation::taylor;
  if (is_identity_poly(coeffs_)) return MapRepresentation::mobius;
  return MapRepresentation::composite;
}

bool ConformalMap::try_inverse(cd x, cd& z) const {
  cd w;
  if (is_identity_poly(coeffs_)) {
    w = x;
  } else if (coeffs_.size() == 2) {
    w = (x - coeffs_[0]) / coeffs_[1];
  } else {
    auto& s = *seeder_;
    std::call_once(s.once, [&] {
      const int nr = 24, nt = 64;
      for (int i = 0; i <= nr; ++i) {
        const double r = static_cast<double>(i) / nr;
        for (int j = 0; j < (i == 0 ? 1 : nt); ++j) {
          const cd ww = r * std::exp(I * (two_pi * j / nt));
          s.w.push_back(ww);
          s.image.push_back(horner(coeffs_, ww).p);
        }
      }
    });
    const double tol = 1e-14 * (1.0 + std::abs(x));
    auto newton = [&](cd w0, cd& out) {
      cd ww = w0;
      double res = std::abs(horner(coeffs_, ww).p - x);
      for (int it = 0; it < 80; ++it) {
        if (res <= tol) {
          out = ww;
          return true;
        }
        const auto e = horner(coeffs_, ww);
        if (std::abs(e.dp) < 1e-300) break;
        const cd step = (e.p - x) / e.dp;
        double lambda = 1.0;
        cd trial = ww - step;
        double trial_res = std::abs(horner(coeffs_, trial).p - x);
        while (trial_res > res && lambda > 1e-6) {
          lambda *= 0.5;
          trial = ww - lambda * step;
          trial_res = std::abs(horner(coeffs_, trial).p - x);
        }
        if (trial_res >= res && std::abs(lambda * step) < 1e-16 * (1.0 + std::abs(ww))) break;
        ww = trial;
        res = trial_res;
      }
      out = ww;
      return res <= 1e-12 * (1.0 + std::abs(x));
    };
    // warm start from this thread's previous preimage within the same task; accepted only near the closed disk
    thread_local std::uint64_t last_owner = 0, last_epoch = 0;
    thread_local cd last_w;
    bool ok = false;
    if (last_owner == s.id && last_epoch == task_epoch()) {
      cd cand;
      if (newton(last_w, cand) && std::abs(cand) <= 1.05 &&
          std::abs(cand - last_w) < 0.25) {
        w = cand;
        ok = true;
      }
    }
    if (!ok) {
      // four nearest seeds by image distance
      std::array<std::pair<double, std::size_t>, 4> best;
      best.fill({1e300, 0});
      for (std::size_t k = 0; k < s.w.size(); ++k) {
        const double d = std::abs(s.image[k] - x);
        if (d < best[3].first) {
          best[3] = {d, k};
          for (int q = 3; q > 0 && best[q].first < best[q - 1].first; --q) std::swap(best[q], best[q - 1]);
        }
      }
      for (const auto& [d, k] : best) {
        if (d >= 1e300) break;
        if (newton(s.w[k], w)) {
          ok = true;
          break;
        }
      }
    }
    if (ok) {
      last_owner = s.id;
      last_epoch = task_epoch();
      last_w = w;
    }
    if (!ok) return false;
  }
  z = pre_.inverse()(w);
  return true;
}

cd ConformalMap::inverse(cd x) const {
  cd z;
  if (!try_inverse(x, z))
    fail(ErrorCode::InverseFailure, "Newton inverse failed at x=(" + std::to_string(x.real()) + "," +
                                        std::to_string(x.imag()) + ")");
  return z;
}

ConformalMap ConformalMap::precompose_rotation(double alpha) const {
  const DiskAutomorphism rot(std::exp(I * alpha), 0.0, 0.0, 1.0);
  return ConformalMap(coeffs_, pre_.compose(rot));
}

ConformalMap ConformalMap::gauge_fixed() const { return precompose_rotation(-std::arg(derivative_at_0())); }

JordanCurve ConformalMap::boundary_curve() const {
  auto self = *this;
  return analytic_image_curve([self](cd z) { return self(z); }, [self](cd z) { return self.derivative(z); },
                              to_json());
}

void ConformalMap::check_injective(std::size_t n_r, std::size_t n_theta) const {
  std::vector<cd> img;
  for (std::size_t i = 1; i <= n_r; ++i) {
    const double r = 0.999 * static_cast<double>(i) / n_r;
    for (std::size_t j = 0; j < n_theta; ++j) {
      const cd z = r * std::exp(I * (two_pi * j / n_theta));
      if (std::abs(derivative(z)) < 1e-10) fail(ErrorCode::SelfIntersection, "f' vanishes inside the disk");
      img.push_back((*this)(z));
    }
  }
  double scale = 0.0;
  for (cd p : img) scale = std::max(scale, std::abs(p - img.front()));
  std::vector<char> clash(img.size(), 0);
  parallel_for(img.size(), [&](std::size_t a) {
    for (std::size_t b = a + 1; b < img.size(); ++b)
      if (std::abs(img[a] - img[b]) < 1e-10 * scale) {
        clash[a] = 1;
        return;
      }
  });
  for (char c : clash)
    if (c) fail(ErrorCode::SelfIntersection, "two grid points share an image");
  std::vector<cd> ring(1024);
  for (std::size_t k = 0; k < ring.size(); ++k) ring[k] = (*this)(0.999 * std::exp(I * (two_pi * k / ring.size())));
  check_simple_polygon(ring);
}

nlohmann::json ConformalMap::to_json() const {
  nlohmann::json c = nlohmann::json::array();
  for (cd v : coeffs_) c.push_back({v.real(), v.imag()});
  const auto [omega, theta] = pre_.psi_params();
  return {{"representation", to_string(representation())},
          {"coefficients", c},
          {"omega", {omega.real(), omega.imag()}},
          {"theta", theta}};
}

ConformalMap ConformalMap::from_json(const nlohmann::json& j) {
  const std::string rep = j.value("representation", std::string("taylor"));
  std::vector<cd> coeffs{0.0, 1.0};
  if (j.contains("coefficients")) {
    coeffs.clear();
    for (const auto& p : j.at("coefficients")) coeffs.emplace_back(p.at(0).get<double>(), p.at(1).get<double>());
  }
  cd omega = 0.0;
  if (j.contains("omega")) omega = {j.at("omega").at(0).get<double>(), j.at("omega").at(1).get<double>()};
  const double theta = j.value("theta", 0.0);
  if (rep == "taylor") return ConformalMap::taylor(coeffs);
  if (rep == "mobius") return mobius(omega, theta);
  if (rep == "composite") return ConformalMap(coeffs, DiskAutomorphism::psi(omega, theta));
  throw ConfigError("representation", "unknown map representation '" + rep + "'");
}

ConformalMap mobius(cd omega, double theta) { return ConformalMap({0.0, 1.0}, DiskAutomorphism::psi(omega, theta)); }

ConformalMap rebase(const ConformalMap& f0, cd omega) {
  if (!(std::abs(omega) < 1.0)) fail(ErrorCode::OutsideDisk, "|omega| must be < 1");
  // psi_omega with theta = 0 is an involution, so it is its own inverse.
  const auto psi = DiskAutomorphism::psi(omega, 0.0);
  ConformalMap f(f0.coefficients(), f0.pre().compose(psi));
  return f.gauge_fixed();
}

// ---------------------------------------------------------------------------
// Weil-Petersson energy

namespace {

double wp_level(const ConformalMap& f, std::size_t n_radial, std::size_t n_angular) {
  const std::size_t order = 8;
  const std::size_t panels = std::max<std::size_t>(1, n_radial / order);
  const auto rule = clustered_rule(panels, order, 0.9);
  std::vector<double> ring(rule.x.size(), 0.0);
  std::vector<char> bad(rule.x.size(), 0);
  parallel_for(rule.x.size(), [&](std::size_t i) {
    const double r = rule.x[i];
    double acc = 0.0;
    for (std::size_t j = 0; j < n_angular; ++j) {
      const cd z = r * std::exp(I * (two_pi * j / n_angular));
      const cd d1 = f.derivative(z);
      if (std::abs(d1) < 1e-300) {
        bad[i] = 1;
        return;
      }
      acc += std::norm(f.pre_schwarzian(z));
    }
    ring[i] = acc * (two_pi / n_angular) * r * rule.w[i];
  });
  for (char b : bad)
    if (b) fail(ErrorCode::NonconvergentTail, "f' vanishes on the quadrature grid");
  double total = 0.0;
  for (double v : ring) total += v;
  return total;
}

}  // namespace

WPEnergy wp_energy(const ConformalMap& f, std::size_t n_radial, std::size_t n_angular) {
  WPEnergy out;
  out.coarse = wp_level(f, n_radial, n_angular);
  out.value = wp_level(f, 2 * n_radial, 2 * n_angular);
  out.error_estimate = std::abs(out.value - out.coarse);
  if (out.error_estimate > 0.05 * std::abs(out.value) + 1e-10)
    fail(ErrorCode::NonconvergentTail, "two-level difference " + std::to_string(out.error_estimate) +
                                           " exceeds 5% of " + std::to_string(out.value));
  return out;
}

double w0(const ConformalMap& f, std::size_t n_radial, std::size_t n_angular) {
  return wp_energy(f, n_radial, n_angular).value + 4.0 * pi * std::log(std::abs(f.derivative_at_0()));
}

// ---------------------------------------------------------------------------
// Koebe distortion check

double polyline_distance(std::span<const cd> poly, cd x) {
  double best = std::numeric_limits<double>::infinity();
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const cd a = poly[i], b = poly[(i + 1) % n];
    const cd ab = b - a;
    const double len2 = std::norm(ab);
    double t = len2 > 0 ? dot(x - a, ab) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    best = std::min(best, std::abs(x - (a + t * ab)));
  }
  return best;
}

KoebeReport koebe_check(const ConformalMap& f, std::size_t n) {
  std::vector<cd> poly(n);
  for (std::size_t k = 0; k < n; ++k) poly[k] = f(std::exp(I * (two_pi * k / n)));
  const std::size_t nr = 19, nt = 64;
  std::vector<double> lo(nr, 1e300), hi(nr, 0.0);
  parallel_for(nr, [&](std::size_t i) {
    const double r = 0.05 * static_cast<double>(i);
    for (std::size_t j = 0; j < nt; ++j) {
      const cd z = r * std::exp(I * (two_pi * j / nt));
      const double d = polyline_distance(poly, f(z));
      const double ratio = std::abs(f.derivative(z)) * (1.0 - r * r) / d;
      lo[i] = std::min(lo[i], ratio);
      hi[i] = std::max(hi[i], ratio / 4.0);
    }
  });
  KoebeReport rep;
  rep.min_lower_ratio = *std::min_element(lo.begin(), lo.end());
  rep.max_upper_ratio = *std::max_element(hi.begin(), hi.end());
  rep.max_violation = std::max({1.0, 1.0 / rep.min_lower_ratio, rep.max_upper_ratio});
  return rep;
}

BoundaryTrace boundary_trace(const ConformalMap& f, std::size_t n, double radius) {
  BoundaryTrace out{{}, {}, power_data(1, 0.0)};
  out.polyline.resize(n);
  out.params.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    out.params[k] = static_cast<double>(k) / n;
    out.polyline[k] = f(radius * std::exp(I * (two_pi * out.params[k])));
  }
  check_simple_polygon(out.polyline);
  auto fc = f;
  out.tangent = BoundaryData(
      DataKind::tangential,
      [fc, radius](double t) {
        const cd z = radius * std::exp(I * (two_pi * t));
        const cd d = I * z * fc.derivative(z);
        return d / std::abs(d);
      },
      1, nlohmann::json{{"map", f.to_json()}, {"radius", radius}});
  return out;
}

}  // namespace gluni
