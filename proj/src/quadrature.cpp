#include "gluni/quadrature.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>

namespace gluni {

namespace {

GaussRule build_rule(std::size_t n) {
  GaussRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    // Tricomi initial guess, then Newton on P_n.
    double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) / (static_cast<double>(n) + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (std::size_t k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / static_cast<double>(k);
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) p0 = 1.0;
      dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    rule.nodes[n - 1 - i] = x;
    rule.weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  return rule;
}

}  // namespace

const GaussRule& gauss_legendre(std::size_t n) {
  static std::mutex mutex;
  static std::map<std::size_t, std::unique_ptr<GaussRule>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<GaussRule>(build_rule(n));
  return *slot;
}

LineRule gauss_on(double a, double b, std::size_t order) {
  const auto& g = gauss_legendre(order);
  LineRule out;
  const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
  for (std::size_t i = 0; i < order; ++i) {
    out.x.push_back(mid + half * g.nodes[i]);
    out.w.push_back(half * g.weights[i]);
  }
  return out;
}

LineRule clustered_rule(std::size_t panels, std::size_t order, double ratio) {
  double total = 0.0, width = 1.0;
  for (std::size_t k = 0; k < panels; ++k, width *= ratio) total += width;
  LineRule out;
  double a = 0.0;
  width = 1.0 / total;
  for (std::size_t k = 0; k < panels; ++k, width *= ratio) {
    const double b = (k + 1 == panels) ? 1.0 : a + width;
    auto p = gauss_on(a, b, order);
    out.x.insert(out.x.end(), p.x.begin(), p.x.end());
    out.w.insert(out.w.end(), p.w.begin(), p.w.end());
    a = b;
  }
  return out;
}

}  // namespace gluni
