#include "recipfm/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

#include <fmt/core.h>

#include "recipfm/error.hpp"

namespace recipfm {

GaussLegendre::GaussLegendre(int n) {
  if (n < 1) throw InvalidArgument("Gauss-Legendre rule needs at least one node");
  nodes_.resize(static_cast<std::size_t>(n));
  weights_.resize(static_cast<std::size_t>(n));
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    nodes_[static_cast<std::size_t>(i)] = -x;
    nodes_[static_cast<std::size_t>(n - 1 - i)] = x;
    weights_[static_cast<std::size_t>(i)] = w;
    weights_[static_cast<std::size_t>(n - 1 - i)] = w;
  }
}

double GaussLegendre::integrate(const std::function<double(double)>& f, double a, double b, int pieces) const {
  const double h = (b - a) / pieces;
  double total = 0.0;
  for (int p = 0; p < pieces; ++p) {
    const double lo = a + p * h;
    const double mid = lo + 0.5 * h;
    double s = 0.0;
    for (std::size_t k = 0; k < nodes_.size(); ++k) s += weights_[k] * f(mid + 0.5 * h * nodes_[k]);
    total += 0.5 * h * s;
  }
  return total;
}

namespace {

const GaussLegendre& cached_rule(int n) {
  static std::mutex mu;
  static std::map<int, GaussLegendre> rules;
  std::lock_guard lock(mu);
  auto it = rules.find(n);
  if (it == rules.end()) it = rules.emplace(n, GaussLegendre(n)).first;
  return it->second;
}

}  // namespace

double integrate_adaptive(const std::function<double(double)>& f, double a, double b, const QuadratureOptions& opts) {
  if (a == b) return 0.0;
  const GaussLegendre& rule = cached_rule(opts.nodes);
  double prev = rule.integrate(f, a, b, 1);
  for (int pieces = 2; pieces <= opts.max_pieces; pieces *= 2) {
    const double cur = rule.integrate(f, a, b, pieces);
    if (!std::isfinite(cur)) break;
    if (std::abs(cur - prev) < opts.tol * std::max(1.0, std::abs(cur))) return cur;
    prev = cur;
  }
  throw ExhaustedError(fmt::format("quadrature on [{}, {}] did not converge", a, b));
}

}  // namespace recipfm
