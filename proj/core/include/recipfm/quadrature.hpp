#pragma once

#include <functional>
#include <vector>

namespace recipfm {

/// Gauss-Legendre rule on [-1, 1]; nodes from Newton iteration on P_n.
class GaussLegendre {
 public:
  explicit GaussLegendre(int n);

  int size() const noexcept { return static_cast<int>(nodes_.size()); }
  const std::vector<double>& nodes() const noexcept { return nodes_; }
  const std::vector<double>& weights() const noexcept { return weights_; }

  /// Composite rule with `pieces` equal subintervals of [a, b].
  double integrate(const std::function<double(double)>& f, double a, double b, int pieces = 1) const;

 private:
  std::vector<double> nodes_;
  std::vector<double> weights_;
};

struct QuadratureOptions {
  int nodes = 32;
  /// Stop when successive refinements differ by less than tol * max(1, |I|).
  double tol = 1e-10;
  int max_pieces = 4096;
};

/// Integrates f over [a, b], doubling the number of composite pieces until
/// two successive estimates agree. Throws ExhaustedError otherwise.
double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          const QuadratureOptions& opts = {});

}  // namespace recipfm
