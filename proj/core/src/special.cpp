#include "recipfm/special.hpp"

#include <array>
#include <cmath>

#include <fmt/core.h>

#include "recipfm/error.hpp"

namespace recipfm {

namespace {

bool non_positive_integer(double x) { return x <= 0.0 && std::trunc(x) == x; }

}  // namespace

double hyp2f1(double a, double b, double c, double z, const Hyp2f1Options& opts) {
  if (non_positive_integer(c)) throw DomainError(fmt::format("2F1 with c = {} (non-positive integer)", c));
  if (!std::isfinite(z) || std::abs(z) >= 1.0) {
    throw DomainError(fmt::format("2F1 series does not converge for |z| = {} >= 1", std::abs(z)));
  }
  double sum = 1.0;
  double term = 1.0;
  for (int n = 0; n < opts.max_terms; ++n) {
    term *= (a + n) * (b + n) / ((c + n) * (n + 1.0)) * z;
    sum += term;
    if (term == 0.0 || std::abs(term) < opts.rel_tol * std::abs(sum)) return sum;
  }
  throw DomainError(fmt::format("2F1({}, {}; {}; {}) did not converge in {} terms", a, b, c, z, opts.max_terms));
}

Jet hyp2f1(double a, double b, double c, const Jet& z, const Hyp2f1Options& opts) {
  const double z0 = z.value();
  // t_m = (a)_m (b)_m / ((c)_m m!) * 2F1(a+m, b+m; c+m; z0)
  std::array<double, kMaxOrder + 1> t{};
  double pref = 1.0;
  for (int m = 0; m <= z.order(); ++m) {
    if (m > 0) pref *= (a + m - 1) * (b + m - 1) / ((c + m - 1) * m);
    t[static_cast<std::size_t>(m)] = pref == 0.0 ? 0.0 : pref * hyp2f1(a + m, b + m, c + m, z0, opts);
  }
  return compose(z, t);
}

}  // namespace recipfm
