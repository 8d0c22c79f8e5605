#include "support.hpp"

#include <cmath>
#include <stdexcept>

#include <quadmath.h>

namespace recipfm::testing {

std::vector<Point> sample_points(std::size_t n, std::uint64_t seed, std::size_t count,
                                 const std::vector<ScalarField>& nonzero, PointSampler::Filter extra) {
  PointSampler s(n, seed);
  for (const auto& f : nonzero) s.require_nonzero(f);
  if (extra) s.require(std::move(extra));
  return s.draw(count);
}

namespace {

Quad hyp2f1_hp(Quad a, Quad b, Quad c, Quad z) {
  if (fabsq(z) >= 1) throw std::domain_error("2F1 oracle outside the unit disc");
  Quad sum = 1, term = 1;
  for (int n = 0; n < 200000; ++n) {
    term *= (a + n) * (b + n) / ((c + n) * (n + 1)) * z;
    sum += term;
    if (fabsq(term) < static_cast<Quad>(1e-32) * fabsq(sum)) return sum;
  }
  throw std::domain_error("2F1 oracle did not converge");
}

}  // namespace

Quad eval_hp(const ExprNode& n, std::span<const Quad> u) {
  auto arg = [&](std::size_t i) { return eval_hp(*n.args[i], u); };
  switch (n.kind) {
    case NodeKind::number:
    case NodeKind::parameter: return n.value;
    case NodeKind::coordinate: return u[n.axis];
    case NodeKind::neg: return -arg(0);
    case NodeKind::add: return arg(0) + arg(1);
    case NodeKind::sub: return arg(0) - arg(1);
    case NodeKind::mul: return arg(0) * arg(1);
    case NodeKind::div: return arg(0) / arg(1);
    case NodeKind::power: {
      const Quad b = arg(0);
      const long long e = std::llround(static_cast<double>(arg(1)));
      Quad r = 1;
      for (long long i = 0; i < std::llabs(e); ++i) r *= b;
      return e < 0 ? 1 / r : r;
    }
    case NodeKind::call:
      switch (n.fn) {
        case Builtin::exp: return expq(arg(0));
        case Builtin::ln: return logq(arg(0));
        case Builtin::pow: return powq(arg(0), arg(1));
        case Builtin::hyp2f1: return hyp2f1_hp(arg(0), arg(1), arg(2), arg(3));
      }
  }
  throw std::logic_error("unknown node");
}

QuadFunction hp_function(const FieldExpr& e) {
  auto root = e.root_ptr();
  return [root](std::span<const Quad> u) { return eval_hp(*root, u); };
}

namespace {

template <class R, class Fn>
R fd_stencil(const Fn& f, const Point& p, const MultiIndex& a, R h) {
  // tensor product of 1-d central stencils
  struct Tap {
    int offset;
    R weight;
  };
  auto stencil = [h](int order) -> std::vector<Tap> {
    const R one = 1;
    switch (order) {
      case 0: return {{0, one}};
      case 1: return {{-1, -one / (2 * h)}, {1, one / (2 * h)}};
      case 2: return {{-1, one / (h * h)}, {0, -2 * one / (h * h)}, {1, one / (h * h)}};
      case 3: {
        const R w = one / (2 * h * h * h);
        return {{-2, -w}, {-1, 2 * w}, {1, -2 * w}, {2, w}};
      }
      default: throw std::invalid_argument("fd order > 3");
    }
  };
  const std::size_t n = p.dim();
  std::vector<std::vector<Tap>> taps(n);
  for (std::size_t i = 0; i < n; ++i) taps[i] = stencil(a[i]);
  std::vector<std::size_t> idx(n, 0);
  std::vector<R> x(n);
  R total = 0;
  while (true) {
    R w = 1;
    for (std::size_t i = 0; i < n; ++i) {
      const Tap& t = taps[i][idx[i]];
      x[i] = static_cast<R>(p[i]) + t.offset * h;
      w *= t.weight;
    }
    total += w * f(x);
    std::size_t k = 0;
    while (k < n && ++idx[k] == taps[k].size()) idx[k++] = 0;
    if (k == n) break;
  }
  return total;
}

}  // namespace

long double fd_partial(const LdFunction& f, const Point& p, const MultiIndex& a, long double h) {
  return fd_stencil<long double>(f, p, a, h);
}

double fd_partial(const QuadFunction& f, const Point& p, const MultiIndex& a, double h) {
  return static_cast<double>(fd_stencil<Quad>(f, p, a, static_cast<Quad>(h)));
}

std::vector<MultiIndex> multi_indices(std::size_t dim, int max_order) {
  std::vector<MultiIndex> out;
  std::vector<int> e(dim, 0);
  while (true) {
    std::size_t k = 0;
    while (k < dim && ++e[k] > max_order) e[k++] = 0;
    if (k == dim) break;
    int deg = 0;
    for (int x : e) deg += x;
    if (deg > max_order) continue;
    MultiIndex m(dim);
    for (std::size_t i = 0; i < dim; ++i) m.set(i, e[i]);
    out.push_back(m);
  }
  return out;
}

double rel_diff(double a, double b) {
  const double s = std::max({1.0, std::abs(a), std::abs(b)});
  return std::abs(a - b) / s;
}

}  // namespace recipfm::testing
