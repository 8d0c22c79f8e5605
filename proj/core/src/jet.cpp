#include "recipfm/jet.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <unordered_map>
#include <utility>

#include <fmt/core.h>

#include "recipfm/error.hpp"

namespace recipfm {

// ---------------------------------------------------------------------------
// Point / MultiIndex

Point::Point(std::vector<double> coords) : coords_(std::move(coords)) {
  if (coords_.empty() || coords_.size() > kMaxDim) {
    throw InvalidArgument(fmt::format("point dimension {} outside [1, {}]", coords_.size(), kMaxDim));
  }
  for (std::size_t i = 0; i < coords_.size(); ++i) {
    if (!std::isfinite(coords_[i])) {
      throw InvalidArgument(fmt::format("point coordinate u{} is not finite", i + 1));
    }
  }
}

Point::Point(std::initializer_list<double> coords) : Point(std::vector<double>(coords)) {}

MultiIndex::MultiIndex(std::size_t dim) : dim_(dim) {
  if (dim > kMaxDim) throw InvalidArgument(fmt::format("multi-index dimension {} exceeds {}", dim, kMaxDim));
}

MultiIndex::MultiIndex(std::initializer_list<int> exponents) : MultiIndex(exponents.size()) {
  std::size_t i = 0;
  for (int e : exponents) set(i++, e);
}

MultiIndex MultiIndex::unit(std::size_t dim, std::size_t axis) {
  MultiIndex m(dim);
  m.set(axis, 1);
  return m;
}

MultiIndex MultiIndex::from_axes(std::size_t dim, std::initializer_list<std::size_t> axes) {
  MultiIndex m(dim);
  for (std::size_t a : axes) {
    if (a >= dim) throw InvalidArgument(fmt::format("axis {} out of range for dimension {}", a, dim));
    m.set(a, m[a] + 1);
  }
  return m;
}

void MultiIndex::set(std::size_t i, int e) {
  if (i >= dim_) throw InvalidArgument(fmt::format("multi-index axis {} out of range for dimension {}", i, dim_));
  if (e < 0 || e > kMaxOrder) throw InvalidArgument(fmt::format("multi-index exponent {} outside [0, {}]", e, kMaxOrder));
  exps_[i] = static_cast<std::uint8_t>(e);
}

int MultiIndex::degree() const noexcept {
  int d = 0;
  for (std::size_t i = 0; i < dim_; ++i) d += exps_[i];
  return d;
}

double MultiIndex::factorial() const noexcept {
  static constexpr double kFact[] = {1.0, 1.0, 2.0, 6.0};
  double f = 1.0;
  for (std::size_t i = 0; i < dim_; ++i) f *= kFact[exps_[i]];
  return f;
}

// ---------------------------------------------------------------------------
// Layout tables

namespace detail {

// Monomials are stored in graded order (by total degree, then lexicographic
// within a degree). The ordering within a degree does not depend on the jet
// order, so a lower-order layout is a prefix of a higher-order one.
struct JetLayout {
  std::size_t dim = 0;
  int order = 0;
  std::vector<MultiIndex> monos;
  std::vector<double> factorials;
  std::unordered_map<std::uint32_t, std::uint32_t> lookup;
  // For each result monomial g: every (a, b) with a + b = g.
  std::vector<std::vector<std::pair<std::uint32_t, std::uint32_t>>> products;
  // shift[axis][i]: index of monos[i] + e_axis, for monomials of degree < order.
  std::vector<std::vector<std::uint32_t>> shift;

  static std::uint32_t key(const MultiIndex& m) {
    std::uint32_t k = 0;
    for (std::size_t i = 0; i < m.dim(); ++i) k |= static_cast<std::uint32_t>(m[i]) << (2 * i);
    return k;
  }

  std::size_t index_of(const MultiIndex& m) const {
    if (m.dim() != dim) {
      throw InvalidArgument(fmt::format("multi-index of dimension {} used on a jet of dimension {}", m.dim(), dim));
    }
    if (m.degree() > order) {
      throw InvalidArgument(fmt::format("derivative of order {} exceeds jet order {}", m.degree(), order));
    }
    return lookup.at(key(m));
  }
};

namespace {

void enumerate_degree(std::size_t dim, int remaining, std::size_t axis, MultiIndex& cur,
                      std::vector<MultiIndex>& out) {
  if (axis + 1 == dim) {
    cur.set(axis, remaining);
    out.push_back(cur);
    cur.set(axis, 0);
    return;
  }
  for (int e = remaining; e >= 0; --e) {
    cur.set(axis, e);
    enumerate_degree(dim, remaining - e, axis + 1, cur, out);
  }
  cur.set(axis, 0);
}

std::unique_ptr<JetLayout> build_layout(std::size_t dim, int order) {
  auto L = std::make_unique<JetLayout>();
  L->dim = dim;
  L->order = order;
  for (int deg = 0; deg <= order; ++deg) {
    MultiIndex cur(dim);
    enumerate_degree(dim, deg, 0, cur, L->monos);
  }
  L->factorials.reserve(L->monos.size());
  for (std::size_t i = 0; i < L->monos.size(); ++i) {
    L->factorials.push_back(L->monos[i].factorial());
    L->lookup.emplace(JetLayout::key(L->monos[i]), static_cast<std::uint32_t>(i));
  }

  L->products.resize(L->monos.size());
  for (std::size_t g = 0; g < L->monos.size(); ++g) {
    const MultiIndex& gm = L->monos[g];
    // Enumerate every a <= g componentwise.
    MultiIndex a(dim);
    while (true) {
      MultiIndex b(dim);
      for (std::size_t i = 0; i < dim; ++i) b.set(i, gm[i] - a[i]);
      L->products[g].emplace_back(L->lookup.at(JetLayout::key(a)), L->lookup.at(JetLayout::key(b)));
      std::size_t i = 0;
      for (; i < dim; ++i) {
        if (a[i] < gm[i]) {
          a.set(i, a[i] + 1);
          break;
        }
        a.set(i, 0);
      }
      if (i == dim) break;
    }
  }

  L->shift.assign(dim, std::vector<std::uint32_t>{});
  for (std::size_t axis = 0; axis < dim; ++axis) {
    for (const MultiIndex& m : L->monos) {
      if (m.degree() >= order) break;
      MultiIndex up = m;
      up.set(axis, m[axis] + 1);
      L->shift[axis].push_back(L->lookup.at(JetLayout::key(up)));
    }
  }
  return L;
}

}  // namespace

const JetLayout& jet_layout(std::size_t dim, int order) {
  if (dim == 0 || dim > kMaxDim) throw InvalidArgument(fmt::format("jet dimension {} outside [1, {}]", dim, kMaxDim));
  if (order < 0 || order > kMaxOrder) throw InvalidArgument(fmt::format("jet order {} outside [0, {}]", order, kMaxOrder));
  static std::mutex mu;
  static std::map<std::pair<std::size_t, int>, std::unique_ptr<JetLayout>> cache;
  std::lock_guard lock(mu);
  auto& slot = cache[{dim, order}];
  if (!slot) slot = build_layout(dim, order);
  return *slot;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Jet

Jet::Jet() : Jet(&detail::jet_layout(1, 0), std::vector<double>{0.0}) {}

Jet::Jet(const detail::JetLayout* layout, std::vector<double> coeffs)
    : layout_(layout), coeffs_(std::move(coeffs)) {}

Jet Jet::constant(std::size_t dim, int order, double value) {
  const auto& L = detail::jet_layout(dim, order);
  std::vector<double> c(L.monos.size(), 0.0);
  c[0] = value;
  return Jet(&L, std::move(c));
}

Jet Jet::coordinate(const Point& p, std::size_t axis, int order) {
  if (axis >= p.dim()) throw InvalidArgument(fmt::format("coordinate u{} out of range for dimension {}", axis + 1, p.dim()));
  Jet j = constant(p.dim(), order, p[axis]);
  if (order >= 1) j.coeffs_[j.layout_->index_of(MultiIndex::unit(p.dim(), axis))] = 1.0;
  return j;
}

Jet Jet::from_coeffs(std::size_t dim, int order, std::vector<double> coeffs) {
  const auto& L = detail::jet_layout(dim, order);
  if (coeffs.size() != L.monos.size()) {
    throw InvalidArgument(fmt::format("jet of dimension {} and order {} needs {} coefficients, got {}", dim, order,
                                      L.monos.size(), coeffs.size()));
  }
  return Jet(&L, std::move(coeffs));
}

std::size_t Jet::dim() const noexcept { return layout_->dim; }
int Jet::order() const noexcept { return layout_->order; }

double Jet::coeff(const MultiIndex& a) const { return coeffs_[layout_->index_of(a)]; }

double Jet::partial(const MultiIndex& a) const {
  const std::size_t i = layout_->index_of(a);
  return coeffs_[i] * layout_->factorials[i];
}

double Jet::d(std::size_t i) const { return partial(MultiIndex::from_axes(dim(), {i})); }
double Jet::d(std::size_t i, std::size_t j) const { return partial(MultiIndex::from_axes(dim(), {i, j})); }
double Jet::d(std::size_t i, std::size_t j, std::size_t k) const {
  return partial(MultiIndex::from_axes(dim(), {i, j, k}));
}

MultiIndex Jet::index_at(std::size_t i) const { return layout_->monos.at(i); }

Jet Jet::derivative(std::size_t axis) const {
  if (axis >= dim()) throw InvalidArgument(fmt::format("axis {} out of range for dimension {}", axis, dim()));
  if (order() == 0) throw InvalidArgument("cannot differentiate a jet of order 0");
  const auto& lower = detail::jet_layout(dim(), order() - 1);
  std::vector<double> c(lower.monos.size());
  const auto& shift = layout_->shift[axis];
  for (std::size_t b = 0; b < c.size(); ++b) {
    // d^b (df/du_a) / b! = (b_a + 1) * coeff[b + e_a]
    c[b] = coeffs_[shift[b]] * static_cast<double>(lower.monos[b][axis] + 1);
  }
  return Jet(&lower, std::move(c));
}

Jet Jet::truncated(int new_order) const {
  if (new_order > order()) {
    throw InvalidArgument(fmt::format("cannot raise jet order from {} to {}", order(), new_order));
  }
  const auto& lower = detail::jet_layout(dim(), new_order);
  return Jet(&lower, std::vector<double>(coeffs_.begin(), coeffs_.begin() + static_cast<std::ptrdiff_t>(lower.monos.size())));
}

void Jet::require_compatible(const Jet& rhs, const char* op) const {
  if (layout_ != rhs.layout_) {
    throw InvalidArgument(fmt::format("jet {}: (dim {}, order {}) vs (dim {}, order {})", op, dim(), order(),
                                      rhs.dim(), rhs.order()));
  }
}

Jet Jet::operator-() const {
  Jet r = *this;
  for (double& c : r.coeffs_) c = -c;
  return r;
}

Jet& Jet::operator+=(const Jet& rhs) {
  require_compatible(rhs, "add");
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] += rhs.coeffs_[i];
  return *this;
}

Jet& Jet::operator-=(const Jet& rhs) {
  require_compatible(rhs, "sub");
  for (std::size_t i = 0; i < coeffs_.size(); ++i) coeffs_[i] -= rhs.coeffs_[i];
  return *this;
}

Jet& Jet::operator*=(const Jet& rhs) {
  require_compatible(rhs, "mul");
  std::vector<double> out(coeffs_.size(), 0.0);
  for (std::size_t g = 0; g < out.size(); ++g) {
    double s = 0.0;
    for (auto [a, b] : layout_->products[g]) s += coeffs_[a] * rhs.coeffs_[b];
    out[g] = s;
  }
  coeffs_ = std::move(out);
  return *this;
}

Jet& Jet::operator/=(const Jet& rhs) {
  require_compatible(rhs, "div");
  const double b0 = rhs.coeffs_[0];
  if (b0 == 0.0 || !std::isfinite(b0)) throw DomainError("division by a jet with zero value");
  // Solve q * b = a for q, one graded coefficient at a time.
  std::vector<double> q(coeffs_.size(), 0.0);
  for (std::size_t g = 0; g < q.size(); ++g) {
    double s = coeffs_[g];
    for (auto [a, b] : layout_->products[g]) {
      if (b != 0) s -= q[a] * rhs.coeffs_[b];
    }
    q[g] = s / b0;
  }
  coeffs_ = std::move(q);
  return *this;
}

Jet& Jet::operator+=(double rhs) {
  coeffs_[0] += rhs;
  return *this;
}

Jet& Jet::operator-=(double rhs) {
  coeffs_[0] -= rhs;
  return *this;
}

Jet& Jet::operator*=(double rhs) {
  for (double& c : coeffs_) c *= rhs;
  return *this;
}

Jet& Jet::operator/=(double rhs) {
  if (rhs == 0.0) throw DomainError("division of a jet by zero");
  for (double& c : coeffs_) c /= rhs;
  return *this;
}

Jet operator+(Jet a, const Jet& b) { return a += b; }
Jet operator-(Jet a, const Jet& b) { return a -= b; }
Jet operator*(Jet a, const Jet& b) { return a *= b; }
Jet operator/(Jet a, const Jet& b) { return a /= b; }
Jet operator+(Jet a, double b) { return a += b; }
Jet operator-(Jet a, double b) { return a -= b; }
Jet operator*(Jet a, double b) { return a *= b; }
Jet operator/(Jet a, double b) { return a /= b; }
Jet operator+(double a, Jet b) { return b += a; }
Jet operator-(double a, const Jet& b) {
  Jet r = -b;
  return r += a;
}
Jet operator*(double a, Jet b) { return b *= a; }
Jet operator/(double a, const Jet& b) { return Jet::constant(b.dim(), b.order(), a) / b; }

Jet jet_arith(const Jet& a, const Jet& b, ArithOp op) {
  switch (op) {
    case ArithOp::add: return a + b;
    case ArithOp::sub: return a - b;
    case ArithOp::mul: return a * b;
    case ArithOp::div: return a / b;
  }
  throw InvalidArgument("unknown jet operation");
}

// ---------------------------------------------------------------------------
// Elementary functions

Jet compose(const Jet& x, std::span<const double> taylor) {
  const int k = x.order();
  if (taylor.size() < static_cast<std::size_t>(k) + 1) {
    throw InvalidArgument(fmt::format("composition needs {} Taylor coefficients, got {}", k + 1, taylor.size()));
  }
  // Horner in the nilpotent part: f(x0 + dx) = sum_m t_m dx^m, dx^{k+1} = 0.
  Jet dx = x;
  dx.coeffs_[0] = 0.0;
  Jet r = Jet::constant(x.dim(), k, taylor[static_cast<std::size_t>(k)]);
  for (int m = k - 1; m >= 0; --m) {
    r *= dx;
    r.coeffs_[0] += taylor[static_cast<std::size_t>(m)];
  }
  return r;
}

Jet exp(const Jet& x) {
  const double e = std::exp(x.value());
  std::array<double, kMaxOrder + 1> t{e, e, e / 2.0, e / 6.0};
  return compose(x, t);
}

Jet ln(const Jet& x) {
  const double x0 = x.value();
  if (!(x0 > 0.0)) throw DomainError(fmt::format("ln of non-positive value {}", x0));
  std::array<double, kMaxOrder + 1> t{std::log(x0), 1.0 / x0, -1.0 / (2.0 * x0 * x0), 1.0 / (3.0 * x0 * x0 * x0)};
  return compose(x, t);
}

Jet pow(const Jet& x, double r) {
  const double x0 = x.value();
  const bool integral = std::trunc(r) == r;
  if (!integral && !(x0 > 0.0)) {
    throw DomainError(fmt::format("pow with non-integer exponent {} of non-positive value {}", r, x0));
  }
  if (integral && r < 0.0 && x0 == 0.0) {
    throw DomainError(fmt::format("pow with negative exponent {} of zero", r));
  }
  // t_m = binom(r, m) x0^(r - m); the factor x0^(r - m) is computed as
  // a product of powers so a zero base with r >= m stays exact.
  std::array<double, kMaxOrder + 1> t{};
  double binom = 1.0;
  for (int m = 0; m <= x.order(); ++m) {
    if (m > 0) binom *= (r - (m - 1)) / m;
    t[static_cast<std::size_t>(m)] = binom == 0.0 ? 0.0 : binom * std::pow(x0, r - m);
  }
  return compose(x, t);
}

}  // namespace recipfm
