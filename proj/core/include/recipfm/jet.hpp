#pragma once

// Truncated multivariate Taylor expansions ("jets") of order <= 3.
//
// A Jet stores the Taylor coefficients d^a f / a! of a scalar function at a
// base point for every multi-index |a| <= order. Multiplication is then a
// plain truncated Cauchy product and `partial` rescales by a! on the way out.

#include <array>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

namespace recipfm {

inline constexpr std::size_t kMaxDim = 16;
inline constexpr int kMaxOrder = 3;

/// A point in canonical coordinates u^1..u^n (stored 0-based).
class Point {
 public:
  Point() = default;
  explicit Point(std::vector<double> coords);
  Point(std::initializer_list<double> coords);

  std::size_t dim() const noexcept { return coords_.size(); }
  double operator[](std::size_t i) const { return coords_[i]; }
  std::span<const double> coords() const noexcept { return coords_; }

  friend bool operator==(const Point&, const Point&) = default;

 private:
  std::vector<double> coords_;
};

/// Exponent vector (a_1, ..., a_n) of a partial derivative.
class MultiIndex {
 public:
  MultiIndex() = default;
  explicit MultiIndex(std::size_t dim);
  MultiIndex(std::initializer_list<int> exponents);

  static MultiIndex unit(std::size_t dim, std::size_t axis);
  /// Builds a multi-index from a list of differentiation axes, so that
  /// {0, 0, 2} in dimension 3 becomes (2, 0, 1).
  static MultiIndex from_axes(std::size_t dim, std::initializer_list<std::size_t> axes);

  std::size_t dim() const noexcept { return dim_; }
  int operator[](std::size_t i) const { return exps_[i]; }
  void set(std::size_t i, int e);
  int degree() const noexcept;
  /// a! = a_1! * ... * a_n!
  double factorial() const noexcept;

  friend bool operator==(const MultiIndex&, const MultiIndex&) = default;

 private:
  std::size_t dim_ = 0;
  std::array<std::uint8_t, kMaxDim> exps_{};
};

namespace detail {
struct JetLayout;
const JetLayout& jet_layout(std::size_t dim, int order);
}  // namespace detail

class Jet {
 public:
  /// The zero jet of dimension 1 and order 0.
  Jet();

  static Jet constant(std::size_t dim, int order, double value);
  /// Jet of the coordinate function u^{axis} at p.
  static Jet coordinate(const Point& p, std::size_t axis, int order);
  /// Jet with explicit Taylor coefficients in the layout's graded order.
  static Jet from_coeffs(std::size_t dim, int order, std::vector<double> coeffs);

  std::size_t dim() const noexcept;
  int order() const noexcept;

  double value() const noexcept { return coeffs_[0]; }
  /// Taylor coefficient d^a f / a!.
  double coeff(const MultiIndex& a) const;
  /// The partial derivative d^a f.
  double partial(const MultiIndex& a) const;

  double d(std::size_t i) const;
  double d(std::size_t i, std::size_t j) const;
  double d(std::size_t i, std::size_t j, std::size_t k) const;

  std::span<const double> coeffs() const noexcept { return coeffs_; }
  /// Multi-index of the i-th stored coefficient.
  MultiIndex index_at(std::size_t i) const;

  /// Exact jet of d f / du^{axis}; its order is one less.
  Jet derivative(std::size_t axis) const;
  /// The same expansion cut down to a lower order.
  Jet truncated(int order) const;

  Jet operator-() const;
  Jet& operator+=(const Jet& rhs);
  Jet& operator-=(const Jet& rhs);
  Jet& operator*=(const Jet& rhs);
  Jet& operator/=(const Jet& rhs);
  Jet& operator+=(double rhs);
  Jet& operator-=(double rhs);
  Jet& operator*=(double rhs);
  Jet& operator/=(double rhs);

 private:
  Jet(const detail::JetLayout* layout, std::vector<double> coeffs);
  void require_compatible(const Jet& rhs, const char* op) const;

  const detail::JetLayout* layout_;
  std::vector<double> coeffs_;

  friend Jet compose(const Jet& x, std::span<const double> taylor);
};

Jet operator+(Jet a, const Jet& b);
Jet operator-(Jet a, const Jet& b);
Jet operator*(Jet a, const Jet& b);
Jet operator/(Jet a, const Jet& b);
Jet operator+(Jet a, double b);
Jet operator-(Jet a, double b);
Jet operator*(Jet a, double b);
Jet operator/(Jet a, double b);
Jet operator+(double a, Jet b);
Jet operator-(double a, const Jet& b);
Jet operator*(double a, Jet b);
Jet operator/(double a, const Jet& b);

enum class ArithOp { add, sub, mul, div };
Jet jet_arith(const Jet& a, const Jet& b, ArithOp op);

/// Composes a univariate Taylor series with a jet: given t_m = f^(m)(x0)/m!
/// for m = 0..x.order(), returns the jet of f(x).
Jet compose(const Jet& x, std::span<const double> taylor);

Jet exp(const Jet& x);
/// Natural logarithm; the value must be positive.
Jet ln(const Jet& x);
/// x^r. Non-integer r needs a positive value; integer r < 0 a nonzero one.
Jet pow(const Jet& x, double r);

inline double partial(const Jet& j, const MultiIndex& a) { return j.partial(a); }

}  // namespace recipfm
