#include "recipfm/field.hpp"

#include <utility>

#include <fmt/core.h>

#include "recipfm/error.hpp"

namespace recipfm {

ScalarField::ScalarField(std::size_t dim, Evaluator eval, std::string label)
    : dim_(dim), eval_(std::move(eval)), label_(std::move(label)) {
  if (dim_ == 0 || dim_ > kMaxDim) throw InvalidArgument(fmt::format("field dimension {} outside [1, {}]", dim_, kMaxDim));
  if (!eval_) throw InvalidArgument("field needs an evaluator");
}

ScalarField ScalarField::constant(std::size_t dim, double value) {
  return ScalarField(
      dim, [dim, value](const Point&, int order) { return Jet::constant(dim, order, value); }, fmt::format("{}", value));
}

ScalarField ScalarField::coordinate(std::size_t dim, std::size_t axis) {
  if (axis >= dim) throw InvalidArgument(fmt::format("coordinate u{} out of range for dimension {}", axis + 1, dim));
  return ScalarField(
      dim, [axis](const Point& p, int order) { return Jet::coordinate(p, axis, order); },
      fmt::format("u{}", axis + 1));
}

Jet ScalarField::operator()(const Point& p, int order) const {
  if (!eval_) throw InvalidArgument("evaluation of an empty field");
  if (p.dim() != dim_) {
    throw InvalidArgument(fmt::format("field '{}' of dimension {} evaluated at a point of dimension {}", label_, dim_,
                                      p.dim()));
  }
  return eval_(p, order);
}

ScalarField ScalarField::with_label(std::string label) const {
  ScalarField f = *this;
  f.label_ = std::move(label);
  return f;
}

namespace {

template <class Op>
ScalarField combine(const ScalarField& a, const ScalarField& b, Op op, const char* sym) {
  if (a.dim() != b.dim()) {
    throw InvalidArgument(fmt::format("combining fields of dimension {} and {}", a.dim(), b.dim()));
  }
  return ScalarField(
      a.dim(), [a, b, op](const Point& p, int order) { return op(a(p, order), b(p, order)); },
      fmt::format("({} {} {})", a.label(), sym, b.label()));
}

}  // namespace

ScalarField operator+(const ScalarField& a, const ScalarField& b) {
  return combine(a, b, [](const Jet& x, const Jet& y) { return x + y; }, "+");
}
ScalarField operator-(const ScalarField& a, const ScalarField& b) {
  return combine(a, b, [](const Jet& x, const Jet& y) { return x - y; }, "-");
}
ScalarField operator*(const ScalarField& a, const ScalarField& b) {
  return combine(a, b, [](const Jet& x, const Jet& y) { return x * y; }, "*");
}
ScalarField operator/(const ScalarField& a, const ScalarField& b) {
  return combine(a, b, [](const Jet& x, const Jet& y) { return x / y; }, "/");
}
ScalarField operator*(double a, const ScalarField& b) {
  return ScalarField(
      b.dim(), [a, b](const Point& p, int order) { return a * b(p, order); },
      fmt::format("({} * {})", a, b.label()));
}

}  // namespace recipfm
