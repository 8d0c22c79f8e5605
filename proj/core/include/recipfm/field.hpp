#pragma once

#include <cstddef>
#include <functional>
#include <string>

#include "recipfm/jet.hpp"

namespace recipfm {

/// A scalar field on an open subset of R^n, evaluated as a jet at a point.
///
/// Fields are cheap to copy (the evaluator is shared) and immutable, so
/// concurrent evaluation is safe as long as the evaluator itself is pure.
class ScalarField {
 public:
  using Evaluator = std::function<Jet(const Point&, int order)>;

  ScalarField() = default;
  ScalarField(std::size_t dim, Evaluator eval, std::string label = {});

  static ScalarField constant(std::size_t dim, double value);
  static ScalarField coordinate(std::size_t dim, std::size_t axis);

  std::size_t dim() const noexcept { return dim_; }
  const std::string& label() const noexcept { return label_; }
  bool valid() const noexcept { return static_cast<bool>(eval_); }

  Jet operator()(const Point& p, int order) const;
  double value(const Point& p) const { return (*this)(p, 0).value(); }

  ScalarField with_label(std::string label) const;

 private:
  std::size_t dim_ = 0;
  Evaluator eval_;
  std::string label_;
};

ScalarField operator+(const ScalarField& a, const ScalarField& b);
ScalarField operator-(const ScalarField& a, const ScalarField& b);
ScalarField operator*(const ScalarField& a, const ScalarField& b);
ScalarField operator/(const ScalarField& a, const ScalarField& b);
ScalarField operator*(double a, const ScalarField& b);

}  // namespace recipfm
