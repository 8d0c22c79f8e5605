#pragma once

// A small expression language for scalar fields:
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := '-' unary | power
//   power   := primary ('^' unary)?
//   primary := number | u1..u16 | parameter | call | '(' expr ')'
//   call    := exp(e) | ln(e) | pow(e, r) | hyp2f1(a, b, c, e)
//
// Parameters are bound to numbers when parsing. Exponents of '^' must be
// integer constants; real exponents are spelled pow(base, r). In pow and
// hyp2f1 the non-field arguments must be constant.

#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "recipfm/field.hpp"

namespace recipfm {

using ParamMap = std::map<std::string, double, std::less<>>;

enum class NodeKind { number, coordinate, parameter, neg, add, sub, mul, div, power, call };
enum class Builtin { exp, ln, pow, hyp2f1 };

struct ExprNode {
  NodeKind kind = NodeKind::number;
  double value = 0.0;       // number, parameter
  std::size_t axis = 0;     // coordinate (0-based)
  std::string name;         // parameter
  Builtin fn = Builtin::exp;  // call
  std::vector<std::shared_ptr<const ExprNode>> args;
  std::size_t offset = 0;   // source position, not part of equality

  bool is_constant() const;
};

using ExprPtr = std::shared_ptr<const ExprNode>;

/// Parsed expression tree together with its declared dimension.
class FieldExpr {
 public:
  FieldExpr(std::size_t dim, ExprPtr root);

  std::size_t dim() const noexcept { return dim_; }
  const ExprNode& root() const noexcept { return *root_; }
  const ExprPtr& root_ptr() const noexcept { return root_; }

  /// Structural equality (source offsets ignored).
  friend bool operator==(const FieldExpr& a, const FieldExpr& b);

 private:
  std::size_t dim_;
  ExprPtr root_;
};

/// Parses `src` for a field of dimension `dim`. Throws ParseError.
FieldExpr parse_field(std::string_view src, std::size_t dim, const ParamMap& params = {});

/// Fully parenthesised text that parses back to the same tree.
std::string print(const FieldExpr& e);
std::string print(const ExprNode& n);

/// Compiles to a jet evaluator. Constant subtrees are folded; domain errors
/// are raised at evaluation time and name the offending subexpression.
ScalarField compile_field(const FieldExpr& e);

/// Convenience: parse then compile.
ScalarField make_field(std::string_view src, std::size_t dim, const ParamMap& params = {});

/// Plain double-precision tree walk, kept independent of the jet path.
double interpret(const FieldExpr& e, const Point& p);

}  // namespace recipfm
