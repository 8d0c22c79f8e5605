#include "recipfm/expr.hpp"

#include <cctype>
#include <array>
#include <charconv>
#include <cmath>
#include <optional>
#include <span>
#include <utility>

#include <fmt/core.h>

#include "recipfm/error.hpp"
#include "recipfm/special.hpp"

namespace recipfm {

bool ExprNode::is_constant() const {
  switch (kind) {
    case NodeKind::number:
    case NodeKind::parameter: return true;
    case NodeKind::coordinate: return false;
    default:
      for (const auto& a : args) {
        if (!a->is_constant()) return false;
      }
      return true;
  }
}

namespace {

bool nodes_equal(const ExprNode& a, const ExprNode& b) {
  if (a.kind != b.kind || a.args.size() != b.args.size()) return false;
  switch (a.kind) {
    case NodeKind::number:
      if (a.value != b.value) return false;
      break;
    case NodeKind::coordinate:
      if (a.axis != b.axis) return false;
      break;
    case NodeKind::parameter:
      if (a.name != b.name || a.value != b.value) return false;
      break;
    case NodeKind::call:
      if (a.fn != b.fn) return false;
      break;
    default: break;
  }
  for (std::size_t i = 0; i < a.args.size(); ++i) {
    if (!nodes_equal(*a.args[i], *b.args[i])) return false;
  }
  return true;
}

const char* builtin_name(Builtin f) {
  switch (f) {
    case Builtin::exp: return "exp";
    case Builtin::ln: return "ln";
    case Builtin::pow: return "pow";
    case Builtin::hyp2f1: return "hyp2f1";
  }
  return "?";
}

std::size_t builtin_arity(Builtin f) {
  switch (f) {
    case Builtin::exp:
    case Builtin::ln: return 1;
    case Builtin::pow: return 2;
    case Builtin::hyp2f1: return 4;
  }
  return 0;
}

// ---------------------------------------------------------------------------
// Parser

class Parser {
 public:
  Parser(std::string_view src, std::size_t dim, const ParamMap& params) : src_(src), dim_(dim), params_(params) {}

  ExprPtr parse() {
    skip_ws();
    if (pos_ >= src_.size()) throw ParseError("empty expression", pos_);
    ExprPtr e = expr();
    skip_ws();
    if (pos_ < src_.size()) throw ParseError(fmt::format("unexpected '{}'", src_[pos_]), pos_);
    return e;
  }

 private:
  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    skip_ws();
    if (pos_ >= src_.size()) throw ParseError(fmt::format("expected '{}' but reached end of input", c), pos_);
    if (src_[pos_] != c) throw ParseError(fmt::format("expected '{}' but found '{}'", c, src_[pos_]), pos_);
    ++pos_;
  }

  static std::shared_ptr<ExprNode> make(NodeKind k, std::size_t offset, std::vector<ExprPtr> args = {}) {
    auto n = std::make_shared<ExprNode>();
    n->kind = k;
    n->offset = offset;
    n->args = std::move(args);
    return n;
  }

  ExprPtr expr() {
    ExprPtr lhs = term();
    while (true) {
      skip_ws();
      const std::size_t at = pos_;
      if (accept('+')) {
        lhs = make(NodeKind::add, at, {lhs, term()});
      } else if (accept('-')) {
        lhs = make(NodeKind::sub, at, {lhs, term()});
      } else {
        return lhs;
      }
    }
  }

  ExprPtr term() {
    ExprPtr lhs = unary();
    while (true) {
      skip_ws();
      const std::size_t at = pos_;
      if (accept('*')) {
        lhs = make(NodeKind::mul, at, {lhs, unary()});
      } else if (accept('/')) {
        lhs = make(NodeKind::div, at, {lhs, unary()});
      } else {
        return lhs;
      }
    }
  }

  ExprPtr unary() {
    skip_ws();
    const std::size_t at = pos_;
    if (accept('-')) return make(NodeKind::neg, at, {unary()});
    return power();
  }

  ExprPtr power() {
    ExprPtr base = primary();
    skip_ws();
    const std::size_t at = pos_;
    if (!accept('^')) return base;
    skip_ws();
    const std::size_t exp_at = pos_;
    ExprPtr exponent = unary();
    if (!exponent->is_constant()) throw ParseError("exponent of '^' must be constant", exp_at);
    const double e = interpret_constant(*exponent);
    if (std::trunc(e) != e) {
      throw ParseError(fmt::format("exponent of '^' must be an integer (got {}); use pow(base, r)", e), exp_at);
    }
    return make(NodeKind::power, at, {base, exponent});
  }

  ExprPtr primary() {
    skip_ws();
    const std::size_t at = pos_;
    if (pos_ >= src_.size()) throw ParseError("unexpected end of input", pos_);
    const char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      ExprPtr e = expr();
      expect(')');
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    throw ParseError(fmt::format("unexpected '{}'", c), at);
  }

  ExprPtr number() {
    const std::size_t at = pos_;
    std::size_t end = pos_;
    while (end < src_.size() && (std::isdigit(static_cast<unsigned char>(src_[end])) || src_[end] == '.')) ++end;
    if (end < src_.size() && (src_[end] == 'e' || src_[end] == 'E')) {
      std::size_t k = end + 1;
      if (k < src_.size() && (src_[k] == '+' || src_[k] == '-')) ++k;
      if (k < src_.size() && std::isdigit(static_cast<unsigned char>(src_[k]))) {
        while (k < src_.size() && std::isdigit(static_cast<unsigned char>(src_[k]))) ++k;
        end = k;
      }
    }
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(src_.data() + at, src_.data() + end, v);
    if (ec != std::errc{} || ptr != src_.data() + end) throw ParseError("malformed number", at);
    pos_ = end;
    auto n = make(NodeKind::number, at);
    n->value = v;
    return n;
  }

  ExprPtr identifier() {
    const std::size_t at = pos_;
    std::size_t end = pos_;
    while (end < src_.size() && (std::isalnum(static_cast<unsigned char>(src_[end])) || src_[end] == '_')) ++end;
    const std::string name(src_.substr(at, end - at));
    pos_ = end;

    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == '(') return call(name, at);

    if (auto axis = coordinate_axis(name)) {
      if (*axis >= dim_) {
        throw ParseError(fmt::format("coordinate {} exceeds declared dimension {}", name, dim_), at);
      }
      auto n = make(NodeKind::coordinate, at);
      n->axis = *axis;
      return n;
    }
    if (auto it = params_.find(name); it != params_.end()) {
      auto n = make(NodeKind::parameter, at);
      n->name = name;
      n->value = it->second;
      return n;
    }
    throw ParseError(fmt::format("unknown identifier '{}'", name), at);
  }

  static std::optional<std::size_t> coordinate_axis(const std::string& name) {
    if (name.size() < 2 || name.size() > 3 || name[0] != 'u' || name[1] == '0') return std::nullopt;
    std::size_t idx = 0;
    for (std::size_t i = 1; i < name.size(); ++i) {
      if (!std::isdigit(static_cast<unsigned char>(name[i]))) return std::nullopt;
      idx = idx * 10 + static_cast<std::size_t>(name[i] - '0');
    }
    if (idx > kMaxDim) return std::nullopt;
    return idx - 1;
  }

  ExprPtr call(const std::string& name, std::size_t at) {
    Builtin fn;
    if (name == "exp") {
      fn = Builtin::exp;
    } else if (name == "ln") {
      fn = Builtin::ln;
    } else if (name == "pow") {
      fn = Builtin::pow;
    } else if (name == "hyp2f1") {
      fn = Builtin::hyp2f1;
    } else {
      throw ParseError(fmt::format("unknown function '{}'", name), at);
    }
    expect('(');
    std::vector<ExprPtr> args;
    std::vector<std::size_t> arg_at;
    skip_ws();
    arg_at.push_back(pos_);
    args.push_back(expr());
    while (accept(',')) {
      skip_ws();
      arg_at.push_back(pos_);
      args.push_back(expr());
    }
    expect(')');
    if (args.size() != builtin_arity(fn)) {
      throw ParseError(fmt::format("{} takes {} argument(s), got {}", name, builtin_arity(fn), args.size()), at);
    }
    // Non-field arguments: pow's exponent, hyp2f1's a, b, c.
    auto require_constant = [&](std::size_t i) {
      if (!args[i]->is_constant()) {
        throw ParseError(fmt::format("argument {} of {} must be constant", i + 1, name), arg_at[i]);
      }
    };
    if (fn == Builtin::pow) require_constant(1);
    if (fn == Builtin::hyp2f1) {
      for (std::size_t i = 0; i < 3; ++i) require_constant(i);
    }
    auto n = make(NodeKind::call, at, std::move(args));
    n->fn = fn;
    return n;
  }

  static double interpret_constant(const ExprNode& n);

  std::string_view src_;
  std::size_t dim_;
  const ParamMap& params_;
  std::size_t pos_ = 0;
};

// ---------------------------------------------------------------------------
// Double-precision interpreter

double interpret_node(const ExprNode& n, std::span<const double> u) {
  auto arg = [&](std::size_t i) { return interpret_node(*n.args[i], u); };
  switch (n.kind) {
    case NodeKind::number:
    case NodeKind::parameter: return n.value;
    case NodeKind::coordinate: return u[n.axis];
    case NodeKind::neg: return -arg(0);
    case NodeKind::add: return arg(0) + arg(1);
    case NodeKind::sub: return arg(0) - arg(1);
    case NodeKind::mul: return arg(0) * arg(1);
    case NodeKind::div: {
      const double d = arg(1);
      if (d == 0.0) throw DomainError("division by zero");
      return arg(0) / d;
    }
    case NodeKind::power: return std::pow(arg(0), arg(1));
    case NodeKind::call:
      switch (n.fn) {
        case Builtin::exp: return std::exp(arg(0));
        case Builtin::ln: {
          const double x = arg(0);
          if (!(x > 0.0)) throw DomainError(fmt::format("ln of non-positive value {}", x));
          return std::log(x);
        }
        case Builtin::pow: {
          const double x = arg(0);
          const double r = arg(1);
          if (std::trunc(r) != r && !(x > 0.0)) throw DomainError("pow with non-integer exponent of non-positive value");
          return std::pow(x, r);
        }
        case Builtin::hyp2f1: return hyp2f1(arg(0), arg(1), arg(2), arg(3));
      }
  }
  throw InvalidArgument("malformed expression node");
}

double Parser::interpret_constant(const ExprNode& n) { return interpret_node(n, {}); }

// ---------------------------------------------------------------------------
// Printer

void print_node(const ExprNode& n, std::string& out) {
  auto bin = [&](const char* op) {
    out += '(';
    print_node(*n.args[0], out);
    out += ' ';
    out += op;
    out += ' ';
    print_node(*n.args[1], out);
    out += ')';
  };
  switch (n.kind) {
    case NodeKind::number: out += fmt::format("{}", n.value); return;
    case NodeKind::parameter: out += n.name; return;
    case NodeKind::coordinate: out += fmt::format("u{}", n.axis + 1); return;
    case NodeKind::neg:
      out += "(-";
      print_node(*n.args[0], out);
      out += ')';
      return;
    case NodeKind::add: bin("+"); return;
    case NodeKind::sub: bin("-"); return;
    case NodeKind::mul: bin("*"); return;
    case NodeKind::div: bin("/"); return;
    case NodeKind::power: bin("^"); return;
    case NodeKind::call:
      out += builtin_name(n.fn);
      out += '(';
      for (std::size_t i = 0; i < n.args.size(); ++i) {
        if (i) out += ", ";
        print_node(*n.args[i], out);
      }
      out += ')';
      return;
  }
}

// ---------------------------------------------------------------------------
// Compiled evaluator

struct Compiled {
  NodeKind kind = NodeKind::number;
  double value = 0.0;              // folded constant
  std::size_t axis = 0;
  Builtin fn = Builtin::exp;
  std::array<double, 3> consts{};  // power exponent / pow r / hyp2f1 a, b, c
  std::vector<Compiled> kids;
  std::string text;                // subexpression, for error messages
};

Compiled compile_node(const ExprNode& n) {
  Compiled c;
  c.text = print(n);
  if (n.is_constant()) {
    try {
      c.kind = NodeKind::number;
      c.value = interpret_node(n, {});
      return c;
    } catch (const DomainError&) {
      // Leave unfolded so the error surfaces at evaluation time.
    }
  }
  c.kind = n.kind;
  c.axis = n.axis;
  c.fn = n.fn;
  switch (n.kind) {
    case NodeKind::number:
    case NodeKind::parameter:
      c.kind = NodeKind::number;
      c.value = n.value;
      break;
    case NodeKind::power:
      c.kids.push_back(compile_node(*n.args[0]));
      c.consts[0] = interpret_node(*n.args[1], {});
      break;
    case NodeKind::call:
      if (n.fn == Builtin::pow) {
        c.kids.push_back(compile_node(*n.args[0]));
        c.consts[0] = interpret_node(*n.args[1], {});
      } else if (n.fn == Builtin::hyp2f1) {
        for (std::size_t i = 0; i < 3; ++i) c.consts[i] = interpret_node(*n.args[i], {});
        c.kids.push_back(compile_node(*n.args[3]));
      } else {
        c.kids.push_back(compile_node(*n.args[0]));
      }
      break;
    default:
      for (const auto& a : n.args) c.kids.push_back(compile_node(*a));
      break;
  }
  return c;
}

Jet eval_compiled(const Compiled& c, const Point& p, int order) {
  auto kid = [&](std::size_t i) { return eval_compiled(c.kids[i], p, order); };
  try {
    switch (c.kind) {
      case NodeKind::number:
      case NodeKind::parameter: return Jet::constant(p.dim(), order, c.value);
      case NodeKind::coordinate: return Jet::coordinate(p, c.axis, order);
      case NodeKind::neg: return -kid(0);
      case NodeKind::add: return kid(0) + kid(1);
      case NodeKind::sub: return kid(0) - kid(1);
      case NodeKind::mul: return kid(0) * kid(1);
      case NodeKind::div: {
        Jet den = kid(1);
        if (den.value() == 0.0) throw DomainError(fmt::format("division by zero in '{}'", c.text));
        return kid(0) / den;
      }
      case NodeKind::power: return pow(kid(0), c.consts[0]);
      case NodeKind::call:
        switch (c.fn) {
          case Builtin::exp: return exp(kid(0));
          case Builtin::ln: return ln(kid(0));
          case Builtin::pow: return pow(kid(0), c.consts[0]);
          case Builtin::hyp2f1: return hyp2f1(c.consts[0], c.consts[1], c.consts[2], kid(0));
        }
    }
  } catch (const DomainError& e) {
    const std::string msg = e.what();
    if (msg.find(" in '") != std::string::npos) throw;
    throw DomainError(fmt::format("{} in '{}'", msg, c.text));
  }
  throw InvalidArgument("malformed compiled node");
}

}  // namespace

// ---------------------------------------------------------------------------

FieldExpr::FieldExpr(std::size_t dim, ExprPtr root) : dim_(dim), root_(std::move(root)) {
  if (!root_) throw InvalidArgument("expression without a root");
}

bool operator==(const FieldExpr& a, const FieldExpr& b) {
  return a.dim_ == b.dim_ && nodes_equal(*a.root_, *b.root_);
}

FieldExpr parse_field(std::string_view src, std::size_t dim, const ParamMap& params) {
  if (dim == 0 || dim > kMaxDim) throw InvalidArgument(fmt::format("field dimension {} outside [1, {}]", dim, kMaxDim));
  Parser parser(src, dim, params);
  return FieldExpr(dim, parser.parse());
}

std::string print(const ExprNode& n) {
  std::string out;
  print_node(n, out);
  return out;
}

std::string print(const FieldExpr& e) { return print(e.root()); }

ScalarField compile_field(const FieldExpr& e) {
  auto compiled = std::make_shared<const Compiled>(compile_node(e.root()));
  return ScalarField(
      e.dim(), [compiled](const Point& p, int order) { return eval_compiled(*compiled, p, order); }, print(e));
}

ScalarField make_field(std::string_view src, std::size_t dim, const ParamMap& params) {
  return compile_field(parse_field(src, dim, params));
}

double interpret(const FieldExpr& e, const Point& p) {
  if (p.dim() != e.dim()) {
    throw InvalidArgument(fmt::format("expression of dimension {} evaluated at a point of dimension {}", e.dim(), p.dim()));
  }
  return interpret_node(e.root(), p.coords());
}

}  // namespace recipfm
