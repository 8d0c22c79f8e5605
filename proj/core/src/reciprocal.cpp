#include "recipfm/reciprocal.hpp"

#include <cmath>
#include <memory>
#include <mutex>
#include <numeric>
#include <utility>

#include <fmt/core.h>

#include "recipfm/error.hpp"

namespace recipfm {

namespace {

constexpr double kMinAbsDensity = 1e-6;

std::vector<Point> check_set(std::span<const Point> points, const Point& fallback) {
  if (points.empty()) return {fallback};
  return {points.begin(), points.end()};
}

void require_dim(const ScalarField& A, std::size_t n, const char* what) {
  if (!A.valid()) throw InvalidArgument(fmt::format("{}: empty density", what));
  if (A.dim() != n) throw InvalidArgument(fmt::format("{}: density of dimension {} for a system of dimension {}", what, A.dim(), n));
}

}  // namespace

// --- Density equations ----------------------------------------------------

ResidualReport density_residual(std::size_t dim, const OffDiagonalFn& offdiag, const ScalarField& A,
                                std::span<const Point> points, double tol) {
  require_dim(A, dim, "density_residual");
  ResidualReport rep("density", points, tol);
  for (std::size_t pi = 0; pi < points.size(); ++pi) {
    const OffDiagonal g = offdiag(points[pi], 0);
    const Jet a = A(points[pi], 2);
    for (std::size_t i = 0; i < dim; ++i)
      for (std::size_t j = i + 1; j < dim; ++j)
        rep.add(pi, {i, j}, a.d(i, j) - g(i, j).value() * a.d(i) - g(j, i).value() * a.d(j));
  }
  rep.finalize();
  return rep;
}

ResidualReport density_residual(const DiagonalSystem& sys, const ScalarField& A, std::span<const Point> points,
                                double tol) {
  return density_residual(sys.dim(), offdiagonal_of(sys), A, points, tol);
}

GradingResult grading_residual(const ScalarField& A, UnitField field, std::span<const Point> points, double tol) {
  GradingResult out;
  out.report = ResidualReport(field == UnitField::e ? "grading-e" : "grading-E", points, tol);
  std::vector<double> r(points.size());
  for (std::size_t pi = 0; pi < points.size(); ++pi) {
    const Point& p = points[pi];
    const Jet a = A(p, 1);
    if (!(std::abs(a.value()) >= kMinAbsDensity)) {
      throw DomainError(fmt::format("grading: |A| = {} below {} at sample point {}", std::abs(a.value()), kMinAbsDensity, pi));
    }
    double s = 0.0;
    for (std::size_t l = 0; l < p.dim(); ++l) s += (field == UnitField::e ? 1.0 : p[l]) * a.d(l);
    r[pi] = s / a.value();
  }
  if (!r.empty()) out.estimate = std::accumulate(r.begin(), r.end(), 0.0) / static_cast<double>(r.size());
  for (std::size_t pi = 0; pi < r.size(); ++pi) out.report.add(pi, {}, r[pi] - out.estimate);
  out.report.finalize();
  return out;
}

ResidualReport a_system_residual(std::size_t dim, const OffDiagonalFn& offdiag, const ScalarField& A,
                                 std::span<const Point> points, double tol) {
  require_dim(A, dim, "a_system_residual");
  ResidualReport rep("a-system", points, tol);
  for (std::size_t pi = 0; pi < points.size(); ++pi) {
    const OffDiagonal g = offdiag(points[pi], 0);
    const Jet a = A(points[pi], 2);
    if (a.value() == 0.0) throw DomainError(fmt::format("a-system: A = 0 at sample point {}", pi));
    double sum = 0.0;
    for (std::size_t l = 0; l < dim; ++l) sum += a.d(l);
    for (std::size_t p = 0; p < dim; ++p) {
      for (std::size_t q = p + 1; q < dim; ++q)
        rep.add(pi, {p, q}, a.d(q, p) - a.d(p) * g(p, q).value() - a.d(q) * g(q, p).value());
      double r = a.d(p, p) - a.d(p) * sum / a.value();
      for (std::size_t l = 0; l < dim; ++l)
        if (l != p) r += a.d(l, p);
      rep.add(pi, {p, p}, r);
    }
  }
  rep.finalize();
  return rep;
}

ResidualReport a_system_residual(const DiagonalSystem& sys, const ScalarField& A, std::span<const Point> points,
                                 double tol) {
  return a_system_residual(sys.dim(), offdiagonal_of(sys), A, points, tol);
}

ResidualReport theta_residual(const DiagonalSystem& sys, const ScalarField& A, std::span<const Point> points,
                              double tol) {
  const std::size_t n = sys.dim();
  require_dim(A, n, "theta_residual");
  ResidualReport rep("theta", points, tol);
  for (std::size_t pi = 0; pi < points.size(); ++pi) {
    const OffDiagonal g = christoffel_primary_all(sys, points[pi], 0);
    const Jet a = A(points[pi], 2);
    const Jet a1 = a.truncated(1);
    std::vector<Jet> th;
    for (std::size_t l = 0; l < n; ++l) th.push_back(a.derivative(l) / a1);
    double sum = 0.0;
    for (const Jet& t : th) sum += t.value();
    for (std::size_t p = 0; p < n; ++p) {
      const double tp = th[p].value();
      for (std::size_t q = p + 1; q < n; ++q) {
        const double tq = th[q].value();
        rep.add(pi, {p, q}, th[p].d(q) - tp * g(p, q).value() - tq * g(q, p).value() + tp * tq);
      }
      double r = th[p].d(p) + tp * tp - tp * sum;
      for (std::size_t l = 0; l < n; ++l)
        if (l != p) r += th[p].d(l) + tp * th[l].value();
      rep.add(pi, {p, p}, r);
    }
  }
  rep.finalize();
  return rep;
}

ResidualReport covariant_hessian_residual(const ConnectionTable& conn, Product product, const ScalarField& A,
                                          std::span<const Point> points, double tol) {
  const std::size_t n = conn.dim();
  require_dim(A, n, "covariant_hessian_residual");
  ResidualReport rep(product == Product::circ ? "hessian-circ" : "hessian-star", points, tol);
  for (std::size_t pi = 0; pi < points.size(); ++pi) {
    const Point& x = points[pi];
    const ChristoffelTable t = conn.at(x, 0);
    const Jet a = A(x, 2);
    if (a.value() == 0.0) throw DomainError(fmt::format("covariant Hessian: A = 0 at sample point {}", pi));
    double XA = 0.0;
    for (std::size_t l = 0; l < n; ++l) XA += (product == Product::circ ? 1.0 : x[l]) * a.d(l);
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = 0; q < n; ++q) {
        double lhs = a.d(q, p);
        for (std::size_t l = 0; l < n; ++l) lhs -= t(l, q, p).value() * a.d(l);
        double rhs = 0.0;
        if (p == q) {
          rhs = XA / a.value() * a.d(p);
          if (product == Product::star) {
            if (x[p] == 0.0) throw DomainError(fmt::format("star product needs u{} != 0", p + 1));
            rhs /= x[p];
          }
        }
        rep.add(pi, {p, q}, lhs - rhs);
      }
  }
  rep.finalize();
  return rep;
}

// --- Current -----------------------------------------------------------------

namespace {

std::vector<std::size_t> axis_order(std::span<const std::size_t> axes, std::size_t n) {
  if (axes.empty()) {
    std::vector<std::size_t> out(n);
    std::iota(out.begin(), out.end(), std::size_t{0});
    return out;
  }
  std::vector<std::size_t> out(axes.begin(), axes.end());
  std::vector<bool> seen(n, false);
  if (out.size() != n) throw InvalidArgument("axis order must list every axis once");
  for (std::size_t a : out) {
    if (a >= n || seen[a]) throw InvalidArgument("axis order must list every axis once");
    seen[a] = true;
  }
  return out;
}

// Signed quantities whose zero set the path must not meet.
std::vector<double> locus_values(const DiagonalSystem& sys, const ScalarField& A, const Point& q) {
  const std::size_t n = sys.dim();
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = sys.velocity(i).value(q);
  std::vector<double> out;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) {
      out.push_back(q[i] - q[j]);
      out.push_back(v[i] - v[j]);
    }
  out.push_back(A.value(q));
  return out;
}

const char* locus_name(std::size_t idx, std::size_t count) {
  if (idx + 1 == count) return "A = 0";
  return idx % 2 == 0 ? "u^i = u^j" : "v^i = v^j";
}

void scan_segment(const DiagonalSystem& sys, const ScalarField& A, std::vector<double> q, std::size_t axis, double a,
                  double b, int steps, std::size_t seg) {
  std::vector<double> first;
  for (int s = 0; s <= steps; ++s) {
    q[axis] = a + (b - a) * static_cast<double>(s) / steps;
    std::vector<double> vals;
    try {
      vals = locus_values(sys, A, Point(q));
    } catch (const DomainError& e) {
      throw DomainError(fmt::format("current path segment {} (axis u{}): {}", seg, axis + 1, e.what()));
    }
    if (s == 0) first = vals;
    for (std::size_t k = 0; k < vals.size(); ++k) {
      if (!std::isfinite(vals[k]) || vals[k] == 0.0 || (vals[k] > 0) != (first[k] > 0)) {
        throw DomainError(fmt::format("current path segment {} (axis u{}, {} -> {}) crosses {}", seg, axis + 1, a, b,
                                      locus_name(k, vals.size())));
      }
    }
  }
}

}  // namespace

double current_value(const DiagonalSystem& sys, const ScalarField& A, const Point& base, const Point& p,
                     std::span<const std::size_t> axes, const CurrentOptions& opts) {
  const std::size_t n = sys.dim();
  require_dim(A, n, "current");
  if (base.dim() != n || p.dim() != n) throw InvalidArgument("current: point dimension mismatch");
  const std::vector<std::size_t> order = axis_order(axes, n);
  std::vector<double> q(base.coords().begin(), base.coords().end());
  double total = 0.0;
  for (std::size_t seg = 0; seg < order.size(); ++seg) {
    const std::size_t i = order[seg];
    const double a = q[i];
    const double b = p[i];
    if (a == b) continue;
    scan_segment(sys, A, q, i, a, b, opts.scan, seg);
    const ScalarField& vi = sys.velocity(i);
    auto f = [&](double t) {
      std::vector<double> x = q;
      x[i] = t;
      const Point pt(std::move(x));
      return vi.value(pt) * A(pt, 1).d(i);
    };
    try {
      total += integrate_adaptive(f, a, b, opts.quadrature);
    } catch (const Error& e) {
      throw DomainError(fmt::format("current path segment {} (axis u{}): {}", seg, i + 1, e.what()));
    }
    q[i] = b;
  }
  return total;
}

bool current_path_admissible(const DiagonalSystem& sys, const ScalarField& A, const Point& base, const Point& p,
                             const CurrentOptions& opts) {
  const std::size_t n = sys.dim();
  std::vector<double> q(base.coords().begin(), base.coords().end());
  try {
    for (std::size_t i = 0; i < n; ++i) {
      if (q[i] != p[i]) scan_segment(sys, A, q, i, q[i], p[i], opts.scan, i);
      q[i] = p[i];
    }
  } catch (const DomainError&) {
    return false;
  }
  return true;
}

ScalarField current_from_density(const DiagonalSystem& sys, const ScalarField& A, const Point& base,
                                 const CurrentOptions& opts) {
  const std::size_t n = sys.dim();
  require_dim(A, n, "current_from_density");
  struct Cache {
    std::mutex m;
    std::optional<Point> at;
    double value = 0.0;
  };
  auto cache = std::make_shared<Cache>();
  auto eval = [sys, A, base, opts, cache, n](const Point& p, int order) {
    double value = 0.0;
    {
      std::lock_guard lock(cache->m);
      if (cache->at && *cache->at == p) {
        value = cache->value;
      } else {
        value = current_value(sys, A, base, p, {}, opts);
        cache->at = p;
        cache->value = value;
      }
    }
    Jet proto = Jet::constant(n, order, value);
    if (order == 0) return proto;
    const Jet a = A(p, order);
    std::vector<Jet> w;
    w.reserve(n);
    for (std::size_t i = 0; i < n; ++i) w.push_back(sys.velocity(i)(p, order - 1) * a.derivative(i));
    std::vector<double> c(proto.coeffs().begin(), proto.coeffs().end());
    for (std::size_t idx = 1; idx < c.size(); ++idx) {
      const MultiIndex alpha = proto.index_at(idx);
      std::size_t i = 0;
      while (alpha[i] == 0) ++i;
      MultiIndex beta = alpha;
      beta.set(i, alpha[i] - 1);
      // d^alpha B / alpha! = (d^beta w_i / beta!) / alpha_i
      c[idx] = w[i].coeff(beta) / alpha[i];
    }
    return Jet::from_coeffs(n, order, std::move(c));
  };
  return ScalarField(n, std::move(eval), fmt::format("current({})", A.label()));
}

// --- Transformation ------------------------------------------------------------

OffDiagonalFn transformed_offdiagonal(OffDiagonalFn offdiag, ScalarField A) {
  return [offdiag = std::move(offdiag), A = std::move(A)](const Point& p, int order) {
    OffDiagonal g = offdiag(p, order);
    const Jet a = A(p, order + 1);
    const Jet a0 = a.truncated(order);
    if (a0.value() == 0.0) throw DomainError("transformed connection: A = 0");
    std::vector<Jet> w;
    for (std::size_t j = 0; j < g.dim(); ++j) w.push_back(a.derivative(j) / a0);
    for (std::size_t i = 0; i < g.dim(); ++i)
      for (std::size_t j = 0; j < g.dim(); ++j)
        if (i != j) g(i, j) -= w[j];
    return g;
  };
}

ConnectionTable transformed_natural(const DiagonalSystem& sys, const ScalarField& A) {
  require_dim(A, sys.dim(), "transformed_natural");
  return natural_from_offdiagonal(sys.dim(), transformed_offdiagonal(offdiagonal_of(sys), A),
                                  ConnectionKind::transformed_natural, "transformed-natural");
}

ConnectionTable transformed_dual(const DiagonalSystem& sys, const ScalarField& A) {
  require_dim(A, sys.dim(), "transformed_dual");
  return dual_from_offdiagonal(sys.dim(), transformed_offdiagonal(offdiagonal_of(sys), A),
                               ConnectionKind::transformed_dual, "transformed-dual");
}

ConnectionTable intrinsic_transform(const ConnectionTable& base, Product product, const ScalarField& A,
                                    ConnectionKind kind, std::string label) {
  const std::size_t n = base.dim();
  require_dim(A, n, "intrinsic_transform");
  auto build = [base, product, A, n](const Point& p, int order) {
    ChristoffelTable t = base.at(p, order);
    const std::size_t m = p.dim();
    const Jet a = A(p, order + 1);
    const Jet a0 = a.truncated(order);
    if (a0.value() == 0.0) throw DomainError("intrinsic transform: A = 0");
    std::vector<Jet> w, X, cdiag;
    const Jet zero = Jet::constant(m, order, 0.0);
    for (std::size_t l = 0; l < n; ++l) {
      w.push_back(a.derivative(l) / a0);
      if (product == Product::circ) {
        X.push_back(Jet::constant(m, order, 1.0));
        cdiag.push_back(Jet::constant(m, order, 1.0));
      } else {
        const Jet u = Jet::coordinate(p, l, order);
        if (u.value() == 0.0) throw DomainError(fmt::format("star product needs u{} != 0", l + 1));
        X.push_back(u);
        cdiag.push_back(1.0 / u);
      }
    }
    auto c = [&](std::size_t i, std::size_t j, std::size_t k) -> const Jet& {
      return (i == j && j == k) ? cdiag[i] : zero;
    };
    ChristoffelTable out(n, m, order);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k) {
          Jet g = t(i, j, k);
          for (std::size_t l = 0; l < n; ++l) {
            g += c(i, j, k) * X[l] * w[l];
            g -= c(i, l, j) * w[k] * X[l];
            g += c(l, j, k) * w[l] * X[i];
            g -= c(i, l, k) * w[j] * X[l];
          }
          out(i, j, k) = std::move(g);
        }
    return out;
  };
  return ConnectionTable(n, kind, std::move(build), label.empty() ? "intrinsic" : std::move(label));
}

TransformResult transform(const DiagonalSystem& sys, const ConservationDensity& gen, const Point& base,
                          bool with_dual, std::span<const Point> check_points, double tol, const CurrentOptions& opts) {
  const std::size_t n = sys.dim();
  require_dim(gen.A, n, "transform");
  const std::vector<Point> pts = check_set(check_points, base);
  const ResidualReport dens = density_residual(sys, gen.A, pts, tol);
  if (!dens.pass) {
    throw PreconditionError(fmt::format("generator '{}' is not a conserved density (residual {:.3e} > {:.1e})",
                                        gen.A.label(), dens.max_abs, tol));
  }
  ScalarField B = current_from_density(sys, gen.A, base, opts);
  std::vector<ScalarField> vt;
  vt.reserve(n);
  for (std::size_t i = 0; i < n; ++i) vt.push_back((gen.A * sys.velocity(i) - B).with_label(fmt::format("v~{}", i + 1)));
  const std::string label = sys.label().empty() ? "transformed" : sys.label() + "~";
  std::optional<ConnectionTable> dual;
  if (with_dual) dual = transformed_dual(sys, gen.A);
  return TransformResult{DiagonalSystem(std::move(vt), label), transformed_natural(sys, gen.A), std::move(dual), gen,
                         std::move(B), base};
}

ResidualReport christoffel_law_residual(const TransformResult& result, const DiagonalSystem& original,
                              std::span<const Point> points, double tol) {
  ResidualReport rep("christoffel-law", points, tol);
  const OffDiagonalFn expected = transformed_offdiagonal(offdiagonal_of(original), result.generator.A);
  const std::size_t n = original.dim();
  for (std::size_t pi = 0; pi < points.size(); ++pi) {
    const OffDiagonal got = christoffel_primary_all(result.system, points[pi], 0);
    const OffDiagonal want = expected(points[pi], 0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j) rep.add(pi, {i, j}, got(i, j).value() - want(i, j).value());
  }
  rep.finalize();
  return rep;
}

BiflatVerdict biflat_admissibility(const DiagonalSystem& sys, const ScalarField& A, std::span<const Point> points,
                                   double tol) {
  BiflatVerdict v;
  v.density = density_residual(sys, A, points, tol);
  v.e_grading = grading_residual(A, UnitField::e, points, tol);
  v.E_grading = grading_residual(A, UnitField::E, points, tol);
  v.h = v.e_grading.estimate;
  v.k = v.E_grading.estimate;
  v.pass = v.density.pass && v.e_grading.report.pass && std::abs(v.h) <= tol && v.E_grading.report.pass;
  return v;
}

// --- Orbit ---------------------------------------------------------------------

OrbitResult orbit_compose(const DiagonalSystem& sys, const ConservationDensity& gen0,
                          const ConservationDensity& gen1, const Point& base, std::span<const Point> points,
                          double tol, double grading_tol, const CurrentOptions& opts) {
  const std::size_t n = sys.dim();
  const TransformResult step1 = transform(sys, gen0, base, false, points, grading_tol, opts);
  const TransformResult step2 = transform(step1.system, gen1, base, false, points, grading_tol, opts);
  ConservationDensity composite;
  composite.A = (gen0.A * gen1.A).with_label(fmt::format("({})*({})", gen0.A.label(), gen1.A.label()));
  const TransformResult direct = transform(sys, composite, base, false, points, grading_tol, opts);

  OrbitResult out;
  out.christoffel = ResidualReport("orbit-christoffel", points, tol);
  for (std::size_t pi = 0; pi < points.size(); ++pi) {
    const OffDiagonal two = christoffel_primary_all(step2.system, points[pi], 0);
    const OffDiagonal one = christoffel_primary_all(direct.system, points[pi], 0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j) out.christoffel.add(pi, {i, j}, two(i, j).value() - one(i, j).value());
  }
  out.christoffel.finalize();

  const GradingResult g0 = grading_residual(gen0.A, UnitField::e, points, grading_tol);
  const GradingResult g1 = grading_residual(gen1.A, UnitField::e, points, grading_tol);
  const GradingResult gc = grading_residual(composite.A, UnitField::e, points, grading_tol);
  out.h0 = g0.estimate;
  out.h1 = g1.estimate;
  out.h_composite = gc.estimate;
  out.grading = ResidualReport("orbit-grading", points, grading_tol);
  out.grading.absorb(g0.report);
  out.grading.absorb(g1.report);
  out.grading.absorb(gc.report);
  out.grading.add(0, {}, out.h1 - (out.h_composite - out.h0));
  out.grading.finalize();
  out.pass = out.christoffel.pass && out.grading.pass;
  return out;
}

}  // namespace recipfm
