#include "recipfm/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include <fmt/core.h>

#include "recipfm/error.hpp"

namespace recipfm {

DiagonalSystem::DiagonalSystem(std::vector<ScalarField> velocities, std::string label)
    : velocities_(std::move(velocities)), label_(std::move(label)) {
  const std::size_t n = velocities_.size();
  if (n < 2 || n > kMaxDim) throw InvalidArgument(fmt::format("diagonal system needs 2..{} velocities, got {}", kMaxDim, n));
  for (std::size_t i = 0; i < n; ++i) {
    if (!velocities_[i].valid()) throw InvalidArgument(fmt::format("velocity v{} is empty", i + 1));
    if (velocities_[i].dim() != n) {
      throw InvalidArgument(
          fmt::format("velocity v{} has dimension {} in a system of dimension {}", i + 1, velocities_[i].dim(), n));
    }
  }
}

OffDiagonal::OffDiagonal(std::size_t dim, int order)
    : dim_(dim), order_(order), data_(dim * dim, Jet::constant(dim, order, 0.0)) {}

ChristoffelTable::ChristoffelTable(std::size_t dim, std::size_t point_dim, int order)
    : dim_(dim), order_(order), data_(dim * dim * dim, Jet::constant(point_dim, order, 0.0)) {}

const char* to_string(ConnectionKind kind) {
  switch (kind) {
    case ConnectionKind::natural: return "natural";
    case ConnectionKind::dual: return "dual";
    case ConnectionKind::transformed_natural: return "transformed-natural";
    case ConnectionKind::transformed_dual: return "transformed-dual";
    case ConnectionKind::custom: return "custom";
  }
  return "unknown";
}

ConnectionTable::ConnectionTable(std::size_t dim, ConnectionKind kind, Builder builder, std::string label)
    : dim_(dim), kind_(kind), builder_(std::move(builder)), label_(std::move(label)) {
  if (dim_ < 2 || dim_ > kMaxDim) throw InvalidArgument(fmt::format("connection dimension {} outside [2, {}]", dim_, kMaxDim));
  if (!builder_) throw InvalidArgument("connection needs a builder");
}

ChristoffelTable ConnectionTable::at(const Point& p, int order) const {
  if (p.dim() != dim_) {
    throw InvalidArgument(fmt::format("connection of dimension {} evaluated at a point of dimension {}", dim_, p.dim()));
  }
  ChristoffelTable t = builder_(p, order);
  if (t.dim() != dim_ || t.order() != order) throw InvalidArgument("connection builder returned a mismatched table");
  return t;
}

Jet ConnectionTable::gamma(std::size_t i, std::size_t j, std::size_t k, const Point& p, int order) const {
  if (i >= dim_ || j >= dim_ || k >= dim_) throw InvalidArgument("Christoffel index out of range");
  return at(p, order)(i, j, k);
}

ResidualReport::ResidualReport(std::string lbl, std::span<const Point> pts, double tol)
    : label(std::move(lbl)), points(pts.begin(), pts.end()), tolerance(tol) {}

void ResidualReport::add(std::size_t point, std::vector<std::size_t> indices, double residual) {
  entries.push_back({point, std::move(indices), residual});
  const double a = std::isfinite(residual) ? std::abs(residual) : std::numeric_limits<double>::infinity();
  max_abs = std::max(max_abs, a);
  pass = max_abs <= tolerance;
}

void ResidualReport::finalize() {
  max_abs = 0.0;
  for (const auto& e : entries) {
    const double a = std::isfinite(e.residual) ? std::abs(e.residual) : std::numeric_limits<double>::infinity();
    max_abs = std::max(max_abs, a);
  }
  pass = max_abs <= tolerance;
}

void ResidualReport::absorb(const ResidualReport& other) {
  entries.insert(entries.end(), other.entries.begin(), other.entries.end());
  finalize();
}

// --- Christoffel symbols ----------------------------------------------------

namespace {

void check_order(int order) {
  if (order < 0 || order + 1 > kMaxOrder) {
    throw InvalidArgument(fmt::format("Christoffel symbols are available up to order {}, requested {}", kMaxOrder - 1, order));
  }
}

Jet primary_from(const std::vector<Jet>& v, std::size_t i, std::size_t j, int order) {
  const Jet num = v[i].derivative(j);
  const Jet den = v[j].truncated(order) - v[i].truncated(order);
  const double scale = std::max({1.0, std::abs(v[i].value()), std::abs(v[j].value())});
  if (std::abs(den.value()) <= 1e-12 * scale) {
    throw DomainError(fmt::format("coincident characteristic velocities v{} = v{} ({})", i + 1, j + 1, v[i].value()));
  }
  return num / den;
}

}  // namespace

Jet christoffel_primary(const DiagonalSystem& sys, std::size_t i, std::size_t j, const Point& p, int order) {
  check_order(order);
  const std::size_t n = sys.dim();
  if (i >= n || j >= n) throw InvalidArgument("Christoffel index out of range");
  if (i == j) throw InvalidArgument("christoffel_primary needs i != j");
  std::vector<Jet> v(n);
  v[i] = sys.velocity(i)(p, order + 1);
  v[j] = sys.velocity(j)(p, order + 1);
  return primary_from(v, i, j, order);
}

OffDiagonal christoffel_primary_all(const DiagonalSystem& sys, const Point& p, int order) {
  check_order(order);
  const std::size_t n = sys.dim();
  std::vector<Jet> v;
  v.reserve(n);
  for (std::size_t i = 0; i < n; ++i) v.push_back(sys.velocity(i)(p, order + 1));
  OffDiagonal g(n, order);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) g(i, j) = primary_from(v, i, j, order);
  return g;
}

OffDiagonalFn offdiagonal_of(const DiagonalSystem& sys) {
  return [sys](const Point& p, int order) { return christoffel_primary_all(sys, p, order); };
}

namespace {

OffDiagonal checked_offdiag(const OffDiagonalFn& f, std::size_t dim, const Point& p, int order) {
  OffDiagonal g = f(p, order);
  if (g.dim() != dim || g.order() != order) throw InvalidArgument("off-diagonal generator returned a mismatched matrix");
  return g;
}

}  // namespace

ConnectionTable natural_from_offdiagonal(std::size_t dim, OffDiagonalFn offdiag, ConnectionKind kind, std::string label) {
  auto build = [dim, offdiag](const Point& p, int order) {
    const OffDiagonal g = checked_offdiag(offdiag, dim, p, order);
    ChristoffelTable t(dim, p.dim(), order);
    for (std::size_t i = 0; i < dim; ++i) {
      Jet diag = Jet::constant(p.dim(), order, 0.0);
      for (std::size_t j = 0; j < dim; ++j) {
        if (i == j) continue;
        t(i, i, j) = g(i, j);
        t(i, j, i) = g(i, j);
        t(i, j, j) = -g(i, j);
        diag -= g(i, j);
      }
      t(i, i, i) = diag;
    }
    return t;
  };
  return ConnectionTable(dim, kind, std::move(build), std::move(label));
}

ConnectionTable dual_from_offdiagonal(std::size_t dim, OffDiagonalFn offdiag, ConnectionKind kind, std::string label) {
  auto build = [dim, offdiag](const Point& p, int order) {
    const OffDiagonal g = checked_offdiag(offdiag, dim, p, order);
    std::vector<Jet> u;
    u.reserve(dim);
    for (std::size_t i = 0; i < dim; ++i) {
      if (p[i] == 0.0) throw DomainError(fmt::format("dual connection needs u{} != 0", i + 1));
      u.push_back(Jet::coordinate(p, i, order));
    }
    ChristoffelTable t(dim, p.dim(), order);
    for (std::size_t i = 0; i < dim; ++i) {
      Jet diag = -1.0 / u[i];
      for (std::size_t l = 0; l < dim; ++l) {
        if (i == l) continue;
        t(i, i, l) = g(i, l);
        t(i, l, i) = g(i, l);
        t(i, l, l) = -(u[i] / u[l]) * g(i, l);
        diag -= (u[l] / u[i]) * g(i, l);
      }
      t(i, i, i) = diag;
    }
    return t;
  };
  return ConnectionTable(dim, kind, std::move(build), std::move(label));
}

ConnectionTable natural_connection(const DiagonalSystem& sys) {
  return natural_from_offdiagonal(sys.dim(), offdiagonal_of(sys), ConnectionKind::natural,
                                  sys.label().empty() ? "natural" : sys.label() + "/natural");
}

ConnectionTable dual_connection(const DiagonalSystem& sys) {
  return dual_from_offdiagonal(sys.dim(), offdiagonal_of(sys), ConnectionKind::dual,
                               sys.label().empty() ? "dual" : sys.label() + "/dual");
}

// --- Residual checks ----------------------------------------------------------

ResidualReport sh_residual(const DiagonalSystem& sys, std::span<const Point> points, double tol) {
  ResidualReport rep("semi-hamiltonian", points, tol);
  const std::size_t n = sys.dim();
  if (n < 3) return rep;
  for (std::size_t pi = 0; pi < points.size(); ++pi) {
    const OffDiagonal g = christoffel_primary_all(sys, points[pi], 1);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k) {
          if (i == j || j == k || i == k) continue;
          const double r = g(k, j).d(i) - g(k, j).value() * g(j, i).value() + g(k, i).value() * g(k, j).value() -
                           g(k, i).value() * g(i, j).value();
          rep.add(pi, {i, j, k}, r);
          if (j < k) rep.add(pi, {i, j, k, 0}, g(i, k).d(j) - g(i, j).d(k));
        }
  }
  rep.finalize();
  return rep;
}

ResidualReport curvature_natural_residual(const ConnectionTable& conn, std::span<const Point> points, double tol) {
  if (conn.kind() != ConnectionKind::natural && conn.kind() != ConnectionKind::transformed_natural) {
    throw InvalidArgument(fmt::format("curvature_natural_residual needs a natural table, got {}", to_string(conn.kind())));
  }
  ResidualReport rep("curvature-natural", points, tol);
  const std::size_t n = conn.dim();
  for (std::size_t pi = 0; pi < points.size(); ++pi) {
    const ChristoffelTable t = conn.at(points[pi], 1);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t k = 0; k < n; ++k) {
        if (k == i) continue;
        // R^i_{iki}
        rep.add(pi, {i, i, k, i}, t(i, i, i).d(k) - t(i, i, k).d(i));
      }
      for (std::size_t q = 0; q < n; ++q) {
        if (q == i) continue;
        // R^i_{qqi}
        double r = t(i, q, i).d(q) - t(i, q, q).d(i) +
                   t(i, i, q).value() * (t(i, i, q).value() - t(q, i, q).value()) -
                   t(i, i, i).value() * t(i, q, q).value() - t(i, q, i).value() * t(q, q, q).value();
        for (std::size_t p = 0; p < n; ++p) {
          if (p == i || p == q) continue;
          r -= t(i, p, i).value() * t(p, q, q).value();
        }
        rep.add(pi, {i, q, q, i}, r);
      }
    }
  }
  rep.finalize();
  return rep;
}

CurvatureTensor::CurvatureTensor(std::size_t dim) : dim_(dim), data_(dim * dim * dim * dim, 0.0) {}

double CurvatureTensor::max_abs() const {
  double m = 0.0;
  for (double x : data_) m = std::max(m, std::isfinite(x) ? std::abs(x) : std::numeric_limits<double>::infinity());
  return m;
}

CurvatureTensor curvature_oracle(const ConnectionTable& conn, const Point& p) {
  const std::size_t n = conn.dim();
  const ChristoffelTable t = conn.at(p, 1);
  CurvatureTensor R(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t k = 0; k < n; ++k)
        for (std::size_t l = 0; l < n; ++l) {
          double r = t(i, l, j).d(k) - t(i, k, j).d(l);
          for (std::size_t m = 0; m < n; ++m) {
            r += t(i, k, m).value() * t(m, l, j).value() - t(i, l, m).value() * t(m, k, j).value();
          }
          R(i, j, k, l) = r;
        }
  return R;
}

ResidualReport curvature_full_residual(const ConnectionTable& conn, std::span<const Point> points, double tol) {
  ResidualReport rep("curvature", points, tol);
  const std::size_t n = conn.dim();
  for (std::size_t pi = 0; pi < points.size(); ++pi) {
    const CurvatureTensor R = curvature_oracle(conn, points[pi]);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t k = 0; k < n; ++k)
          for (std::size_t l = 0; l < n; ++l) rep.add(pi, {i, j, k, l}, R(i, j, k, l));
  }
  rep.finalize();
  return rep;
}

ResidualReport identity_parallel_residual(const ConnectionTable& conn, UnitField field, std::span<const Point> points,
                                          double tol) {
  const ConnectionKind kind = conn.kind();
  const bool natural = kind == ConnectionKind::natural || kind == ConnectionKind::transformed_natural;
  const bool dual = kind == ConnectionKind::dual || kind == ConnectionKind::transformed_dual;
  if ((field == UnitField::e && dual) || (field == UnitField::E && natural)) {
    throw InvalidArgument(fmt::format("field {} does not pair with a {} connection", field == UnitField::e ? "e" : "E",
                                      to_string(kind)));
  }
  ResidualReport rep(field == UnitField::e ? "parallel-e" : "parallel-E", points, tol);
  const std::size_t n = conn.dim();
  for (std::size_t pi = 0; pi < points.size(); ++pi) {
    const Point& p = points[pi];
    const ChristoffelTable t = conn.at(p, 0);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        double r = (field == UnitField::E && i == j) ? 1.0 : 0.0;
        for (std::size_t l = 0; l < n; ++l) r += t(i, j, l).value() * (field == UnitField::e ? 1.0 : p[l]);
        rep.add(pi, {i, j}, r);
      }
  }
  rep.finalize();
  return rep;
}

}  // namespace recipfm
