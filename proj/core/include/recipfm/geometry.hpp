#pragma once

// Natural and dual connections of a diagonal hydrodynamic system and the
// residual checks built on them (semi-Hamiltonian condition, curvature,
// parallelism of the unit and Euler fields).
//
// Index convention: all indices are 0-based; Gamma(i, j, k) is the
// Christoffel symbol Gamma^i_{jk}. Curvature is
//   R^i_{jkl} = d_k Gamma^i_{lj} - d_l Gamma^i_{kj}
//             + sum_m (Gamma^i_{km} Gamma^m_{lj} - Gamma^i_{lm} Gamma^m_{kj}),
// and every flatness check asserts that all components vanish.

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "recipfm/field.hpp"
#include "recipfm/jet.hpp"

namespace recipfm {

inline constexpr double kSecondOrderTol = 1e-8;
inline constexpr double kThirdOrderTol = 1e-6;

/// u^i_t = v^i(u) u^i_x, i = 1..n.
class DiagonalSystem {
 public:
  explicit DiagonalSystem(std::vector<ScalarField> velocities, std::string label = {});

  std::size_t dim() const noexcept { return velocities_.size(); }
  const ScalarField& velocity(std::size_t i) const { return velocities_.at(i); }
  const std::vector<ScalarField>& velocities() const noexcept { return velocities_; }
  const std::string& label() const noexcept { return label_; }

 private:
  std::vector<ScalarField> velocities_;
  std::string label_;
};

/// Square matrix of jets; entry (i, j) holds Gamma^i_{ij} for i != j.
class OffDiagonal {
 public:
  OffDiagonal(std::size_t dim, int order);

  std::size_t dim() const noexcept { return dim_; }
  int order() const noexcept { return order_; }
  const Jet& operator()(std::size_t i, std::size_t j) const { return data_[i * dim_ + j]; }
  Jet& operator()(std::size_t i, std::size_t j) { return data_[i * dim_ + j]; }

 private:
  std::size_t dim_;
  int order_;
  std::vector<Jet> data_;
};

using OffDiagonalFn = std::function<OffDiagonal(const Point&, int order)>;

/// All Gamma^i_{jk} at one point, as jets of a common order.
class ChristoffelTable {
 public:
  ChristoffelTable(std::size_t dim, std::size_t point_dim, int order);

  std::size_t dim() const noexcept { return dim_; }
  int order() const noexcept { return order_; }
  const Jet& operator()(std::size_t i, std::size_t j, std::size_t k) const { return data_[(i * dim_ + j) * dim_ + k]; }
  Jet& operator()(std::size_t i, std::size_t j, std::size_t k) { return data_[(i * dim_ + j) * dim_ + k]; }

 private:
  std::size_t dim_;
  int order_;
  std::vector<Jet> data_;
};

enum class ConnectionKind { natural, dual, transformed_natural, transformed_dual, custom };
const char* to_string(ConnectionKind kind);

/// A connection given by an evaluator of its full Christoffel table.
class ConnectionTable {
 public:
  using Builder = std::function<ChristoffelTable(const Point&, int order)>;

  ConnectionTable(std::size_t dim, ConnectionKind kind, Builder builder, std::string label = {});

  std::size_t dim() const noexcept { return dim_; }
  ConnectionKind kind() const noexcept { return kind_; }
  const std::string& label() const noexcept { return label_; }

  ChristoffelTable at(const Point& p, int order) const;
  Jet gamma(std::size_t i, std::size_t j, std::size_t k, const Point& p, int order) const;

 private:
  std::size_t dim_;
  ConnectionKind kind_;
  Builder builder_;
  std::string label_;
};

/// Residuals collected at sample points. `entries` keep the signed value,
/// `max_abs` the worst magnitude (infinite if any residual is not finite).
struct ResidualEntry {
  std::size_t point = 0;  // index into ResidualReport::points
  std::vector<std::size_t> indices;
  double residual = 0.0;
};

struct ResidualReport {
  std::string label;
  std::vector<Point> points;
  std::vector<ResidualEntry> entries;
  double max_abs = 0.0;
  double tolerance = kSecondOrderTol;
  bool pass = true;

  ResidualReport() = default;
  ResidualReport(std::string label, std::span<const Point> points, double tolerance);

  void add(std::size_t point, std::vector<std::size_t> indices, double residual);
  /// Recomputes max_abs and pass from the entries.
  void finalize();
  /// Appends another report's entries (same point list assumed).
  void absorb(const ResidualReport& other);
};

// --- Christoffel symbols ----------------------------------------------------

/// Gamma^i_{ij} = d_j v^i / (v^j - v^i), i != j, as a jet of the given order.
Jet christoffel_primary(const DiagonalSystem& sys, std::size_t i, std::size_t j, const Point& p, int order);
/// Every Gamma^i_{ij} at once (velocities evaluated a single time).
OffDiagonal christoffel_primary_all(const DiagonalSystem& sys, const Point& p, int order);

/// Natural connection: Gamma^i_{jk} = 0 on distinct triples,
/// Gamma^i_{jj} = -Gamma^i_{ji}, Gamma^i_{ii} = -sum_{k != i} Gamma^i_{ik}.
ConnectionTable natural_from_offdiagonal(std::size_t dim, OffDiagonalFn offdiag,
                                         ConnectionKind kind = ConnectionKind::natural, std::string label = {});
/// Dual connection: shares Gamma^i_{ij}; Gamma^i_{jj} = -(u^i/u^j) Gamma^i_{ij},
/// Gamma^i_{ii} = -sum_{l != i} (u^l/u^i) Gamma^i_{li} - 1/u^i.
ConnectionTable dual_from_offdiagonal(std::size_t dim, OffDiagonalFn offdiag,
                                      ConnectionKind kind = ConnectionKind::dual, std::string label = {});

ConnectionTable natural_connection(const DiagonalSystem& sys);
ConnectionTable dual_connection(const DiagonalSystem& sys);

/// Off-diagonal generator of a system's natural connection.
OffDiagonalFn offdiagonal_of(const DiagonalSystem& sys);

// --- Residual checks ----------------------------------------------------------

/// Semi-Hamiltonian condition in Christoffel form, both the quadratic
/// identity and d_j Gamma^i_{ik} = d_k Gamma^i_{ij}, over distinct triples.
/// Vacuous (zero entries) for n = 2.
ResidualReport sh_residual(const DiagonalSystem& sys, std::span<const Point> points, double tol = kSecondOrderTol);

/// The two component families R^i_{iki} and R^i_{qqi} that can be nonzero
/// for a natural connection.
ResidualReport curvature_natural_residual(const ConnectionTable& conn, std::span<const Point> points,
                                          double tol = kSecondOrderTol);

/// Full Riemann tensor at a point, generic in the connection.
class CurvatureTensor {
 public:
  explicit CurvatureTensor(std::size_t dim);

  std::size_t dim() const noexcept { return dim_; }
  double operator()(std::size_t i, std::size_t j, std::size_t k, std::size_t l) const {
    return data_[((i * dim_ + j) * dim_ + k) * dim_ + l];
  }
  double& operator()(std::size_t i, std::size_t j, std::size_t k, std::size_t l) {
    return data_[((i * dim_ + j) * dim_ + k) * dim_ + l];
  }
  double max_abs() const;

 private:
  std::size_t dim_;
  std::vector<double> data_;
};

CurvatureTensor curvature_oracle(const ConnectionTable& conn, const Point& p);

/// Every component of curvature_oracle, at every point.
ResidualReport curvature_full_residual(const ConnectionTable& conn, std::span<const Point> points,
                                       double tol = kSecondOrderTol);

enum class UnitField { e, E };

/// d_j X^i + Gamma^i_{jl} X^l for X = e = (1, ..., 1) or X = E = (u^1, ..., u^n).
/// Natural tables pair with e, dual tables with E; other pairings are rejected
/// (custom tables accept both).
ResidualReport identity_parallel_residual(const ConnectionTable& conn, UnitField field,
                                          std::span<const Point> points, double tol = kSecondOrderTol);

}  // namespace recipfm
