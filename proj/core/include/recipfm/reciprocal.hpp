#pragma once

// Densities of conservation laws and the reciprocal transformation
//   dx~ = A dx + B dt,  dt~ = dt,   v^i -> A v^i - B
// acting on velocities and on the natural and dual connections.
//
// Logarithmic derivatives d_l ln A are always computed as d_l A / A, so
// densities may take negative values.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "recipfm/field.hpp"
#include "recipfm/geometry.hpp"
#include "recipfm/jet.hpp"
#include "recipfm/quadrature.hpp"

namespace recipfm {

enum class Provenance { catalog, user };

struct ConservationDensity {
  ScalarField A;
  std::optional<double> h;  // e(A) = h A
  std::optional<double> k;  // E(A) = k A
  Provenance provenance = Provenance::user;
  std::string label;
};

// --- Density equations ----------------------------------------------------

/// d_i d_j A - Gamma^i_{ij} d_i A - Gamma^j_{ji} d_j A over pairs i < j.
ResidualReport density_residual(const DiagonalSystem& sys, const ScalarField& A, std::span<const Point> points,
                                double tol = kSecondOrderTol);
ResidualReport density_residual(std::size_t dim, const OffDiagonalFn& offdiag, const ScalarField& A,
                                std::span<const Point> points, double tol = kSecondOrderTol);

struct GradingResult {
  double estimate = 0.0;
  ResidualReport report;
};

/// Constancy of e(A)/A (field e) or E(A)/A (field E). The estimate is the
/// mean over points; entries hold the deviation from it.
GradingResult grading_residual(const ScalarField& A, UnitField field, std::span<const Point> points,
                               double tol = kSecondOrderTol);

/// Both families of the second-order system for A:
///   d_q d_p A - d_p A Gamma^p_{pq} - d_q A Gamma^q_{qp},           p != q
///   d_p^2 A + sum_{l != p} d_l d_p A - d_p A sum_l d_l A / A.
ResidualReport a_system_residual(const DiagonalSystem& sys, const ScalarField& A, std::span<const Point> points,
                                 double tol = kSecondOrderTol);
ResidualReport a_system_residual(std::size_t dim, const OffDiagonalFn& offdiag, const ScalarField& A,
                                 std::span<const Point> points, double tol = kSecondOrderTol);

/// The same system written for theta_p = d_p A / A:
///   d_q theta_p - theta_p Gamma^p_{pq} - theta_q Gamma^q_{qp} + theta_p theta_q,       p != q
///   d_p theta_p + theta_p^2 - theta_p sum_l theta_l + sum_{l != p} (d_l theta_p + theta_p theta_l).
ResidualReport theta_residual(const DiagonalSystem& sys, const ScalarField& A, std::span<const Point> points,
                              double tol = kSecondOrderTol);

enum class Product { circ, star };

/// nabla_q nabla_p A - (X(A)/A) c^l_{pq} d_l A with (X, c) = (e, circ) or
/// (E, star), c*^i_{jk} = delta^i_j delta^i_k / u^i.
ResidualReport covariant_hessian_residual(const ConnectionTable& conn, Product product, const ScalarField& A,
                                          std::span<const Point> points, double tol = kSecondOrderTol);

// --- Current -----------------------------------------------------------------

struct CurrentOptions {
  QuadratureOptions quadrature;
  /// Samples per axis segment used to detect singular loci.
  int scan = 64;
};

/// B(p) - B(base), integrating sum_i v^i d_i A du^i along the axis path that
/// moves one coordinate at a time in `axes` order (default 0, 1, ..., n-1).
/// Throws DomainError naming the segment if it crosses u^i = u^j,
/// v^i = v^j or A = 0.
double current_value(const DiagonalSystem& sys, const ScalarField& A, const Point& base, const Point& p,
                     std::span<const std::size_t> axes = {}, const CurrentOptions& opts = {});

/// True if the default axis path from base to p avoids the singular loci.
bool current_path_admissible(const DiagonalSystem& sys, const ScalarField& A, const Point& base, const Point& p,
                             const CurrentOptions& opts = {});

/// The current as a field with B(base) = 0. Values come from quadrature;
/// derivatives from d_i B = v^i d_i A.
ScalarField current_from_density(const DiagonalSystem& sys, const ScalarField& A, const Point& base,
                                 const CurrentOptions& opts = {});

// --- Transformation ------------------------------------------------------------

/// Gamma^i_{ij} - d_j A / A.
OffDiagonalFn transformed_offdiagonal(OffDiagonalFn offdiag, ScalarField A);

ConnectionTable transformed_natural(const DiagonalSystem& sys, const ScalarField& A);
/// Dual table of the transformed system, i.e. the dual formulas applied to
/// the transformed off-diagonal symbols.
ConnectionTable transformed_dual(const DiagonalSystem& sys, const ScalarField& A);

/// Generic tensor form
///   G~^i_{jk} = G^i_{jk} + c^i_{jk} X^l w_l - c^i_{lj} w_k X^l + c^l_{jk} w_l X^i - c^i_{lk} w_j X^l,
/// w_l = d_l A / A, with (X, c) = (e, circ) or (E, star).
ConnectionTable intrinsic_transform(const ConnectionTable& base, Product product, const ScalarField& A,
                                    ConnectionKind kind, std::string label = {});

struct TransformResult {
  DiagonalSystem system;
  ConnectionTable natural;
  std::optional<ConnectionTable> dual;
  ConservationDensity generator;
  ScalarField current;
  Point base;
};

/// Applies the transformation generated by `gen`. The generator is checked
/// against the density equations at `check_points` (at `base` when empty);
/// a failure throws PreconditionError.
TransformResult transform(const DiagonalSystem& sys, const ConservationDensity& gen, const Point& base,
                          bool with_dual, std::span<const Point> check_points = {}, double tol = kSecondOrderTol,
                          const CurrentOptions& opts = {});

/// Gamma^i_{ij} computed from the transformed velocities minus
/// (Gamma^i_{ij} - d_j A / A).
ResidualReport christoffel_law_residual(const TransformResult& result, const DiagonalSystem& original,
                              std::span<const Point> points, double tol = 1e-12);

struct BiflatVerdict {
  bool pass = false;
  double h = 0.0;
  double k = 0.0;
  ResidualReport density;
  GradingResult e_grading;
  GradingResult E_grading;
};

/// Density equations, e(A) = 0 and constant E(A)/A.
BiflatVerdict biflat_admissibility(const DiagonalSystem& sys, const ScalarField& A, std::span<const Point> points,
                                   double tol = kSecondOrderTol);

// --- Orbit ---------------------------------------------------------------------

struct OrbitResult {
  /// |Gamma two-step - Gamma one-step| over off-diagonal symbols.
  ResidualReport christoffel;
  /// |h(gen1) - (h(composite) - h(gen0))| plus constancy of each grading.
  ResidualReport grading;
  double h0 = 0.0;
  double h1 = 0.0;
  double h_composite = 0.0;
  bool pass = false;
};

/// Transforms by gen0, then by gen1 (a density of the transformed system),
/// and compares with the single transformation generated by gen0.A * gen1.A.
OrbitResult orbit_compose(const DiagonalSystem& sys, const ConservationDensity& gen0,
                          const ConservationDensity& gen1, const Point& base, std::span<const Point> points,
                          double tol = 1e-10, double grading_tol = kSecondOrderTol, const CurrentOptions& opts = {});

}  // namespace recipfm
