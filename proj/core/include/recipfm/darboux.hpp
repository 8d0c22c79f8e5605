#pragma once

// Rotation coefficients beta_ij and Lame coefficients H_i:
//   d_k beta_ij = beta_ik beta_kj (distinct i, j, k),  e(beta_ij) = 0,  E(beta_ij) = -beta_ij,
//   d_j H_i = beta_ij H_j,  e(H_i) = 0,  E(H_i) = -d H_i,
// with Gamma^i_{ij} = (H_j / H_i) beta_ij.

#include <cstddef>
#include <span>
#include <vector>

#include "recipfm/field.hpp"
#include "recipfm/geometry.hpp"
#include "recipfm/reciprocal.hpp"

namespace recipfm {

class RotationFrame {
 public:
  /// `beta` is row-major n x n; diagonal entries are ignored and may be empty.
  RotationFrame(std::size_t dim, std::vector<ScalarField> beta, std::vector<ScalarField> H, double d);

  std::size_t dim() const noexcept { return dim_; }
  const ScalarField& beta(std::size_t i, std::size_t j) const { return beta_.at(i * dim_ + j); }
  const ScalarField& H(std::size_t i) const { return H_.at(i); }
  double d() const noexcept { return d_; }

  /// Gamma^i_{ij} = (H_j / H_i) beta_ij.
  OffDiagonalFn offdiagonal() const;

 private:
  std::size_t dim_;
  std::vector<ScalarField> beta_;
  std::vector<ScalarField> H_;
  double d_;
};

/// All six equation families; the triple equation is vacuous for n = 2.
ResidualReport darboux_residual(const RotationFrame& frame, std::span<const Point> points,
                                double tol = kSecondOrderTol);

/// beta~_ij = beta_ij - (H_i / H_j) d_j A / A,  H~_i = H_i / A,  d~ = d + k.
/// The generator must be a density for the frame's Gamma with e(A) = 0 and
/// constant E(A)/A = k at `points`; otherwise PreconditionError.
RotationFrame darboux_transform(const RotationFrame& frame, const ConservationDensity& gen,
                                std::span<const Point> points, double tol = kSecondOrderTol);

}  // namespace recipfm
