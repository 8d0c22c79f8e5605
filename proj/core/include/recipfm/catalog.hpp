#pragma once

// The epsilon-system v^i = u^i - eps * sum_k u^k and closed-form densities,
// currents and flat coordinates for it.

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "recipfm/darboux.hpp"
#include "recipfm/expr.hpp"
#include "recipfm/geometry.hpp"
#include "recipfm/reciprocal.hpp"

namespace recipfm {

DiagonalSystem epsilon_system(std::size_t n, double eps);

struct CatalogEntry {
  std::string id;
  std::string family;  // short description of the solution family
  std::size_t dim = 0;
  double eps = 0.0;
  ParamMap params;
  std::string density_src;
  std::optional<std::string> current_src;
  /// Elementary form of a hypergeometric density, when one exists.
  std::optional<std::string> reduced_src;
  double h = 0.0;
  std::optional<double> k;
  /// Density contains 2F1 of z = (u3 - u1)/(u2 - u1); keep |z| <= 0.9.
  bool hypergeometric = false;

  FieldExpr density() const;
  std::optional<FieldExpr> current() const;
  std::optional<FieldExpr> reduced() const;

  DiagonalSystem system() const;
  ScalarField A() const;
  std::optional<ScalarField> B() const;
  ConservationDensity generator() const;
  /// Extra sampling restriction (|z| <= 0.9 for hypergeometric entries).
  bool in_domain(const Point& p) const;
};

/// Every entry: each family at the generic constants (c0, c1, c2, c3) =
/// (1, 2, -1, 0.5) and at every unit vector of the constants appearing in A.
const std::vector<CatalogEntry>& catalog_entries();
/// Throws InvalidArgument for an unknown id.
const CatalogEntry& catalog_entry(std::string_view id);

struct FlatCoordinates {
  ScalarField A1;
  /// Absent when 2 - 2 eps is a non-positive integer.
  std::optional<ScalarField> A2;
};

/// Homogeneous flat coordinates of the n = 3 epsilon-system with e(A) = 0:
///   A1 = (u2-u1)^(1-3eps) 2F1(eps, 3eps-1; 2eps; z),
///   A2 = (u2-u1)^(1-3eps) z^(1-2eps) 2F1(eps, 1-eps; 2-2eps; z),
/// z = (u3-u1)/(u2-u1). Rejects eps = 1/3 and 2 eps in {0, -1, ...}.
FlatCoordinates hypergeom_flat_coordinates(double eps);

/// n = 2 frame beta_12 = eps/(u1-u2), beta_21 = eps/(u2-u1),
/// H_1 = H_2 = (u1-u2)^(-eps), d = eps.
RotationFrame epsilon_frame(double eps);

}  // namespace recipfm
