#include <cmath>

#include <gtest/gtest.h>

#include "recipfm/catalog.hpp"
#include "recipfm/error.hpp"
#include "recipfm/expr.hpp"
#include "recipfm/geometry.hpp"
#include "support.hpp"

using namespace recipfm;
using recipfm::testing::sample_points;

namespace {

DiagonalSystem dsl_system(std::size_t n, std::vector<std::string> v) {
  std::vector<ScalarField> f;
  for (const auto& s : v) f.push_back(make_field(s, n));
  return DiagonalSystem(std::move(f));
}

}  // namespace

TEST(Christoffel, EpsSystemValue) {
  const DiagonalSystem sys = epsilon_system(2, 1.0);
  EXPECT_NEAR(christoffel_primary(sys, 0, 1, Point{2.0, 1.0}, 0).value(), 1.0, 1e-15);
  const Point p{0.7, -1.3, 1.9};
  const DiagonalSystem s3 = epsilon_system(3, 0.5);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      if (i != j) EXPECT_NEAR(christoffel_primary(s3, i, j, p, 0).value(), 0.5 / (p[i] - p[j]), 1e-14);
}

TEST(Christoffel, DecoupledIsZero) {
  const DiagonalSystem sys = dsl_system(2, {"u1", "u2"});
  for (const auto& p : sample_points(2, 3, 5)) EXPECT_EQ(christoffel_primary(sys, 0, 1, p, 1).value(), 0.0);
}

TEST(Christoffel, PolynomialVelocitiesMatchFiniteDifferences) {
  const std::vector<std::string> src{"u1^2 + u2*u3", "u2 - u1*u3^2", "3*u3 + u1*u2"};
  const DiagonalSystem sys = dsl_system(3, src);
  std::vector<recipfm::testing::QuadFunction> F;
  for (const auto& s : src) F.push_back(recipfm::testing::hp_function(parse_field(s, 3)));
  PointSampler sampler(3, 17);
  sampler.require([&](const Point& p) {
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = i + 1; j < 3; ++j)
        if (std::abs(sys.velocity(i).value(p) - sys.velocity(j).value(p)) < 0.25) return false;
    return true;
  });
  for (const auto& p : sampler.draw(20)) {
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j) {
        if (i == j) continue;
        const double dv = static_cast<double>(recipfm::testing::fd_partial(F[i], p, MultiIndex::unit(3, j)));
        const double want = dv / (sys.velocity(j).value(p) - sys.velocity(i).value(p));
        EXPECT_NEAR(christoffel_primary(sys, i, j, p, 1).value(), want, 1e-6);
      }
  }
}

TEST(Christoffel, CoincidentVelocitiesRejected) {
  const DiagonalSystem sys = dsl_system(2, {"u1", "u1"});
  EXPECT_THROW(christoffel_primary(sys, 0, 1, Point{1.0, 2.0}, 0), DomainError);
  EXPECT_THROW(christoffel_primary(sys, 0, 0, Point{1.0, 2.0}, 0), InvalidArgument);
  EXPECT_THROW(christoffel_primary(epsilon_system(2, 1.0), 0, 1, Point{1.0, 2.0}, 3), InvalidArgument);
}

TEST(Natural, EpsSystemAssembly) {
  const ConnectionTable c = natural_connection(epsilon_system(2, 1.0));
  const ChristoffelTable t = c.at(Point{2.0, 1.0}, 0);
  EXPECT_NEAR(t(0, 1, 0).value(), 1.0, 1e-15);
  EXPECT_NEAR(t(0, 0, 1).value(), 1.0, 1e-15);
  EXPECT_NEAR(t(0, 1, 1).value(), -1.0, 1e-15);
  EXPECT_NEAR(t(0, 0, 0).value(), -1.0, 1e-15);
  EXPECT_EQ(c.kind(), ConnectionKind::natural);
}

TEST(Natural, StructuralIdentitiesExact) {
  for (std::size_t n : {2u, 3u, 4u}) {
    const ConnectionTable c = natural_connection(epsilon_system(n, 0.7));
    for (const auto& p : sample_points(n, 5, 10)) {
      const ChristoffelTable t = c.at(p, 1);
      for (std::size_t i = 0; i < n; ++i) {
        Jet row = Jet::constant(n, 1, 0.0);
        for (std::size_t k = 0; k < n; ++k) row += t(i, i, k);
        for (double x : row.coeffs()) EXPECT_LE(std::abs(x), 1e-13);
        for (std::size_t j = 0; j < n; ++j)
          for (std::size_t k = 0; k < n; ++k) {
            if (i != j && j != k && i != k) EXPECT_EQ(t(i, j, k).value(), 0.0);
            EXPECT_EQ(t(i, j, k).value(), t(i, k, j).value());
          }
      }
    }
  }
}

TEST(SemiHamiltonian, EpsSystemPasses) {
  const auto pts = sample_points(3, 42, 20);
  const ResidualReport r = sh_residual(epsilon_system(3, 1.0), pts);
  EXPECT_LE(r.max_abs, 1e-10);
  EXPECT_TRUE(r.pass);
  EXPECT_FALSE(r.entries.empty());
}

TEST(SemiHamiltonian, VacuousInDimensionTwo) {
  const ResidualReport r = sh_residual(dsl_system(2, {"u1*u2", "u2"}), sample_points(2, 1, 5));
  EXPECT_TRUE(r.pass);
  EXPECT_TRUE(r.entries.empty());
}

TEST(SemiHamiltonian, DetectsNonSemiHamiltonian) {
  const DiagonalSystem sys = dsl_system(3, {"u2*u3", "u1", "u1+u2"});
  const std::vector<Point> p{Point{1.0, 2.0, 3.0}};
  const ResidualReport r = sh_residual(sys, p);
  EXPECT_GT(r.max_abs, 1e-3);
  EXPECT_FALSE(r.pass);
}

TEST(Curvature, EpsSystemNaturalFlat) {
  for (std::size_t n : {2u, 3u}) {
    const auto pts = sample_points(n, 42, 20);
    const ResidualReport r = curvature_natural_residual(natural_connection(epsilon_system(n, 1.0)), pts);
    EXPECT_LE(r.max_abs, 1e-9);
  }
}

TEST(Curvature, ConstantVelocitiesGiveExactZero) {
  const DiagonalSystem sys = dsl_system(3, {"1", "2", "3"});
  const auto pts = sample_points(3, 8, 5);
  const ConnectionTable c = natural_connection(sys);
  EXPECT_EQ(curvature_natural_residual(c, pts).max_abs, 0.0);
  EXPECT_EQ(curvature_full_residual(c, pts).max_abs, 0.0);
}

TEST(Curvature, NaturalResidualNeedsNaturalKind) {
  EXPECT_THROW(curvature_natural_residual(dual_connection(epsilon_system(2, 1.0)), sample_points(2, 1, 1)),
               InvalidArgument);
}

TEST(Curvature, OracleFlatOnEpsSystem) {
  const CurvatureTensor R = curvature_oracle(natural_connection(epsilon_system(2, 1.0)), Point{2.0, 1.0});
  EXPECT_LE(R.max_abs(), 1e-10);
}

TEST(Curvature, OracleAntisymmetric) {
  // a non-flat connection: the natural connection of a non-semi-Hamiltonian system
  const ConnectionTable c = natural_connection(dsl_system(3, {"u2*u3", "u1", "u1+u2"}));
  const CurvatureTensor R = curvature_oracle(c, Point{1.0, 2.0, 3.0});
  EXPECT_GT(R.max_abs(), 1e-3);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      for (std::size_t k = 0; k < 3; ++k) {
        EXPECT_EQ(R(i, j, k, k), 0.0);
        for (std::size_t l = 0; l < 3; ++l) EXPECT_NEAR(R(i, j, k, l), -R(i, j, l, k), 1e-13);
      }
}

TEST(Curvature, SpecialisedComponentsEqualOracle) {
  // transformed tables carry nonzero curvature for a non-density generator
  const DiagonalSystem sys = epsilon_system(3, 1.0);
  std::vector<ConnectionTable> tables{
      natural_connection(sys),
      natural_connection(dsl_system(3, {"u2*u3", "u1", "u1+u2"})),
      natural_from_offdiagonal(3, [](const Point& p, int order) {
        OffDiagonal g(3, order);
        for (std::size_t i = 0; i < 3; ++i)
          for (std::size_t j = 0; j < 3; ++j)
            if (i != j) g(i, j) = exp(Jet::coordinate(p, i, order) * Jet::coordinate(p, j, order) * 0.3) * 0.2;
        return g;
      })};
  for (const auto& c : tables) {
    const auto pts = sample_points(3, 77, 10);
    const ResidualReport special = curvature_natural_residual(c, pts, 0.0);
    for (const auto& e : special.entries) {
      const CurvatureTensor R = curvature_oracle(c, pts[e.point]);
      const auto& x = e.indices;
      EXPECT_NEAR(e.residual, R(x[0], x[1], x[2], x[3]), 1e-10);
    }
  }
}

TEST(Dual, EpsSystemValue) {
  const ConnectionTable c = dual_connection(epsilon_system(2, 1.0));
  const ChristoffelTable t = c.at(Point{2.0, 1.0}, 0);
  EXPECT_NEAR(t(0, 1, 1).value(), -2.0, 1e-15);
  EXPECT_EQ(c.kind(), ConnectionKind::dual);
}

TEST(Dual, OffDiagonalAgreesWithNatural) {
  const DiagonalSystem sys = epsilon_system(3, -1.0);
  const ConnectionTable a = natural_connection(sys), b = dual_connection(sys);
  for (const auto& p : sample_points(3, 9, 10)) {
    const ChristoffelTable ta = a.at(p, 1), tb = b.at(p, 1);
    for (std::size_t i = 0; i < 3; ++i)
      for (std::size_t j = 0; j < 3; ++j)
        if (i != j) {
          for (std::size_t c = 0; c < ta(i, i, j).coeffs().size(); ++c)
            EXPECT_EQ(ta(i, i, j).coeffs()[c], tb(i, i, j).coeffs()[c]);
        }
  }
}

TEST(Dual, ZeroCoordinateRejected) {
  EXPECT_THROW(dual_connection(epsilon_system(2, 1.0)).at(Point{0.0, 1.0}, 0), DomainError);
}

TEST(Parallel, UnitAndEuler) {
  for (std::size_t n : {2u, 3u, 4u}) {
    const DiagonalSystem sys = epsilon_system(n, 1.0);
    const auto pts = sample_points(n, 42, 20);
    EXPECT_LE(identity_parallel_residual(natural_connection(sys), UnitField::e, pts).max_abs, 1e-12);
    EXPECT_LE(identity_parallel_residual(dual_connection(sys), UnitField::E, pts).max_abs, 1e-12);
  }
}

TEST(Parallel, MismatchedPairingRejected) {
  const DiagonalSystem sys = epsilon_system(2, 1.0);
  const auto pts = sample_points(2, 1, 2);
  EXPECT_THROW(identity_parallel_residual(natural_connection(sys), UnitField::E, pts), InvalidArgument);
  EXPECT_THROW(identity_parallel_residual(dual_connection(sys), UnitField::e, pts), InvalidArgument);
}

TEST(Report, Invariants) {
  const std::vector<Point> pts{Point{1.0, 2.0}};
  ResidualReport r("x", pts, 0.5);
  EXPECT_TRUE(r.pass);
  r.add(0, {0}, 0.25);
  r.add(0, {1}, -0.75);
  EXPECT_EQ(r.max_abs, 0.75);
  EXPECT_FALSE(r.pass);
  r.entries.pop_back();
  r.finalize();
  EXPECT_EQ(r.max_abs, 0.25);
  EXPECT_TRUE(r.pass);
  r.add(0, {2}, std::nan(""));
  EXPECT_TRUE(std::isinf(r.max_abs));
  EXPECT_FALSE(r.pass);
}

TEST(Geometry, FlatnessImpliesSemiHamiltonian) {
  for (const auto& e : catalog_entries()) {
    if (e.dim != 3) continue;
    const DiagonalSystem sys = e.system();
    const auto pts = sample_points(3, 42, 5);
    if (curvature_natural_residual(natural_connection(sys), pts).pass) EXPECT_TRUE(sh_residual(sys, pts).pass);
  }
}
