#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "recipfm/expr.hpp"
#include "recipfm/jet.hpp"
#include "recipfm/sampling.hpp"

namespace recipfm::testing {

using LdFunction = std::function<long double(std::span<const long double>)>;
using Quad = __float128;
using QuadFunction = std::function<Quad(std::span<const Quad>)>;

/// Seeded admissible points; every field in `nonzero` must stay away from 0.
std::vector<Point> sample_points(std::size_t n, std::uint64_t seed, std::size_t count,
                                 const std::vector<ScalarField>& nonzero = {}, PointSampler::Filter extra = {});

/// Quad precision tree walk over a parsed expression, written independently
/// of the library evaluators.
Quad eval_hp(const ExprNode& n, std::span<const Quad> u);
QuadFunction hp_function(const FieldExpr& e);

/// Central finite-difference estimate of d^a f at p with step h.
long double fd_partial(const LdFunction& f, const Point& p, const MultiIndex& a, long double h = 1e-4L);
double fd_partial(const QuadFunction& f, const Point& p, const MultiIndex& a, double h = 1e-6);

/// All multi-indices of dimension `dim` with 1 <= |a| <= max_order.
std::vector<MultiIndex> multi_indices(std::size_t dim, int max_order);

double rel_diff(double a, double b);

}  // namespace recipfm::testing
