#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include "recipfm/field.hpp"
#include "recipfm/jet.hpp"

namespace recipfm {

/// Rejection-sampling rules for evaluation points. Coordinates are uniform
/// on [-hi, -lo] U [lo, hi]; a draw is kept only if it stays away from the
/// singular loci u^i = u^j, u^i = 0 and A = 0 of every registered density.
struct SamplingOptions {
  double lo = 0.5;
  double hi = 2.0;
  double min_separation = 0.25;
  double min_abs_coordinate = 0.25;
  double min_abs_density = 1e-6;
  int max_rejections = 1000;
};

class PointSampler {
 public:
  using Filter = std::function<bool(const Point&)>;

  PointSampler(std::size_t dim, std::uint64_t seed, SamplingOptions opts = {});

  /// Keep only points where `f` evaluates and |f| >= min_abs_density.
  void require_nonzero(ScalarField f);
  /// Keep only points accepted by `filter`. A DomainError counts as reject.
  void require(Filter filter);

  /// Next admissible point; throws ExhaustedError after `max_rejections`
  /// consecutive rejected draws.
  Point next();
  std::vector<Point> draw(std::size_t count);

  std::size_t dim() const noexcept { return dim_; }

 private:
  double uniform01();
  bool admissible(const Point& p) const;

  std::size_t dim_;
  SamplingOptions opts_;
  std::mt19937_64 rng_;
  std::vector<Filter> filters_;
};

}  // namespace recipfm
