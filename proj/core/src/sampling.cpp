#include "recipfm/sampling.hpp"

#include <cmath>
#include <utility>

#include <fmt/core.h>

#include "recipfm/error.hpp"

namespace recipfm {

PointSampler::PointSampler(std::size_t dim, std::uint64_t seed, SamplingOptions opts)
    : dim_(dim), opts_(opts), rng_(seed) {
  if (dim == 0 || dim > kMaxDim) throw InvalidArgument(fmt::format("sampler dimension {} outside [1, {}]", dim, kMaxDim));
  if (!(opts_.lo < opts_.hi)) throw InvalidArgument("sampler needs lo < hi");
}

void PointSampler::require_nonzero(ScalarField f) {
  const double floor = opts_.min_abs_density;
  filters_.push_back([f = std::move(f), floor](const Point& p) {
    const double v = f.value(p);
    return std::isfinite(v) && std::abs(v) >= floor;
  });
}

void PointSampler::require(Filter filter) { filters_.push_back(std::move(filter)); }

// 53-bit mantissa from the top bits
double PointSampler::uniform01() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }

bool PointSampler::admissible(const Point& p) const {
  for (std::size_t i = 0; i < dim_; ++i) {
    if (std::abs(p[i]) < opts_.min_abs_coordinate) return false;
    for (std::size_t j = i + 1; j < dim_; ++j) {
      if (std::abs(p[i] - p[j]) < opts_.min_separation) return false;
    }
  }
  for (const auto& f : filters_) {
    try {
      if (!f(p)) return false;
    } catch (const DomainError&) {
      return false;
    }
  }
  return true;
}

Point PointSampler::next() {
  std::vector<double> u(dim_);
  for (int attempt = 0; attempt <= opts_.max_rejections; ++attempt) {
    for (double& x : u) {
      const double mag = opts_.lo + (opts_.hi - opts_.lo) * uniform01();
      x = uniform01() < 0.5 ? -mag : mag;
    }
    Point p(u);
    if (admissible(p)) return p;
  }
  throw ExhaustedError(fmt::format("no admissible sample point after {} rejections", opts_.max_rejections));
}

std::vector<Point> PointSampler::draw(std::size_t count) {
  std::vector<Point> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(next());
  return out;
}

}  // namespace recipfm
