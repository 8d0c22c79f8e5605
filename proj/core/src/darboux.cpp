#include "recipfm/darboux.hpp"

#include <cmath>
#include <utility>

#include <fmt/core.h>

#include "recipfm/error.hpp"

namespace recipfm {

RotationFrame::RotationFrame(std::size_t dim, std::vector<ScalarField> beta, std::vector<ScalarField> H, double d)
    : dim_(dim), beta_(std::move(beta)), H_(std::move(H)), d_(d) {
  if (dim_ < 2 || dim_ > kMaxDim) throw InvalidArgument(fmt::format("frame dimension {} outside [2, {}]", dim_, kMaxDim));
  if (beta_.size() != dim_ * dim_) throw InvalidArgument(fmt::format("frame needs {} beta entries", dim_ * dim_));
  if (H_.size() != dim_) throw InvalidArgument(fmt::format("frame needs {} Lame coefficients", dim_));
  for (std::size_t i = 0; i < dim_; ++i) {
    if (!H_[i].valid() || H_[i].dim() != dim_) throw InvalidArgument(fmt::format("H{} missing or of wrong dimension", i + 1));
    for (std::size_t j = 0; j < dim_; ++j) {
      if (i == j) continue;
      const ScalarField& b = beta_[i * dim_ + j];
      if (!b.valid() || b.dim() != dim_) {
        throw InvalidArgument(fmt::format("beta{}{} missing or of wrong dimension", i + 1, j + 1));
      }
    }
  }
  if (!std::isfinite(d_)) throw InvalidArgument("frame degree d must be finite");
}

OffDiagonalFn RotationFrame::offdiagonal() const {
  return [frame = *this](const Point& p, int order) {
    const std::size_t n = frame.dim();
    std::vector<Jet> H;
    for (std::size_t i = 0; i < n; ++i) H.push_back(frame.H(i)(p, order));
    OffDiagonal g(n, order);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (i != j) g(i, j) = H[j] / H[i] * frame.beta(i, j)(p, order);
    return g;
  };
}

ResidualReport darboux_residual(const RotationFrame& frame, std::span<const Point> points, double tol) {
  ResidualReport rep("darboux-egorov", points, tol);
  const std::size_t n = frame.dim();
  // index tuples carry a leading family tag 0..5
  for (std::size_t pi = 0; pi < points.size(); ++pi) {
    const Point& p = points[pi];
    std::vector<Jet> b(n * n), H(n);
    for (std::size_t i = 0; i < n; ++i) {
      H[i] = frame.H(i)(p, 1);
      for (std::size_t j = 0; j < n; ++j)
        if (i != j) b[i * n + j] = frame.beta(i, j)(p, 1);
    }
    auto e_of = [&](const Jet& f) {
      double s = 0.0;
      for (std::size_t l = 0; l < n; ++l) s += f.d(l);
      return s;
    };
    auto E_of = [&](const Jet& f) {
      double s = 0.0;
      for (std::size_t l = 0; l < n; ++l) s += p[l] * f.d(l);
      return s;
    };
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (i == j) continue;
        const Jet& bij = b[i * n + j];
        for (std::size_t k = 0; k < n; ++k) {
          if (k == i || k == j) continue;
          rep.add(pi, {0, i, j, k}, bij.d(k) - b[i * n + k].value() * b[k * n + j].value());
        }
        rep.add(pi, {1, i, j}, e_of(bij));
        rep.add(pi, {2, i, j}, E_of(bij) + bij.value());
        rep.add(pi, {3, i, j}, H[i].d(j) - bij.value() * H[j].value());
      }
      rep.add(pi, {4, i}, e_of(H[i]));
      rep.add(pi, {5, i}, E_of(H[i]) + frame.d() * H[i].value());
    }
  }
  rep.finalize();
  return rep;
}

RotationFrame darboux_transform(const RotationFrame& frame, const ConservationDensity& gen,
                                std::span<const Point> points, double tol) {
  const std::size_t n = frame.dim();
  if (!gen.A.valid() || gen.A.dim() != n) throw InvalidArgument("darboux_transform: density dimension mismatch");
  if (points.empty()) throw InvalidArgument("darboux_transform needs check points");
  const ResidualReport dens = density_residual(n, frame.offdiagonal(), gen.A, points, tol);
  if (!dens.pass) {
    throw PreconditionError(fmt::format("generator '{}' is not a density for the frame (residual {:.3e})",
                                        gen.A.label(), dens.max_abs));
  }
  const GradingResult ge = grading_residual(gen.A, UnitField::e, points, tol);
  if (!ge.report.pass || std::abs(ge.estimate) > tol) {
    throw PreconditionError(fmt::format("generator '{}' needs e(A) = 0 (e(A)/A ~ {:.6g}, spread {:.3e})",
                                        gen.A.label(), ge.estimate, ge.report.max_abs));
  }
  const GradingResult gE = grading_residual(gen.A, UnitField::E, points, tol);
  if (!gE.report.pass) {
    throw PreconditionError(fmt::format("generator '{}' needs constant E(A)/A (spread {:.3e})", gen.A.label(),
                                        gE.report.max_abs));
  }
  const double k = gE.estimate;

  std::vector<ScalarField> beta(n * n), H(n);
  const ScalarField A = gen.A;
  for (std::size_t i = 0; i < n; ++i) {
    H[i] = (frame.H(i) / A).with_label(fmt::format("H~{}", i + 1));
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const ScalarField bij = frame.beta(i, j);
      const ScalarField Hi = frame.H(i);
      const ScalarField Hj = frame.H(j);
      beta[i * n + j] = ScalarField(
          n,
          [bij, Hi, Hj, A, j](const Point& p, int order) {
            const Jet a = A(p, order + 1);
            return bij(p, order) - Hi(p, order) / Hj(p, order) * (a.derivative(j) / a.truncated(order));
          },
          fmt::format("beta~{}{}", i + 1, j + 1));
    }
  }
  return RotationFrame(n, std::move(beta), std::move(H), frame.d() + k);
}

}  // namespace recipfm
