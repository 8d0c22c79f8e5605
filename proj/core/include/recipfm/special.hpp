#pragma once

#include "recipfm/jet.hpp"

namespace recipfm {

/// Power-series settings for 2F1. The series stops once a term falls below
/// `rel_tol` times the running sum.
struct Hyp2f1Options {
  double rel_tol = 1e-16;
  int max_terms = 10000;
};

/// Gauss hypergeometric function 2F1(a, b; c; z) for |z| < 1 by direct
/// summation. Rejects |z| >= 1 and c in {0, -1, -2, ...}.
double hyp2f1(double a, double b, double c, double z, const Hyp2f1Options& opts = {});

/// Jet of 2F1(a, b; c; z(u)), using d/dz 2F1(a,b;c;z) = (ab/c) 2F1(a+1,b+1;c+1;z).
Jet hyp2f1(double a, double b, double c, const Jet& z, const Hyp2f1Options& opts = {});

}  // namespace recipfm
