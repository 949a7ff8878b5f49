#pragma once

#include <functional>

#include "spde/covariance.hpp"

namespace spde {

// Discretized integral over the global grid t_k = k*eps:
//   eps * sum of f(t_k) over k with t_k in [s, t).
// All terms of the integration-by-parts identity select grid points with the
// same predicate, which is what makes the identity exact algebra.
double disc_integral(const std::function<double(double)>& f, double s, double t,
                     double eps);

struct DiscretizationPair {
  double eps;
  double eps_tilde;
  double t;
  double t_tilde;

  DiscretizationPair(double eps_, double eps_tilde_, double t_, double t_tilde_);
};

struct IbpBreakdown {
  double A = 0.0;
  double A0 = 0.0;
  double I0 = 0.0;
  double I1 = 0.0;
  double I2 = 0.0;
  double I3 = 0.0;
  double I4 = 0.0;

  double residual() const { return A - (A0 + I0 + I1 + I2 + I3 + I4); }
};

// Computes A directly from the double discretized sum of Gamma times the
// rectangular increment of R, and each of A0, I0..I4 from their own formulas.
// The boundary terms evaluate gamma_fn at arguments down to -eps (resp.
// -eps_tilde), so the callable must be defined on that margin.
IbpBreakdown ibp_decompose(const std::function<double(double, double)>& gamma_fn,
                           const TimeCovariance& R, const DiscretizationPair& disc);

}  // namespace spde
