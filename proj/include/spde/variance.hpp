#pragma once

#include "spde/covariance.hpp"
#include "spde/gamma.hpp"
#include "spde/spectral.hpp"

namespace spde {

struct VarianceBreakdown {
  double term_const = 0.0;   // rect R over [0,t]^2 times Gamma(0,0)
  double term_sp = 0.0;      // int rect([0,t]x[s',t]) dGamma/ds'(0,s') ds'
  double term_s = 0.0;       // int rect([s,t]x[0,t]) dGamma/ds(s,0) ds
  double term_double = 0.0;  // int int rect([s,t]x[s',t]) d2Gamma/dsds'
  double total = 0.0;        // sum of the four terms
  double quad_err_est = 0.0;
  bool divergent = false;
};

struct VarianceOptions {
  int grading_levels = 40;  // geometric mesh toward the time corner, ratio 0.5
  double single_tol = 1e-9;
};

// Exact second moment E|u(t,x)|^2 of the solution; x-independent by
// stationarity. The double term pairs the d2Gamma blow-up at the corner with
// the vanishing rectangular increment of R on a graded mesh.
VarianceBreakdown variance_exact(const TimeCovariance& cov, const SpectralMeasure& m,
                                 double t, const VarianceOptions& opt = {});

struct JBounds {
  double J1_bound = 0.0;  // high-frequency bound 2^{1+beta} Gamma(beta+1) int_{|xi|>1}|xi|^{-2 beta} mu
  double J2_bound = 0.0;  // low-frequency bound mu(|xi|<=1) * 2 t^{beta+2}/(beta+2)
  bool high_converged = false;
};

JBounds j_bounds(const TimeCovariance& cov, const SpectralMeasure& m, double t);

struct JTermResult {
  double J = 0.0;
  double J1_bound = 0.0;
  double J2_bound = 0.0;
  bool divergent = false;
  bool bound_holds = false;
};

JTermResult j_term(const TimeCovariance& cov, const SpectralMeasure& m, double t,
                   const VarianceOptions& opt = {});

}  // namespace spde
