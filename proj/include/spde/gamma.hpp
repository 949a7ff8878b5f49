#pragma once

#include <memory>

#include "spde/spectral.hpp"

namespace spde {

enum class GammaOrder { Ds, DsDsp, D2sDsp };

// Gamma(s,s') = int exp(-(2t-s-s')|xi|^2/2) mu(dxi) and its derivatives, which
// carry the extra weights |xi|^2/2, |xi|^4/4, |xi|^6/8. Radial measures are
// evaluated on a fixed composite Gauss-Kronrod grid after the substitution
// u = r*sqrt(2t-s-s'); fixed nodes keep the quadrature error a smooth function
// of the time arguments, which matters for finite-difference cross-checks.
class GammaKernel {
 public:
  GammaKernel(SpectralMeasure measure, double t, double quad_tol = 1e-10);

  double operator()(double s, double sp) const;  // Gamma(s,s')
  double partial(double s, double sp, GammaOrder order) const;

  // int (|xi|^2/2)^m exp(-tau |xi|^2/2) mu(dxi), tau > 0, m = 0..3
  double value_tau(double tau, int moment) const;

  double terminal_time() const { return t_; }
  const SpectralMeasure& measure() const { return mu_; }

  static constexpr double kCornerGuard = 1e-12;

 private:
  struct Rules;
  SpectralMeasure mu_;
  double t_;
  double quad_tol_;
  std::shared_ptr<const Rules> rules_;  // per-moment fixed quadrature tables
};

}  // namespace spde
