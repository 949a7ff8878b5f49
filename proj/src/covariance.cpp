#include "spde/covariance.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "spde/util.hpp"

namespace spde {

TimeCovariance TimeCovariance::brownian() {
  TimeCovariance c;
  c.kind_ = TimeCovKind::Brownian;
  c.beta_ = 1.0;
  c.k_upper_ = 1.0;
  c.k_lower_ = 0.0;
  return c;
}

TimeCovariance TimeCovariance::fractional_brownian(double h0) {
  if (!(h0 > 0.0 && h0 < 1.0))
    throw std::invalid_argument("fractional_brownian: H0 must lie in (0,1)");
  TimeCovariance c;
  c.kind_ = TimeCovKind::FractionalBrownian;
  c.h0_ = h0;
  c.beta_ = 2.0 * h0;
  c.k_upper_ = 1.0;
  c.k_lower_ = 0.0;
  return c;
}

TimeCovariance TimeCovariance::product() {
  TimeCovariance c;
  c.kind_ = TimeCovKind::Product;
  c.beta_ = 2.0;
  c.k_upper_ = 1.0;
  c.k_lower_ = 0.0;
  return c;
}

TimeCovariance TimeCovariance::custom(Fn fn, double beta, double holder_upper,
                                      double holder_lower) {
  if (!fn) throw std::invalid_argument("custom covariance: callable required");
  if (!(beta > 0.0)) throw std::invalid_argument("custom covariance: beta must be > 0");
  if (holder_upper < 0.0 || holder_lower < 0.0)
    throw std::invalid_argument("custom covariance: constants must be >= 0");
  TimeCovariance c;
  c.kind_ = TimeCovKind::Custom;
  c.beta_ = beta;
  c.k_upper_ = holder_upper;
  c.k_lower_ = holder_lower;
  c.fn_ = std::move(fn);
  return c;
}

double TimeCovariance::hurst() const {
  if (kind_ != TimeCovKind::FractionalBrownian)
    throw std::logic_error("hurst(): not a fractional Brownian covariance");
  return h0_;
}

double TimeCovariance::operator()(double s, double t) const {
  if (s < 0.0 || t < 0.0)
    throw std::domain_error("TimeCovariance: negative time argument");
  switch (kind_) {
    case TimeCovKind::Brownian:
      return std::min(s, t);
    case TimeCovKind::FractionalBrownian: {
      const double a = 2.0 * h0_;
      return 0.5 * (std::pow(s, a) + std::pow(t, a) - std::pow(std::abs(s - t), a));
    }
    case TimeCovKind::Product:
      return s * t;
    case TimeCovKind::Custom:
      return fn_(s, t);
  }
  return 0.0;
}

double TimeCovariance::rect(double s, double t, double u, double v) const {
  if (s > t || u > v)
    throw std::domain_error("rect: interval endpoints out of order");
  const TimeCovariance& R = *this;
  return R(v, t) - R(v, s) - R(u, t) + R(u, s);
}

std::string TimeCovariance::spec_string() const {
  switch (kind_) {
    case TimeCovKind::Brownian: return "brownian";
    case TimeCovKind::FractionalBrownian: return "fbm:H0=" + std::to_string(h0_);
    case TimeCovKind::Product: return "product";
    case TimeCovKind::Custom: return "custom";
  }
  return "?";
}

IncrementExponentReport verify_increment_exponent(const TimeCovariance& cov,
                                                  double horizon, int grid_n) {
  if (grid_n < 8) throw std::invalid_argument("verify_increment_exponent: grid_n >= 8");
  if (!(horizon > 0.0)) throw std::invalid_argument("verify_increment_exponent: horizon > 0");
  const double h = horizon / grid_n;
  const double beta = cov.beta();

  IncrementExponentReport rep;
  rep.min_ratio = std::numeric_limits<double>::infinity();
  rep.max_ratio = 0.0;

  for (int it = 1; it <= grid_n; ++it) {
    const double t = it * h;
    for (int iu = 0; iu < it; ++iu) {
      const double u = iu * h;
      for (int iv = 0; iv <= iu; ++iv) {
        const double v = iv * h;
        const double r = std::abs(cov.rect(u, t, v, t));
        const double denom = std::pow(t - std::min(u, v), beta);
        const double ratio = r / denom;
        rep.min_ratio = std::min(rep.min_ratio, ratio);
        rep.max_ratio = std::max(rep.max_ratio, ratio);
        ++rep.triples;
      }
    }
  }

  // Increment regression at the horizon: |R(t,u)-R(t,v)| against |u-v|.
  std::vector<double> lx, ly;
  const double t = horizon;
  for (int iu = 0; iu < grid_n; ++iu) {
    for (int iv = 0; iv < iu; ++iv) {
      const double u = iu * h, v = iv * h;
      const double d = std::abs(cov(t, u) - cov(t, v));
      if (d > 1e-300) {
        lx.push_back(std::log(u - v));
        ly.push_back(std::log(d));
      }
    }
  }
  if (lx.size() >= 2) {
    LinearFit fit = fit_line(lx, ly);
    rep.slope = fit.slope;
    rep.slope_r2 = fit.r2;
  }

  const double tol = 1e-9;
  rep.pass = std::isfinite(rep.max_ratio) && rep.min_ratio > 0.0 &&
             rep.max_ratio <= cov.holder_const_upper() * (1.0 + tol) + tol &&
             rep.min_ratio >= cov.holder_const_lower() * (1.0 - tol) - tol &&
             rep.slope >= 0.5 * beta - 0.05;
  return rep;
}

}  // namespace spde
