#pragma once

#include <functional>
#include <stdexcept>
#include <string>

namespace spde {

enum class TimeCovKind { Brownian, FractionalBrownian, Product, Custom };

// Time covariance R(s,t) together with the exponent beta of the
// rectangular-increment hypothesis |R(t,t)-R(t,v)-R(u,t)+R(u,v)| ~ (t-u^v)^beta
// and the stored two-sided constants. Custom covariances must declare beta and
// the constants; the library verifies but never infers them.
class TimeCovariance {
 public:
  using Fn = std::function<double(double, double)>;

  static TimeCovariance brownian();
  static TimeCovariance fractional_brownian(double h0);
  static TimeCovariance product();
  static TimeCovariance custom(Fn fn, double beta, double holder_upper,
                               double holder_lower = 0.0);

  double operator()(double s, double t) const;  // R(s,t), requires s,t >= 0

  // R(v,t) - R(v,s) - R(u,t) + R(u,s): covariance of increments over
  // [s,t] x [u,v]. Requires s <= t and u <= v.
  double rect(double s, double t, double u, double v) const;

  TimeCovKind kind() const { return kind_; }
  double beta() const { return beta_; }
  double holder_const_upper() const { return k_upper_; }
  double holder_const_lower() const { return k_lower_; }
  double hurst() const;  // FractionalBrownian only

  std::string spec_string() const;

 private:
  TimeCovariance() = default;
  TimeCovKind kind_ = TimeCovKind::Brownian;
  double h0_ = 0.5;
  double beta_ = 1.0;
  double k_upper_ = 1.0;
  double k_lower_ = 0.0;
  Fn fn_;
};

struct IncrementExponentReport {
  double min_ratio = 0.0;
  double max_ratio = 0.0;
  double slope = 0.0;        // log|R(t,u)-R(t,v)| vs log|u-v|
  double slope_r2 = 0.0;
  bool pass = false;
  long triples = 0;
};

// Grid diagnostic for the increment hypothesis: ratios
// |rect([u,t]x[v,t])| / (t - u^v)^beta over all grid triples u,v < t <= horizon
// plus a regression slope expected >= beta/2.
IncrementExponentReport verify_increment_exponent(const TimeCovariance& cov,
                                                  double horizon, int grid_n);

}  // namespace spde
