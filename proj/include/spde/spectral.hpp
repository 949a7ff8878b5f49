#pragma once

#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "spde/covariance.hpp"
#include "spde/quadrature.hpp"

namespace spde {

enum class MeasureKind { White, Riesz, Bessel, FractionalProduct, CustomDensity };

// Spatial spectral measure mu(dxi) = density(xi) dxi on R^d. All presets admit
// an exact radial reduction: for any radial weight W,
//   integral of W(|xi|) d mu = sphere_surface(d) * int_0^inf profile(r) r^{d-1} W(r) dr.
// For the fractional product the profile is the angular average of the
// homogeneous density, computed in closed form.
class SpectralMeasure {
 public:
  using DensityFn = std::function<double(std::span<const double>)>;

  static SpectralMeasure white(int dim, double scale = 1.0);
  static SpectralMeasure riesz(int dim, double eta);   // |xi|^{-(d-eta)}, eta > 0
  static SpectralMeasure bessel(int dim, double eta);  // (1+|xi|^2)^{-eta/2}, eta > 0
  static SpectralMeasure fractional_product(std::vector<double> hurst);
  static SpectralMeasure custom(int dim, DensityFn fn, bool radial,
                                double tail_exponent = 0.0,
                                double origin_exponent = 0.0);

  int dim() const { return dim_; }
  MeasureKind kind() const { return kind_; }
  bool radial_pointwise() const { return radial_pointwise_; }
  bool radial_reducible() const { return radial_reducible_; }

  double density(std::span<const double> xi) const;

  // Radial reduction profile and its power-law exponents at 0 and infinity.
  double radial_profile(double r) const;
  double profile_smooth_factor(double r) const;  // radial_profile(r) / r^{origin_exponent}
  double origin_exponent() const { return origin_exp_; }
  double tail_exponent() const { return tail_exp_; }
  bool finite_total_mass() const { return dim_ + tail_exp_ < 0.0; }

  double truncation_radius() const { return trunc_radius_; }
  void set_truncation_radius(double r);

  double scale() const;                      // White
  double eta() const;                        // Riesz / Bessel
  const std::vector<double>& hurst() const;  // FractionalProduct

  std::string spec_string() const;

 private:
  SpectralMeasure() = default;
  int dim_ = 1;
  MeasureKind kind_ = MeasureKind::White;
  bool radial_pointwise_ = true;
  bool radial_reducible_ = true;
  double param_ = 1.0;  // scale or eta
  std::vector<double> hurst_;
  double angular_mass_ = 0.0;  // fractional product: integral of the density over S^{d-1}
  DensityFn fn_;
  double origin_exp_ = 0.0;
  double tail_exp_ = 0.0;
  double trunc_radius_ = 1e4;
};

struct DalangResult {
  double value = 0.0;      // full integral including the tail beyond the truncation radius
  bool converged = false;
  double tail_bound = 0.0;  // mass beyond the truncation radius; +inf when divergent
  double error_est = 0.0;
  long evals = 0;
};

// Existence integral int (1+|xi|^{2 beta})^{-1} mu(dxi). Quadrature up to the
// truncation radius; the tail is integrated under a log substitution whose
// range comes from the tail exponent, and declared divergent when the decay
// exponent is nonpositive (pure numerics cannot certify divergence).
DalangResult dalang_integral(const SpectralMeasure& m, double beta);

// Full tensor-product quadrature over the box [-box, box]^d (d <= 3); used as
// an independent cross-check of the radial reduction.
QuadResult dalang_integral_tensor(const SpectralMeasure& m, double beta, double box);

// mu({|xi| <= radius}) and int_{|xi|>1} |xi|^power mu(dxi) (power < 0).
QuadResult measure_ball_mass(const SpectralMeasure& m, double radius);
QuadResult measure_tail_moment(const SpectralMeasure& m, double power);

struct ExistenceReport {
  bool analytic = false;
  bool numeric = false;
  bool agree = false;
  double beta = 0.0;
  std::string condition;  // the closed-form threshold that was evaluated
  DalangResult integral;
};

// Analytic preset threshold (at the covariance's beta) side by side with the
// numeric dalang_integral verdict.
ExistenceReport existence_verdict(const SpectralMeasure& m, const TimeCovariance& cov);

}  // namespace spde
