#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "spde/covariance.hpp"
#include "spde/fft.hpp"
#include "spde/spectral.hpp"

namespace spde {

// Real scalar field on a periodic grid.
class GridField {
 public:
  GridField() = default;
  GridField(GridGeom geom, std::vector<double> values);
  static GridField zero(const GridGeom& g);

  const GridGeom& geom() const { return geom_; }
  const std::vector<double>& values() const { return v_; }
  std::vector<double>& values() { return v_; }
  double& operator[](long i) { return v_[static_cast<size_t>(i)]; }
  double operator[](long i) const { return v_[static_cast<size_t>(i)]; }

  std::vector<std::complex<double>> spectrum() const;  // forward DFT
  static GridField from_spectrum(const GridGeom& g,
                                 std::vector<std::complex<double>> spec);

  GridField& operator+=(const GridField& o);
  GridField& operator-=(const GridField& o);
  GridField& operator*=(double c);

  double l2_norm() const;  // grid L2 norm, (dx^d sum |f|^2)^(1/2)

 private:
  GridGeom geom_;
  std::vector<double> v_;
};

// Dyadic partition of unity on the grid frequencies: chi supported in the
// ball |xi| <= 4/3, phi_j = phi(2^-j xi) supported in 2^j * (1, 8/3), and
// chi + sum_j phi_j = 1 exactly at every grid frequency.
class FreqPartition {
 public:
  FreqPartition(GridGeom geom, int j_max, std::vector<double> chi,
                std::vector<std::vector<double>> phi);

  const GridGeom& geom() const { return geom_; }
  int j_max() const { return j_max_; }
  bool in_range(int j) const { return j >= -1 && j <= j_max_; }

  // multiplier values on the grid; j = -1 is the chi block
  const std::vector<double>& multiplier(int j) const;

  static double chi_of_r(double r);  // 1 on [0,1], 0 on [4/3, inf)
  static double phi_of_r(double r);  // chi(r/2) - chi(r)

 private:
  GridGeom geom_;
  int j_max_;
  std::vector<double> chi_;
  std::vector<std::vector<double>> phi_;
};

FreqPartition build_partition(const GridGeom& g);

struct BesovParams {
  double kappa = 0.0;
  int q = 1;           // norm exponent 2q
  double sigma = 0.0;  // weight (1+|x|)^{-sigma}, sigma > d; 0 means d+1

  double effective_sigma(int dim) const { return sigma > 0.0 ? sigma : dim + 1.0; }
};

GridField dyadic_block(const GridField& f, const FreqPartition& p, int j);

double besov_norm(const GridField& f, const FreqPartition& p, const BesovParams& bp);

// frequency multiplier exp(-tau |xi|^2 / 2) (heat kernel convention of the
// variance identity)
GridField heat_apply(const GridField& f, double tau);

// One draw of the spatial noise increment dW_{st}: stationary Gaussian field
// with spectral weights rect_R([s,t]^2) * mu(cell), synthesized in frequency
// space with Hermitian symmetry. Deterministic in (seed).
GridField sample_noise_field(const TimeCovariance& cov, const SpectralMeasure& m,
                             double s, double t, const GridGeom& g, std::uint64_t seed);

// Jointly sampled dyadic noise increments dW over cells [k 2^-L, (k+1) 2^-L),
// colored in time by the Cholesky factor of the rect-increment Gram. Coarser
// increments are sums of the fine ones, so levels n <= L are
// refinement-consistent by construction.
class DyadicNoise {
 public:
  DyadicNoise(const TimeCovariance& cov, const SpectralMeasure& m, int gen_level,
              double horizon, const GridGeom& g, std::uint64_t seed);

  int gen_level() const { return gen_level_; }
  long fine_count() const { return colored_.rows(); }
  const GridGeom& geom() const { return geom_; }
  double horizon() const { return horizon_; }

  // spectrum of the level-n increment over [k 2^-n, (k+1) 2^-n)
  Eigen::RowVectorXcd increment_spectrum(int n, long k) const;

  // u^n_t = sum_{t_k < t} p_{t - t_k} dW_k at dyadic level n <= gen_level
  GridField solution(int n, double t) const;

 private:
  GridGeom geom_;
  int gen_level_;
  double horizon_;
  Eigen::MatrixXcd colored_;  // fine_count x grid size
};

struct NoiseScalingReport {
  std::vector<double> gaps;
  std::vector<double> mean_sq_norms;  // E ||dW_{s,s+gap}||^2_{B^kappa_q}
  double slope = 0.0;
  double r2 = 0.0;
  int n_rep = 0;
};

NoiseScalingReport noise_besov_scaling(const TimeCovariance& cov,
                                       const SpectralMeasure& m, const GridGeom& g,
                                       const BesovParams& bp,
                                       const std::vector<double>& gaps, int n_rep,
                                       std::uint64_t seed, int threads = 0);

struct SmoothingReport {
  double slope_heat = 0.0;
  double expected_heat = 0.0;
  bool pass_heat = false;
  double slope_idminus = 0.0;
  double expected_idminus = 0.0;
  bool pass_idminus = false;
  double r2_heat = 0.0;
  double r2_idminus = 0.0;
};

// Fits log||p_tau f||_{B^eta_q} and log||(Id-p_tau) f||_{B^alpha_q} against
// log tau. kappa_gap is the assumed kappa - alpha of the test field for the
// second bound (the rate saturates at +1 when kappa - alpha >= 2).
SmoothingReport smoothing_rate_check(const GridField& f, const FreqPartition& p,
                                     double alpha, double eta,
                                     const std::vector<double>& tau_list,
                                     const BesovParams& bp, double kappa_gap = 2.0);

// public form of the dyadic scheme solution (level-n increments are generated
// at gen_level = max(n+1, 8) so that calls with consecutive n share noise)
GridField dyadic_solution(const TimeCovariance& cov, const SpectralMeasure& m, int n,
                          double t, const GridGeom& g, std::uint64_t seed);

struct CauchyDecayReport {
  int n_lo = 0;
  int n_hi = 0;
  std::vector<double> mean_diff_norms;  // E ||u^n - u^{n+1}||, n = n_lo..n_hi
  double theta = 0.0;                   // fitted decay: norms ~ 2^{-theta n}
  double fitted_ratio = 1.0;            // 2^{-theta}
  double r2 = 0.0;
  int n_rep = 0;
};

CauchyDecayReport dyadic_cauchy_decay(const TimeCovariance& cov,
                                      const SpectralMeasure& m, int n_lo, int n_hi,
                                      double t, const GridGeom& g,
                                      const BesovParams& bp, int n_rep,
                                      std::uint64_t seed, int threads = 0);

struct HolderReport {
  std::vector<double> gaps;
  std::vector<double> mean_norms;  // E ||u_t - u_s|| per gap
  double fitted_exponent = 0.0;
  double r2 = 0.0;
  double expected = 0.0;  // (beta' - beta - eta)/2
  bool pass = false;
  int n_rep = 0;
};

// Time-Holder estimate of the dyadic solution path into B^eta_q (eta =
// bp.kappa); beta_analysis is the user-chosen spectral exponent.
HolderReport holder_estimate(const TimeCovariance& cov, const SpectralMeasure& m,
                             int n, const std::vector<double>& times,
                             const GridGeom& g, const BesovParams& bp,
                             double beta_analysis, std::uint64_t seed, int n_rep,
                             int threads = 0);

}  // namespace spde
