#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "spde/covariance.hpp"
#include "spde/sampler.hpp"
#include "spde/spectral.hpp"

namespace spde {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Flat key = value study configuration with strict unknown-key rejection.
struct StudyConfig {
  std::string time_cov = "brownian";
  std::string measure = "white:scale=1";
  int dim = 1;
  double t = 1.0;
  double eps = 0.0;
  std::vector<double> eps_list;
  double t_tilde = 0.0;
  double eps_tilde = 0.0;
  double gamma_t = 0.0;  // terminal time of the Gamma kernel for ibp-verify
  int grid_n = 256;
  double grid_l = 8.0;
  double kappa = -0.6;
  int q = 1;
  double sigma = 0.0;  // 0 -> d+1
  double eta = 0.2;
  double alpha = -0.6;
  double beta = 0.0;  // analysis exponent; 0 -> covariance beta
  std::uint64_t seed = 42;
  int n_rep = 200;
  int threads = 0;  // 0 -> SPDE_THREADS or hardware
  int level = 5;
  std::vector<double> times;
  std::vector<double> tau_list;
  std::vector<double> gap_list;
  std::string wz_rule = "left";        // left | midpoint
  std::string wz_coverage = "margin";  // margin | full
  double trunc_radius = 0.0;           // 0 -> measure default
  bool measure_radial = true;          // custom measures
  double measure_tail_exponent = 0.0;
  double measure_origin_exponent = 0.0;

  std::string base_dir;  // directory of the config file, for custom density paths

  static StudyConfig from_file(const std::string& path);
  static StudyConfig from_string(const std::string& text, const std::string& base_dir = "");

  TimeCovariance make_time_cov() const;
  SpectralMeasure make_measure() const;
  FreezeRule make_rule() const;
  double analysis_beta() const;  // beta if set, else covariance beta
};

TimeCovariance parse_time_cov(const std::string& spec);
SpectralMeasure parse_measure(const std::string& spec, int dim, bool radial,
                              double tail_exponent, double origin_exponent,
                              const std::string& base_dir);

}  // namespace spde
