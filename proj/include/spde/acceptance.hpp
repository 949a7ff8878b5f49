#pragma once

#include <string>
#include <vector>

#include "spde/spectral.hpp"

namespace spde {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  double seconds = 0.0;
  double limit_seconds = 0.0;
  std::vector<std::string> details;
};

// Second-moment oracle for Brownian time covariance: the classical Wiener
// isometry int_0^t int exp(-(t-s)|xi|^2) mu(dxi) ds evaluated by direct 1-D
// quadrature. Independent route against the four-term identity.
double isometry_second_moment(const SpectralMeasure& m, double t);

std::vector<CriterionResult> run_acceptance(int threads = 0);
CriterionResult run_criterion(int id, int threads = 0);

}  // namespace spde
