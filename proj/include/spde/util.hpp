#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

namespace spde {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

// Surface area of the unit sphere S^{d-1}; for d=1 this is the two-point set {-1,+1}.
inline double sphere_surface(int dim) {
  if (dim < 1) throw std::invalid_argument("sphere_surface: dim must be >= 1");
  if (dim == 1) return 2.0;
  return 2.0 * std::pow(kPi, 0.5 * dim) / std::tgamma(0.5 * dim);
}

// Compensated accumulator. Summation order is fixed by the caller, so results
// do not depend on thread count.
class KahanSum {
 public:
  void add(double x) {
    double y = x - c_;
    double t = s_ + y;
    c_ = (t - s_) - y;
    s_ = t;
  }
  double value() const { return s_; }

 private:
  double s_ = 0.0;
  double c_ = 0.0;
};

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

// Runs body(i) for i in [0, n). Each index writes to its own slot, so the
// result is identical for any thread count.
void parallel_for(long n, int threads, const std::function<void(long)>& body);

int default_threads();

}  // namespace spde
