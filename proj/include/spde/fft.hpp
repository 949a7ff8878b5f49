#pragma once

#include <complex>
#include <stdexcept>
#include <vector>

#include "spde/util.hpp"

namespace spde {

// Uniform periodic grid: n^dim points on [-box/2, box/2)^dim, n a power of 2.
// Frequencies are 2*pi*m/box with m in [-n/2, n/2).
struct GridGeom {
  int dim = 1;
  int n = 0;
  double box = 0.0;

  GridGeom() = default;
  GridGeom(int dim_, int n_, double box_) : dim(dim_), n(n_), box(box_) {
    if (dim < 1 || dim > 3) throw std::invalid_argument("GridGeom: dim in 1..3");
    if (n < 2 || (n & (n - 1)) != 0)
      throw std::invalid_argument("GridGeom: n must be a power of two");
    if (!(box > 0.0)) throw std::invalid_argument("GridGeom: box > 0");
  }

  long size() const {
    long s = 1;
    for (int a = 0; a < dim; ++a) s *= n;
    return s;
  }
  double dx() const { return box / n; }
  double dxi() const { return kTwoPi / box; }

  int axis_index(long flat, int axis) const {
    for (int a = dim - 1; a > axis; --a) flat /= n;
    return static_cast<int>(flat % n);
  }
  int signed_mode(int i) const { return i < n / 2 ? i : i - n; }
  double freq_component(int i) const { return dxi() * signed_mode(i); }

  double freq_norm2(long flat) const {
    double s = 0.0;
    for (int a = 0; a < dim; ++a) {
      const double f = freq_component(axis_index(flat, a));
      s += f * f;
    }
    return s;
  }
  double coord_component(int i) const { return -0.5 * box + i * dx(); }

  bool operator==(const GridGeom& o) const {
    return dim == o.dim && n == o.n && box == o.box;
  }
};

// In-place radix-2 complex FFT along every axis. forward: sum_j f_j e^{-2pi i jk/n}.
// inverse applies the conjugate transform and divides by n^dim unless
// scale_inverse is false (spectral synthesis wants the plain adjoint sum).
void fft_nd(std::vector<std::complex<double>>& a, const GridGeom& g, bool inverse,
            bool scale_inverse = true);

}  // namespace spde
