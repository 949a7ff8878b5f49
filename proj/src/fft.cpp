#include "spde/fft.hpp"

#include <cmath>

namespace spde {

namespace {

void fft_1d(std::complex<double>* a, int n, long stride, bool inverse) {
  // bit-reversal permutation
  for (int i = 1, j = 0; i < n; ++i) {
    int bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i * stride], a[j * stride]);
  }
  for (int len = 2; len <= n; len <<= 1) {
    const double ang = (inverse ? 1.0 : -1.0) * kTwoPi / len;
    const std::complex<double> wl(std::cos(ang), std::sin(ang));
    for (int i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (int k = 0; k < len / 2; ++k) {
        std::complex<double>& u = a[(i + k) * stride];
        std::complex<double>& v = a[(i + k + len / 2) * stride];
        const std::complex<double> t = v * w;
        v = u - t;
        u += t;
        w *= wl;
      }
    }
  }
}

}  // namespace

void fft_nd(std::vector<std::complex<double>>& a, const GridGeom& g, bool inverse,
            bool scale_inverse) {
  if (static_cast<long>(a.size()) != g.size())
    throw std::invalid_argument("fft_nd: size mismatch");
  const int n = g.n;

  if (g.dim == 1) {
    fft_1d(a.data(), n, 1, inverse);
  } else if (g.dim == 2) {
    for (int row = 0; row < n; ++row) fft_1d(a.data() + static_cast<long>(row) * n, n, 1, inverse);
    for (int col = 0; col < n; ++col) fft_1d(a.data() + col, n, n, inverse);
  } else {
    const long n2 = static_cast<long>(n) * n;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        fft_1d(a.data() + i * n2 + static_cast<long>(j) * n, n, 1, inverse);
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k)
        fft_1d(a.data() + i * n2 + k, n, n, inverse);
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        fft_1d(a.data() + static_cast<long>(j) * n + k, n, n2, inverse);
  }

  if (inverse && scale_inverse) {
    const double s = 1.0 / static_cast<double>(g.size());
    for (auto& z : a) z *= s;
  }
}

}  // namespace spde
