#include "spde/variance.hpp"

#include <cmath>
#include <vector>

#include "spde/quadrature.hpp"
#include "spde/util.hpp"

namespace spde {

namespace {

// int_0^t int_0^t f(sigma, sigma') d sigma d sigma' on a tensor mesh graded
// geometrically toward sigma = 0 in both directions (substituting
// sigma = t - s). Returns the sum; *err collects GK errors plus the innermost
// band as a truncation estimate, *diverging is set when the per-level band
// masses grow toward the corner.
double graded_double(const std::function<double(double, double)>& f, double t,
                     int levels, double* err, bool* diverging) {
  std::vector<double> bp(static_cast<size_t>(levels) + 1);
  for (int k = 0; k <= levels; ++k) bp[static_cast<size_t>(k)] = t * std::ldexp(1.0, -k);
  // cells: [bp[k+1], bp[k]] for k = 0..levels-1

  KahanSum total;
  double err_sum = 0.0;
  std::vector<double> band_mass(static_cast<size_t>(levels), 0.0);

  for (int i = 0; i < levels; ++i) {
    const double alo = bp[static_cast<size_t>(i) + 1], ahi = bp[static_cast<size_t>(i)];
    for (int j = 0; j < levels; ++j) {
      const double blo = bp[static_cast<size_t>(j) + 1], bhi = bp[static_cast<size_t>(j)];
      double cell = 0.0, e0 = 0.0;
      if (i == j) {
        // rectangular increments of s^t / fBm type kink along sigma = sigma';
        // integrate the two triangles separately so each panel stays smooth
        auto lower = [&](double sa) {
          auto g = [&](double u) { return f(sa, alo + u * (sa - alo)) * (sa - alo); };
          return gk15_panel(g, 0.0, 1.0, nullptr);
        };
        auto upper = [&](double sb) {
          auto g = [&](double u) { return f(alo + u * (sb - alo), sb) * (sb - alo); };
          return gk15_panel(g, 0.0, 1.0, nullptr);
        };
        double e1 = 0.0, e2 = 0.0;
        cell = gk15_panel(lower, alo, ahi, &e1) + gk15_panel(upper, alo, ahi, &e2);
        e0 = e1 + e2;
      } else {
        auto inner = [&](double sa) {
          auto g = [&](double sb) { return f(sa, sb); };
          return gk15_panel(g, blo, bhi, nullptr);
        };
        cell = gk15_panel(inner, alo, ahi, &e0);
      }
      total.add(cell);
      err_sum += e0;
      const int band = std::max(i, j);
      band_mass[static_cast<size_t>(band)] += std::abs(cell);
    }
  }

  // truncation estimate: the innermost band, extrapolated geometrically
  const double last = band_mass[static_cast<size_t>(levels) - 1];
  const double prev = band_mass[static_cast<size_t>(levels) - 2];
  double trunc = last;
  if (prev > 0.0 && last < prev) trunc = last * last / (prev - last + 1e-300);
  err_sum += std::abs(trunc);
  if (diverging) {
    int grow = 0;
    for (int k = levels - 4; k + 1 < levels; ++k)
      if (band_mass[static_cast<size_t>(k + 1)] > band_mass[static_cast<size_t>(k)]) ++grow;
    *diverging = grow >= 3 && last > 0.0;
  }
  if (err) *err += err_sum;
  return total.value();
}

double double_term(const TimeCovariance& cov, const GammaKernel& kern, double t,
                   const VarianceOptions& opt, double* err, bool* diverging) {
  auto f = [&](double sa, double sb) {
    const double s = t - sa, sp = t - sb;
    return kern.value_tau(sa + sb, 2) * cov.rect(s, t, sp, t);
  };
  return graded_double(f, t, opt.grading_levels, err, diverging);
}

}  // namespace

VarianceBreakdown variance_exact(const TimeCovariance& cov, const SpectralMeasure& m,
                                 double t, const VarianceOptions& opt) {
  if (t < 0.0) throw std::domain_error("variance_exact: t >= 0");
  VarianceBreakdown out;
  if (t == 0.0) return out;

  const double a_tail = 2.0 * cov.beta() - m.dim() - m.tail_exponent();
  out.divergent = a_tail <= 0.0;

  GammaKernel kern(m, t);

  out.term_const = cov.rect(0.0, t, 0.0, t) * kern(0.0, 0.0);

  auto f_sp = [&](double sp) {
    return cov.rect(0.0, t, sp, t) * kern.value_tau(2.0 * t - sp, 1);
  };
  auto f_s = [&](double s) {
    return cov.rect(s, t, 0.0, t) * kern.value_tau(2.0 * t - s, 1);
  };
  QuadResult qsp = adaptive_gk15(f_sp, 0.0, t, 0.0, opt.single_tol);
  QuadResult qs = adaptive_gk15(f_s, 0.0, t, 0.0, opt.single_tol);
  out.term_sp = qsp.value;
  out.term_s = qs.value;
  out.quad_err_est = qsp.error + qs.error;

  bool diverging = false;
  out.term_double = double_term(cov, kern, t, opt, &out.quad_err_est, &diverging);
  out.divergent = out.divergent || diverging;

  out.total = out.term_const + out.term_s + out.term_sp + out.term_double;
  return out;
}

JBounds j_bounds(const TimeCovariance& cov, const SpectralMeasure& m, double t) {
  JBounds out;
  const double beta = cov.beta();
  const double k_upper = cov.holder_const_upper();

  QuadResult high = measure_tail_moment(m, -2.0 * beta);
  out.high_converged = high.converged;
  out.J1_bound = k_upper * std::pow(2.0, 1.0 + beta) * std::tgamma(beta + 1.0) * high.value;

  QuadResult ball = measure_ball_mass(m, 1.0);
  // int_0^t int_0^t (t - s^s')^beta ds ds' = 2 t^{beta+2}/(beta+2)
  out.J2_bound = k_upper * ball.value * 2.0 * std::pow(t, beta + 2.0) / (beta + 2.0);
  return out;
}

JTermResult j_term(const TimeCovariance& cov, const SpectralMeasure& m, double t,
                   const VarianceOptions& opt) {
  if (!(t > 0.0)) throw std::domain_error("j_term: t > 0");
  JTermResult out;

  GammaKernel kern(m, t);
  double err = 0.0;
  bool diverging = false;
  out.J = double_term(cov, kern, t, opt, &err, &diverging);

  JBounds b = j_bounds(cov, m, t);
  out.divergent = !b.high_converged || diverging;
  out.J1_bound = b.J1_bound;
  out.J2_bound = b.J2_bound;
  out.bound_holds = std::abs(out.J) <= out.J1_bound + out.J2_bound + err + 1e-12;
  return out;
}

}  // namespace spde
