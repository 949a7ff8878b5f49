#include "spde/ibp.hpp"

#include <cmath>
#include <stdexcept>

#include "spde/util.hpp"

namespace spde {

namespace {

// smallest k with k*eps >= lo, robust to rounding in lo/eps
long k_first(double lo, double eps) {
  long k = static_cast<long>(std::ceil(lo / eps));
  while (k * eps < lo) ++k;
  while ((k - 1) * eps >= lo) --k;
  return k;
}

// sum over grid points k*eps in [lo, hi) of f, times eps
template <typename F>
double disc_sum(const F& f, double lo, double hi, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("disc integral: eps must be > 0");
  if (lo > hi) throw std::invalid_argument("disc integral: lo <= hi required");
  KahanSum s;
  const long k0 = k_first(lo, eps);
  const long k1 = k_first(hi, eps);
  for (long k = k0; k < k1; ++k) s.add(f(k * eps));
  return eps * s.value();
}

}  // namespace

double disc_integral(const std::function<double(double)>& f, double s, double t,
                     double eps) {
  return disc_sum(f, s, t, eps);
}

DiscretizationPair::DiscretizationPair(double eps_, double eps_tilde_, double t_,
                                       double t_tilde_)
    : eps(eps_), eps_tilde(eps_tilde_), t(t_), t_tilde(t_tilde_) {
  if (!(eps > 0.0 && eps_tilde > 0.0))
    throw std::invalid_argument("DiscretizationPair: steps must be positive");
  if (!(t > 0.0 && t_tilde > 0.0))
    throw std::invalid_argument("DiscretizationPair: horizons must be positive");
  if (!(eps < std::min(t, t_tilde) && eps_tilde < std::min(t, t_tilde)))
    throw std::invalid_argument("DiscretizationPair: steps must be below min(t, t_tilde)");
}

IbpBreakdown ibp_decompose(const std::function<double(double, double)>& gamma_fn,
                           const TimeCovariance& R, const DiscretizationPair& disc) {
  const double e = disc.eps, et = disc.eps_tilde;
  const double t = disc.t, tt = disc.t_tilde;

  if (k_first(t, e) - k_first(0.0, e) < 2 || k_first(tt, et) - k_first(0.0, et) < 2)
    throw std::invalid_argument("ibp_decompose: fewer than 2 grid points in a direction");

  // outer integral in s' (step et), inner in s (step e)
  auto dbl = [&](auto f, double s_lo, double s_hi, double sp_lo, double sp_hi) {
    return disc_sum(
        [&](double sp) {
          return disc_sum([&](double s) { return f(s, sp); }, s_lo, s_hi, e);
        },
        sp_lo, sp_hi, et);
  };

  IbpBreakdown out;

  out.A = dbl([&](double s, double sp) {
    return gamma_fn(s, sp) * R.rect(sp, sp + et, s, s + e);
  }, 0.0, t, 0.0, tt);

  out.A0 = dbl([&](double s, double sp) {
    const double grect = gamma_fn(s, sp) - gamma_fn(s, sp - et) -
                         gamma_fn(s - e, sp) + gamma_fn(s - e, sp - et);
    return grect * R(s, sp);
  }, 0.0, t, 0.0, tt);

  out.I0 = dbl([&](double s, double sp) {
    return gamma_fn(s - e, sp - et) * R(s, sp);
  }, t, t + e, tt, tt + et)
         - dbl([&](double s, double sp) {
    return gamma_fn(s - e, sp - et) * R(s, sp);
  }, 0.0, e, 0.0, et);

  out.I1 = dbl([&](double s, double sp) {
    return (gamma_fn(s - e, sp - et) - gamma_fn(s - e, sp)) * R(s, sp);
  }, t, t + e, et, tt)
         - dbl([&](double s, double sp) {
    return gamma_fn(s - e, sp) * R(s, sp);
  }, t, t + e, 0.0, et);

  out.I2 = dbl([&](double s, double sp) {
    return (gamma_fn(s - e, sp - et) - gamma_fn(s, sp - et)) * R(s, sp);
  }, e, t, tt, tt + et)
         - dbl([&](double s, double sp) {
    return gamma_fn(s, sp - et) * R(s, sp);
  }, 0.0, e, tt, tt + et);

  out.I3 = dbl([&](double s, double sp) {
    return (gamma_fn(s - e, sp) - gamma_fn(s - e, sp - et)) * R(s, sp);
  }, 0.0, e, et, tt)
         + dbl([&](double s, double sp) {
    return gamma_fn(s - e, sp) * R(s, sp);
  }, 0.0, e, 0.0, et);

  out.I4 = dbl([&](double s, double sp) {
    return (gamma_fn(s, sp - et) - gamma_fn(s - e, sp - et)) * R(s, sp);
  }, e, t, 0.0, et)
         + dbl([&](double s, double sp) {
    return gamma_fn(s, sp - et) * R(s, sp);
  }, 0.0, e, 0.0, et);

  return out;
}

}  // namespace spde
