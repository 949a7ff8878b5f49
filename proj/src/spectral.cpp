#include "spde/spectral.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "spde/util.hpp"

namespace spde {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

// substitution power making r^{a-1} integrable-smooth near 0: r = w^k
int sub_power(double a) {
  if (a >= 2.0) return 1;
  int k = static_cast<int>(std::ceil(2.0 / a));
  return std::max(1, k);
}
}  // namespace

SpectralMeasure SpectralMeasure::white(int dim, double scale) {
  if (dim < 1) throw std::invalid_argument("white: dim >= 1");
  if (!(scale > 0.0)) throw std::invalid_argument("white: scale > 0");
  SpectralMeasure m;
  m.dim_ = dim;
  m.kind_ = MeasureKind::White;
  m.param_ = scale;
  m.origin_exp_ = 0.0;
  m.tail_exp_ = 0.0;
  return m;
}

SpectralMeasure SpectralMeasure::riesz(int dim, double eta) {
  if (dim < 1) throw std::invalid_argument("riesz: dim >= 1");
  // eta > 0 keeps the density integrable at the origin; eta >= d is admitted
  // as a spectral density even though the spatial kernel |x|^{-eta} then stops
  // being locally integrable.
  if (!(eta > 0.0)) throw std::invalid_argument("riesz: eta must be > 0");
  SpectralMeasure m;
  m.dim_ = dim;
  m.kind_ = MeasureKind::Riesz;
  m.param_ = eta;
  m.origin_exp_ = eta - dim;
  m.tail_exp_ = eta - dim;
  return m;
}

SpectralMeasure SpectralMeasure::bessel(int dim, double eta) {
  if (dim < 1) throw std::invalid_argument("bessel: dim >= 1");
  if (!(eta > 0.0)) throw std::invalid_argument("bessel: eta must be > 0");
  SpectralMeasure m;
  m.dim_ = dim;
  m.kind_ = MeasureKind::Bessel;
  m.param_ = eta;
  m.origin_exp_ = 0.0;
  m.tail_exp_ = -eta;
  return m;
}

SpectralMeasure SpectralMeasure::fractional_product(std::vector<double> hurst) {
  if (hurst.empty()) throw std::invalid_argument("fractional_product: need d >= 1");
  for (double h : hurst)
    if (!(h > 0.0 && h < 1.0))
      throw std::invalid_argument("fractional_product: H_i in (0,1)");
  SpectralMeasure m;
  m.dim_ = static_cast<int>(hurst.size());
  m.kind_ = MeasureKind::FractionalProduct;
  m.hurst_ = std::move(hurst);
  double q = 0.0;
  for (double h : m.hurst_) q += 1.0 - 2.0 * h;
  m.origin_exp_ = q;
  m.tail_exp_ = q;
  m.radial_pointwise_ = (m.dim_ == 1);
  m.radial_reducible_ = true;
  // angular integral of prod |w_i|^{a_i} over S^{d-1}:
  // 2 * prod Gamma((a_i+1)/2) / Gamma((d + sum a_i)/2)
  double lg = 0.0;
  for (double h : m.hurst_) lg += std::lgamma((2.0 - 2.0 * h) / 2.0);
  lg -= std::lgamma(0.5 * (m.dim_ + q));
  m.angular_mass_ = 2.0 * std::exp(lg);
  return m;
}

SpectralMeasure SpectralMeasure::custom(int dim, DensityFn fn, bool radial,
                                        double tail_exponent, double origin_exponent) {
  if (dim < 1) throw std::invalid_argument("custom: dim >= 1");
  if (!fn) throw std::invalid_argument("custom: density callable required");
  if (dim + origin_exponent <= 0.0)
    throw std::invalid_argument("custom: origin exponent makes the measure non-locally-finite");
  SpectralMeasure m;
  m.dim_ = dim;
  m.kind_ = MeasureKind::CustomDensity;
  m.fn_ = std::move(fn);
  m.radial_pointwise_ = radial;
  m.radial_reducible_ = radial;
  m.tail_exp_ = tail_exponent;
  m.origin_exp_ = origin_exponent;
  return m;
}

void SpectralMeasure::set_truncation_radius(double r) {
  if (!(r > 1.0)) throw std::invalid_argument("truncation radius must exceed 1");
  trunc_radius_ = r;
}

double SpectralMeasure::density(std::span<const double> xi) const {
  if (static_cast<int>(xi.size()) != dim_)
    throw std::invalid_argument("density: xi has wrong dimension");
  switch (kind_) {
    case MeasureKind::White:
      return param_ * std::pow(kTwoPi, -dim_);
    case MeasureKind::Riesz: {
      double r2 = 0.0;
      for (double v : xi) r2 += v * v;
      const double e = param_ - dim_;
      if (r2 == 0.0) return e < 0.0 ? kInf : (e == 0.0 ? 1.0 : 0.0);
      return std::pow(r2, 0.5 * e);
    }
    case MeasureKind::Bessel: {
      double r2 = 0.0;
      for (double v : xi) r2 += v * v;
      return std::pow(1.0 + r2, -0.5 * param_);
    }
    case MeasureKind::FractionalProduct: {
      double p = 1.0;
      for (int i = 0; i < dim_; ++i) {
        const double a = 1.0 - 2.0 * hurst_[static_cast<size_t>(i)];
        const double v = std::abs(xi[static_cast<size_t>(i)]);
        if (v == 0.0) {
          if (a < 0.0) return kInf;
          if (a > 0.0) return 0.0;
          continue;
        }
        p *= std::pow(v, a);
      }
      return p;
    }
    case MeasureKind::CustomDensity:
      return fn_(xi);
  }
  return 0.0;
}

double SpectralMeasure::radial_profile(double r) const {
  switch (kind_) {
    case MeasureKind::White:
      return param_ * std::pow(kTwoPi, -dim_);
    case MeasureKind::Riesz:
      return std::pow(r, param_ - dim_);
    case MeasureKind::Bessel:
      return std::pow(1.0 + r * r, -0.5 * param_);
    case MeasureKind::FractionalProduct:
      return angular_mass_ / sphere_surface(dim_) * std::pow(r, origin_exp_);
    case MeasureKind::CustomDensity: {
      if (!radial_reducible_)
        throw std::logic_error("radial_profile: measure is not radial");
      std::vector<double> xi(static_cast<size_t>(dim_), 0.0);
      xi[0] = r;
      return fn_(xi);
    }
  }
  return 0.0;
}

double SpectralMeasure::profile_smooth_factor(double r) const {
  switch (kind_) {
    case MeasureKind::White:
      return param_ * std::pow(kTwoPi, -dim_);
    case MeasureKind::Riesz:
      return 1.0;
    case MeasureKind::Bessel:
      return std::pow(1.0 + r * r, -0.5 * param_);
    case MeasureKind::FractionalProduct:
      return angular_mass_ / sphere_surface(dim_);
    case MeasureKind::CustomDensity:
      if (origin_exp_ == 0.0) return radial_profile(r);
      return radial_profile(r) / std::pow(r, origin_exp_);
  }
  return 0.0;
}

double SpectralMeasure::scale() const {
  if (kind_ != MeasureKind::White) throw std::logic_error("scale(): not a white measure");
  return param_;
}

double SpectralMeasure::eta() const {
  if (kind_ != MeasureKind::Riesz && kind_ != MeasureKind::Bessel)
    throw std::logic_error("eta(): not a Riesz/Bessel measure");
  return param_;
}

const std::vector<double>& SpectralMeasure::hurst() const {
  if (kind_ != MeasureKind::FractionalProduct)
    throw std::logic_error("hurst(): not a fractional product measure");
  return hurst_;
}

std::string SpectralMeasure::spec_string() const {
  std::ostringstream os;
  switch (kind_) {
    case MeasureKind::White: os << "white:scale=" << param_; break;
    case MeasureKind::Riesz: os << "riesz:eta=" << param_; break;
    case MeasureKind::Bessel: os << "bessel:eta=" << param_; break;
    case MeasureKind::FractionalProduct: {
      os << "fracprod:H=";
      for (size_t i = 0; i < hurst_.size(); ++i) os << (i ? "," : "") << hurst_[i];
      break;
    }
    case MeasureKind::CustomDensity: os << "custom"; break;
  }
  return os.str();
}

namespace {

// omega_d * int_lo^hi profile(r) r^{d-1} W(r) dr for 0 <= lo < hi <= ~2, with
// the r = w^k substitution taming the origin power law.
QuadResult radial_near(const SpectralMeasure& m, const Integrand& weight,
                       double lo, double hi) {
  const double a = m.dim() + m.origin_exponent();
  const int k = sub_power(a);
  const double omega = sphere_surface(m.dim());
  auto g = [&](double w) {
    const double r = std::pow(w, k);
    return k * std::pow(w, k * a - 1.0) * m.profile_smooth_factor(r) * weight(r);
  };
  QuadResult q = adaptive_gk15(g, std::pow(lo, 1.0 / k), std::pow(hi, 1.0 / k),
                               0.0, 1e-10, 4000);
  q.value *= omega;
  q.error *= omega;
  return q;
}

// omega_d * int_{r_lo}^{r_hi} profile(r) r^{d-1} W(r) dr via y = log r. The
// r^d jacobian is folded in through logs so that huge radii cannot overflow
// an intermediate factor of an otherwise tiny integrand.
QuadResult radial_log(const SpectralMeasure& m, const Integrand& weight,
                      double r_lo, double r_hi) {
  const double omega = sphere_surface(m.dim());
  const int d = m.dim();
  auto g = [&](double y) {
    const double r = std::exp(y);
    const double pw = m.radial_profile(r) * weight(r);
    if (!(pw > 0.0)) return 0.0;
    return std::exp(std::log(pw) + d * y);
  };
  QuadResult q = adaptive_gk15(g, std::log(r_lo), std::log(r_hi), 0.0, 1e-10, 8000);
  q.value *= omega;
  q.error *= omega;
  return q;
}

}  // namespace

DalangResult dalang_integral(const SpectralMeasure& m, double beta) {
  if (!(beta > 0.0 && beta <= 2.0))
    throw std::invalid_argument("dalang_integral: beta must lie in (0,2]");
  DalangResult out;
  auto weight = [beta](double r) { return 1.0 / (1.0 + std::pow(r, 2.0 * beta)); };

  if (!m.radial_reducible()) {
    // best effort tensor path for non-radial custom densities (d <= 3)
    const double box = std::min(m.truncation_radius(), 50.0);
    QuadResult q = dalang_integral_tensor(m, beta, box);
    out.value = q.value;
    out.evals = q.evals;
    out.error_est = q.error;
    const double a_tail = 2.0 * beta - m.dim() - m.tail_exponent();
    out.tail_bound = a_tail > 0.0 ? std::numeric_limits<double>::quiet_NaN() : kInf;
    out.converged = a_tail > 0.0 && q.converged;
    return out;
  }

  const double R = m.truncation_radius();
  QuadResult near = radial_near(m, weight, 0.0, 1.0);
  QuadResult far = radial_log(m, weight, 1.0, R);
  out.evals = near.evals + far.evals;
  out.error_est = near.error + far.error;

  // integrand decays like r^{-(1+a_tail)} in log-radius beyond R
  const double a_tail = 2.0 * beta - m.dim() - m.tail_exponent();
  bool tail_finite = a_tail > 0.0;
  QuadResult tail;
  if (tail_finite) {
    // log-range capped to stay representable; the cut mass is exp(-a*600)
    const double r_max = R * std::exp(std::min(60.0 / a_tail, 600.0));
    tail = radial_log(m, weight, R, r_max);
    out.evals += tail.evals;
    out.error_est += tail.error;
    out.tail_bound = tail.value;
  } else {
    out.tail_bound = kInf;
  }

  out.value = near.value + far.value + (tail_finite ? tail.value : 0.0);
  out.converged = tail_finite && near.converged && far.converged && tail.converged;
  return out;
}

namespace {

double tensor_recursive(const SpectralMeasure& m, double beta, double box,
                        std::vector<double>& xi, int axis, long* evals) {
  auto f = [&](double x) -> double {
    xi[static_cast<size_t>(axis)] = x;
    if (axis + 1 == m.dim()) {
      ++*evals;
      double r2 = 0.0;
      for (double v : xi) r2 += v * v;
      return m.density(xi) / (1.0 + std::pow(r2, beta));
    }
    return tensor_recursive(m, beta, box, xi, axis + 1, evals);
  };
  // split at 0: densities may be singular on the coordinate hyperplanes, and
  // GK nodes stay interior so the endpoints are never evaluated
  const double tol = axis == 0 ? 1e-9 : 1e-10;
  QuadResult qn = adaptive_gk15(f, -box, 0.0, 0.0, tol, 600);
  QuadResult qp = adaptive_gk15(f, 0.0, box, 0.0, tol, 600);
  return qn.value + qp.value;
}

}  // namespace

QuadResult dalang_integral_tensor(const SpectralMeasure& m, double beta, double box) {
  if (m.dim() > 3)
    throw std::invalid_argument("dalang_integral_tensor: d <= 3 only");
  std::vector<double> xi(static_cast<size_t>(m.dim()), 0.0);
  QuadResult q;
  q.value = tensor_recursive(m, beta, box, xi, 0, &q.evals);
  return q;
}

QuadResult measure_ball_mass(const SpectralMeasure& m, double radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("measure_ball_mass: radius > 0");
  auto one = [](double) { return 1.0; };
  QuadResult q = radial_near(m, one, 0.0, std::min(radius, 1.0));
  if (radius > 1.0) q += radial_log(m, one, 1.0, radius);
  return q;
}

QuadResult measure_tail_moment(const SpectralMeasure& m, double power) {
  const double a = -(m.dim() + m.tail_exponent() + power);
  QuadResult q;
  if (a <= 0.0) {
    q.value = kInf;
    q.converged = false;
    return q;
  }
  auto w = [power](double r) { return std::pow(r, power); };
  const double r_max = std::exp(std::min(60.0 / a, 600.0));
  return radial_log(m, w, 1.0, r_max);
}

ExistenceReport existence_verdict(const SpectralMeasure& m, const TimeCovariance& cov) {
  ExistenceReport rep;
  const double beta = cov.beta();
  rep.beta = beta;

  std::ostringstream cond;
  switch (m.kind()) {
    case MeasureKind::White:
      rep.analytic = 2.0 * beta > m.dim();
      cond << "2*beta > d (" << 2.0 * beta << " vs " << m.dim() << ")";
      break;
    case MeasureKind::Riesz:
      rep.analytic = m.eta() < 2.0 * beta;
      cond << "eta < 2*beta (" << m.eta() << " vs " << 2.0 * beta << ")";
      break;
    case MeasureKind::Bessel:
      rep.analytic = m.eta() > m.dim() - 2.0 * beta;
      cond << "eta > d - 2*beta (" << m.eta() << " vs " << m.dim() - 2.0 * beta << ")";
      break;
    case MeasureKind::FractionalProduct: {
      double hs = 0.0;
      for (double h : m.hurst()) hs += h;
      rep.analytic = beta + hs > m.dim();
      cond << "beta + sum(H_i) > d (" << beta + hs << " vs " << m.dim() << ")";
      break;
    }
    case MeasureKind::CustomDensity:
      rep.analytic = 2.0 * beta - m.dim() - m.tail_exponent() > 0.0;
      cond << "2*beta > d + tail_exponent (" << 2.0 * beta << " vs "
           << m.dim() + m.tail_exponent() << ")";
      break;
  }
  rep.condition = cond.str();
  rep.integral = dalang_integral(m, std::min(beta, 2.0));
  rep.numeric = rep.integral.converged;
  rep.agree = rep.analytic == rep.numeric;
  return rep;
}

}  // namespace spde
