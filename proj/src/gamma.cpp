#include "spde/gamma.hpp"

#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include "spde/quadrature.hpp"
#include "spde/util.hpp"

namespace spde {

namespace {

constexpr int kPanelLevels = 30;  // geometric panels down to U * 2^-30

// Fixed composite rule for int_0^U f(u) u^e exp(-u^2/2) du after u = w^k.
// Nodes and the tau-independent part of the weights are tabulated once; each
// evaluation is then a weighted sum of f at fixed abscissae, which keeps the
// quadrature error a smooth function of any parameter inside f.
struct GaussMomentRule {
  std::vector<double> node_u;
  std::vector<double> weight;

  GaussMomentRule() = default;

  GaussMomentRule(double e, double U) {
    const double a = e + 1.0;  // u^{a-1}
    int k = 1;
    if (a < 2.0) k = std::max(1, static_cast<int>(std::ceil(2.0 / a)));
    const double W = std::pow(U, 1.0 / k);
    auto push = [&](double w, double gk_w) {
      const double u = std::pow(w, k);
      node_u.push_back(u);
      weight.push_back(gk_w * k * std::pow(w, k * a - 1.0) * std::exp(-0.5 * u * u));
    };
    for (int j = kPanelLevels; j >= 0; --j) {
      const double hi = W * std::ldexp(1.0, -j);
      const double lo = (j == kPanelLevels) ? 0.0 : W * std::ldexp(1.0, -(j + 1));
      // 15-point Gauss-Kronrod abscissae of the panel
      const double c = 0.5 * (lo + hi), h = 0.5 * (hi - lo);
      gk15_nodes(c, h, push);
    }
  }

  template <typename F>
  double apply(const F& f) const {
    KahanSum s;
    for (size_t i = 0; i < node_u.size(); ++i) s.add(weight[i] * f(node_u[i]));
    return s.value();
  }
};

}  // namespace

struct GammaKernel::Rules {
  std::array<GaussMomentRule, 4> per_moment;
};

namespace {

double tensor_gauss(const SpectralMeasure& m, double tau, int moment,
                    std::vector<double>& xi, int axis) {
  const double X = std::sqrt(2.0 * 90.0 / tau);
  auto f = [&](double x) -> double {
    xi[static_cast<size_t>(axis)] = x;
    if (axis + 1 == m.dim()) {
      double r2 = 0.0;
      for (double v : xi) r2 += v * v;
      return m.density(xi) * std::pow(0.5 * r2, moment) * std::exp(-0.5 * tau * r2);
    }
    return tensor_gauss(m, tau, moment, xi, axis + 1);
  };
  QuadResult qn = adaptive_gk15(f, -X, 0.0, 0.0, 1e-9, 600);
  QuadResult qp = adaptive_gk15(f, 0.0, X, 0.0, 1e-9, 600);
  return qn.value + qp.value;
}

}  // namespace

GammaKernel::GammaKernel(SpectralMeasure measure, double t, double quad_tol)
    : mu_(std::move(measure)), t_(t), quad_tol_(quad_tol) {
  if (!(t > 0.0)) throw std::invalid_argument("GammaKernel: t must be > 0");
  if (!(quad_tol > 0.0)) throw std::invalid_argument("GammaKernel: quad_tol > 0");
  const MeasureKind kind = mu_.kind();
  if (mu_.radial_reducible() &&
      (kind == MeasureKind::Bessel || kind == MeasureKind::CustomDensity)) {
    auto rules = std::make_shared<Rules>();
    const double a = mu_.dim() + mu_.origin_exponent();
    for (int m = 0; m < 4; ++m)
      rules->per_moment[static_cast<size_t>(m)] =
          GaussMomentRule(a - 1.0 + 2.0 * m, 40.0);
    rules_ = std::move(rules);
  }
}

double GammaKernel::value_tau(double tau, int moment) const {
  if (moment < 0 || moment > 3)
    throw std::invalid_argument("value_tau: moment must be 0..3");
  if (!(tau > 0.0)) throw std::domain_error("value_tau: tau must be > 0");

  if (!mu_.radial_reducible()) {
    std::vector<double> xi(static_cast<size_t>(mu_.dim()), 0.0);
    return tensor_gauss(mu_, tau, moment, xi, 0);
  }

  const double a = mu_.dim() + mu_.origin_exponent();
  const double prefactor = sphere_surface(mu_.dim()) *
                           std::pow(tau, -(0.5 * a + moment)) *
                           std::ldexp(1.0, -moment);

  // power-law profiles have a constant smooth factor; the Gaussian moment
  // integral int u^{a-1+2m} e^{-u^2/2} du is then exact
  if (!rules_) {
    const double e = a - 1.0 + 2.0 * moment;
    const double gauss_moment =
        std::pow(2.0, 0.5 * (e - 1.0)) * std::tgamma(0.5 * (e + 1.0));
    return prefactor * mu_.profile_smooth_factor(1.0) * gauss_moment;
  }

  const double inv_sqrt_tau = 1.0 / std::sqrt(tau);
  const double j = rules_->per_moment[static_cast<size_t>(moment)].apply(
      [&](double u) { return mu_.profile_smooth_factor(u * inv_sqrt_tau); });
  return prefactor * j;
}

double GammaKernel::operator()(double s, double sp) const {
  const double tau = 2.0 * t_ - s - sp;
  if (tau < kCornerGuard) {
    if (mu_.finite_total_mass()) return value_tau(kCornerGuard, 0);
    return std::numeric_limits<double>::infinity();
  }
  return value_tau(tau, 0);
}

double GammaKernel::partial(double s, double sp, GammaOrder order) const {
  if (!(s < t_ && sp < t_))
    throw std::domain_error("gamma_partial: requires s, s' < t strictly");
  const double tau = 2.0 * t_ - s - sp;
  switch (order) {
    case GammaOrder::Ds: return value_tau(tau, 1);
    case GammaOrder::DsDsp: return value_tau(tau, 2);
    case GammaOrder::D2sDsp: return value_tau(tau, 3);
  }
  return 0.0;
}

}  // namespace spde
