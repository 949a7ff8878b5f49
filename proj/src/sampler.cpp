#include "spde/sampler.hpp"

#include <cmath>
#include <stdexcept>
#include <unordered_map>

#include "spde/rng.hpp"
#include "spde/util.hpp"
#include "spde/variance.hpp"

namespace spde {

namespace {

long count_grid_points(double upper, double eps) {
  long k = static_cast<long>(std::ceil(upper / eps));
  while (k * eps < upper) ++k;
  while ((k - 1) * eps >= upper) --k;
  return k;  // number of k >= 0 with k*eps < upper
}

// memoizing evaluator for Gamma(tau) = value_tau(tau, 0); grids hit the same
// tau many times since entries depend on the freeze points only through sums
class TauCache {
 public:
  TauCache(const SpectralMeasure& m, double t) : kern_(m, t) {}
  double operator()(double tau) {
    auto it = cache_.find(tau);
    if (it != cache_.end()) return it->second;
    const double v = kern_.value_tau(tau, 0);
    cache_.emplace(tau, v);
    return v;
  }
  double t() const { return kern_.terminal_time(); }

 private:
  GammaKernel kern_;
  std::unordered_map<double, double> cache_;
};

}  // namespace

WZGrid WZGrid::margin_truncated(double t, double eps, std::vector<double> x) {
  if (!(t > 0.0 && eps > 0.0)) throw std::invalid_argument("WZGrid: t, eps > 0");
  WZGrid g;
  g.t = t;
  g.eps = eps;
  g.x = std::move(x);
  g.t_eps = t - std::cbrt(eps);
  if (!(g.t_eps > 0.0))
    throw std::invalid_argument("WZGrid: eps^(1/3) must stay below t");
  g.k_max = count_grid_points(g.t_eps, eps);
  g.rule = FreezeRule::LeftEndpoint;
  g.corner_margin = true;
  return g;
}

WZGrid WZGrid::full_cover(double t, double eps, std::vector<double> x, FreezeRule rule) {
  if (!(t > 0.0 && eps > 0.0)) throw std::invalid_argument("WZGrid: t, eps > 0");
  if (!(eps < t)) throw std::invalid_argument("WZGrid: eps < t required");
  WZGrid g;
  g.t = t;
  g.eps = eps;
  g.x = std::move(x);
  g.t_eps = t;
  g.k_max = count_grid_points(t, eps);
  g.rule = rule;
  g.corner_margin = false;
  return g;
}

NoiseGram build_gram(const TimeCovariance& cov, const SpectralMeasure& m,
                     const WZGrid& grid) {
  if (grid.k_max < 1) throw std::invalid_argument("build_gram: empty grid");
  TauCache gamma(m, grid.t);

  NoiseGram out;
  out.grid = grid;
  const long n = grid.k_max;
  out.g.resize(n, n);
  for (long k = 0; k < n; ++k) {
    for (long l = 0; l <= k; ++l) {
      const double rect = cov.rect(grid.left(k), grid.left(k) + grid.eps,
                                   grid.left(l), grid.left(l) + grid.eps);
      const double v = rect == 0.0
                           ? 0.0
                           : rect * gamma(2.0 * grid.t - grid.freeze(k) - grid.freeze(l));
      out.g(k, l) = v;
      out.g(l, k) = v;  // computed once per unordered pair
    }
  }
  for (long k = 0; k < n; ++k)
    if (!(out.g(k, k) > 0.0))
      throw std::runtime_error("build_gram: nonpositive diagonal entry");
  return out;
}

double discrete_second_moment(const NoiseGram& g) {
  KahanSum s;
  for (long k = 0; k < g.g.rows(); ++k)
    for (long l = 0; l < g.g.cols(); ++l) s.add(g.g(k, l));
  return s.value();
}

double cross_second_moment(const TimeCovariance& cov, const SpectralMeasure& m,
                           const WZGrid& a, const WZGrid& b) {
  if (a.t != b.t) throw std::invalid_argument("cross_second_moment: horizons differ");
  TauCache gamma(m, a.t);
  KahanSum s;
  for (long k = 0; k < a.k_max; ++k) {
    for (long l = 0; l < b.k_max; ++l) {
      const double rect = cov.rect(a.left(k), a.left(k) + a.eps,
                                   b.left(l), b.left(l) + b.eps);
      if (rect == 0.0) continue;
      s.add(rect * gamma(2.0 * a.t - a.freeze(k) - b.freeze(l)));
    }
  }
  return s.value();
}

std::vector<double> sample_wz(const NoiseGram& g, std::uint64_t seed, int n_rep,
                              int threads, double* clip_mass) {
  const long n = g.g.rows();
  Eigen::MatrixXd L;
  double clipped = 0.0;

  Eigen::LLT<Eigen::MatrixXd> llt(g.g);
  if (llt.info() == Eigen::Success) {
    L = llt.matrixL();
  } else {
    const double shift = 1e-12 * g.g.trace();
    Eigen::MatrixXd shifted = g.g;
    shifted.diagonal().array() += shift;
    Eigen::LLT<Eigen::MatrixXd> llt2(shifted);
    if (llt2.info() == Eigen::Success) {
      L = llt2.matrixL();
    } else {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g.g);
      if (es.info() != Eigen::Success)
        throw std::runtime_error("sample_wz: eigendecomposition failed");
      Eigen::VectorXd ev = es.eigenvalues();
      const double floor = -1e-8 * g.g.trace();
      for (long i = 0; i < n; ++i) {
        if (ev(i) < floor)
          throw std::runtime_error("sample_wz: Gram indefinite beyond floor");
        if (ev(i) < 0.0) {
          clipped += -ev(i);
          ev(i) = 0.0;
        }
      }
      L = es.eigenvectors() * ev.cwiseSqrt().asDiagonal();
    }
  }

  // u = sum_k (L z)_k = (1^T L) z
  Eigen::VectorXd w = L.colwise().sum();

  std::vector<double> draws(static_cast<size_t>(n_rep), 0.0);
  if (threads <= 0) threads = default_threads();
  parallel_for(n_rep, threads, [&](long r) {
    CounterRng rng(seed, static_cast<std::uint64_t>(r));
    double acc = 0.0;
    for (long j = 0; j < n; ++j)
      acc += w(j) * rng.gaussian(static_cast<std::uint64_t>(j));
    draws[static_cast<size_t>(r)] = acc;
  });
  if (clip_mass) *clip_mass = clipped;
  return draws;
}

ConvergenceReport convergence_study(const TimeCovariance& cov, const SpectralMeasure& m,
                                    double t, const std::vector<double>& x,
                                    const std::vector<double>& eps_list,
                                    FreezeRule rule) {
  if (eps_list.size() < 2)
    throw std::invalid_argument("convergence_study: need at least two eps values");
  for (size_t i = 1; i < eps_list.size(); ++i)
    if (!(eps_list[i] < eps_list[i - 1]))
      throw std::invalid_argument("convergence_study: eps_list must decrease");

  ConvergenceReport rep;
  const double a_tail = 2.0 * cov.beta() - m.dim() - m.tail_exponent();
  const bool exists = a_tail > 0.0;

  std::vector<WZGrid> grids;
  grids.reserve(eps_list.size());
  for (double e : eps_list) grids.push_back(WZGrid::full_cover(t, e, x, rule));

  for (size_t i = 0; i < grids.size(); ++i) {
    ConvergenceRow row;
    row.eps = eps_list[i];
    row.second_moment = discrete_second_moment(build_gram(cov, m, grids[i]));
    rep.rows.push_back(row);
  }
  for (size_t i = 0; i + 1 < grids.size(); ++i) {
    const double cross = cross_second_moment(cov, m, grids[i], grids[i + 1]);
    rep.rows[i].cross_next = cross;
    rep.rows[i].cauchy_next =
        rep.rows[i].second_moment + rep.rows[i + 1].second_moment - 2.0 * cross;
  }

  rep.cauchy_decreasing = true;
  for (size_t i = 0; i + 2 < rep.rows.size(); ++i)
    if (!(rep.rows[i + 1].cauchy_next < rep.rows[i].cauchy_next))
      rep.cauchy_decreasing = false;

  // not settling: monotone growth with increments that do not shrink
  bool growing = true, settling = false;
  for (size_t i = 0; i + 1 < rep.rows.size(); ++i)
    if (!(rep.rows[i + 1].second_moment > rep.rows[i].second_moment)) growing = false;
  if (growing && rep.rows.size() >= 3) {
    // convergent schemes shrink their increments as eps halves; a divergent
    // second moment grows with non-decreasing increments
    const double d_first = rep.rows[1].second_moment - rep.rows[0].second_moment;
    const double d_last = rep.rows[rep.rows.size() - 1].second_moment -
                          rep.rows[rep.rows.size() - 2].second_moment;
    settling = d_last <= 0.9 * d_first;
  } else {
    settling = true;
  }
  rep.divergent = !exists || (growing && !settling);

  if (exists && !rep.divergent) {
    VarianceBreakdown vb = variance_exact(cov, m, t);
    if (!vb.divergent) {
      rep.target = vb.total;
      rep.target_valid = true;
      rep.limit_gap_rel =
          std::abs(rep.rows.back().second_moment - vb.total) / std::abs(vb.total);
    }
  }

  bool approaching = true;
  if (rep.target_valid) {
    for (size_t i = 0; i + 1 < rep.rows.size(); ++i) {
      const double g0 = std::abs(rep.rows[i].second_moment - rep.target);
      const double g1 = std::abs(rep.rows[i + 1].second_moment - rep.target);
      if (!(g1 <= g0 * (1.0 + 1e-9))) approaching = false;
    }
  }

  if (rep.divergent)
    rep.verdict = "DIVERGENT";
  else if (rep.cauchy_decreasing && approaching)
    rep.verdict = "PASS";
  else
    rep.verdict = "FAIL";
  return rep;
}

}  // namespace spde
