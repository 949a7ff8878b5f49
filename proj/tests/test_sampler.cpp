#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "spde/gamma.hpp"
#include "spde/sampler.hpp"
#include "spde/util.hpp"

using namespace spde;

TEST_CASE("margin-truncated grid invariants") {
  WZGrid g = WZGrid::margin_truncated(1.0, std::ldexp(1.0, -6));
  CHECK(g.t_eps < g.t);
  CHECK(g.t_eps == doctest::Approx(1.0 - std::cbrt(1.0 / 64)).epsilon(1e-15));
  CHECK(g.k_max == 48);  // number of k with k/64 < 0.75
  CHECK(g.rule == FreezeRule::LeftEndpoint);
  CHECK_THROWS_AS(WZGrid::margin_truncated(0.05, 0.01), std::invalid_argument);  // eps^(1/3) > t
}

TEST_CASE("brownian gram is diagonal with left-endpoint kernel values") {
  const auto cov = TimeCovariance::brownian();
  const auto m = SpectralMeasure::white(1);
  WZGrid g = WZGrid::margin_truncated(1.0, 1.0 / 16);
  NoiseGram gram = build_gram(cov, m, g);
  GammaKernel kern(m, 1.0);
  for (long k = 0; k < g.k_max; ++k) {
    for (long l = 0; l < g.k_max; ++l) {
      if (k == l) {
        CHECK(gram.g(k, k) ==
              doctest::Approx(g.eps * kern(g.left(k), g.left(k))).epsilon(1e-12));
      } else {
        CHECK(gram.g(k, l) == 0.0);
      }
    }
  }
}

TEST_CASE("product time covariance gives rect = eps^2 entries") {
  const auto cov = TimeCovariance::product();
  const auto m = SpectralMeasure::white(1);
  WZGrid g = WZGrid::full_cover(0.5, 1.0 / 8, {}, FreezeRule::LeftEndpoint);
  NoiseGram gram = build_gram(cov, m, g);
  GammaKernel kern(m, 0.5);
  for (long k = 0; k < g.k_max; ++k)
    for (long l = 0; l < g.k_max; ++l)
      CHECK(gram.g(k, l) ==
            doctest::Approx(g.eps * g.eps * kern(g.left(k), g.left(l))).epsilon(1e-12));
}

TEST_CASE("gram symmetry is bit-exact and x plays no role") {
  const auto cov = TimeCovariance::fractional_brownian(0.7);
  const auto m = SpectralMeasure::bessel(1, 1.5);
  WZGrid a = WZGrid::full_cover(1.0, 1.0 / 32, {0.3});
  WZGrid b = WZGrid::full_cover(1.0, 1.0 / 32, {-2.0});
  NoiseGram ga = build_gram(cov, m, a);
  NoiseGram gb = build_gram(cov, m, b);
  for (long k = 0; k < a.k_max; ++k)
    for (long l = 0; l < a.k_max; ++l) {
      CHECK(ga.g(k, l) == ga.g(l, k));
      CHECK(ga.g(k, l) == gb.g(k, l));
    }
}

TEST_CASE("second moment converges to the isometry value") {
  const auto cov = TimeCovariance::brownian();
  const auto m = SpectralMeasure::white(1);
  const double target = std::sqrt(1.0 / kPi);
  double prev_gap = std::numeric_limits<double>::infinity();
  for (int n = 6; n <= 8; ++n) {
    WZGrid g = WZGrid::full_cover(1.0, std::ldexp(1.0, -n), {}, FreezeRule::Midpoint);
    const double v = discrete_second_moment(build_gram(cov, m, g));
    const double gap = std::abs(v - target);
    CHECK(gap < prev_gap);
    prev_gap = gap;
    if (n == 6) CHECK(gap / target <= 0.05);
  }
}

TEST_CASE("vanishing noise gives vanishing second moment") {
  WZGrid g = WZGrid::full_cover(1.0, 1.0 / 16);
  const double v = discrete_second_moment(
      build_gram(TimeCovariance::brownian(), SpectralMeasure::white(1, 1e-30), g));
  CHECK(std::abs(v) <= 1e-28);
}

TEST_CASE("sampling moments and determinism") {
  const auto cov = TimeCovariance::brownian();
  const auto m = SpectralMeasure::white(1);
  WZGrid g = WZGrid::full_cover(1.0, 1.0 / 64, {}, FreezeRule::Midpoint);
  NoiseGram gram = build_gram(cov, m, g);
  const double sigma2 = discrete_second_moment(gram);
  const int n = 10000;

  std::vector<double> draws = sample_wz(gram, 42, n);
  double mean = 0.0;
  for (double d : draws) mean += d;
  mean /= n;
  CHECK(std::abs(mean) <= 3.0 * std::sqrt(sigma2 / n));

  double var = 0.0;
  for (double d : draws) var += (d - mean) * (d - mean);
  var /= (n - 1);
  CHECK(std::abs(var - sigma2) <= 3.0 * sigma2 * std::sqrt(2.0 / (n - 1)));

  std::vector<double> again = sample_wz(gram, 42, n);
  CHECK(draws == again);
  std::vector<double> t1 = sample_wz(gram, 42, 100, 1);
  std::vector<double> t4 = sample_wz(gram, 42, 100, 4);
  CHECK(t1 == t4);
}

TEST_CASE("gram PSD and MC agreement across the preset matrix") {
  const std::vector<TimeCovariance> covs = {TimeCovariance::brownian(),
                                            TimeCovariance::fractional_brownian(0.3),
                                            TimeCovariance::fractional_brownian(0.7),
                                            TimeCovariance::product()};
  const std::vector<SpectralMeasure> measures = {SpectralMeasure::white(1),
                                                 SpectralMeasure::bessel(1, 1.5),
                                                 SpectralMeasure::fractional_product({0.6})};
  const int n_rep = 10000;
  for (const auto& cov : covs) {
    for (const auto& m : measures) {
      WZGrid g = WZGrid::full_cover(1.0, 1.0 / 32, {}, FreezeRule::Midpoint);
      NoiseGram gram = build_gram(cov, m, g);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram.g);
      CHECK(es.eigenvalues().minCoeff() >= -1e-8 * gram.g.trace());

      const double sigma2 = discrete_second_moment(gram);
      std::vector<double> draws = sample_wz(gram, 42, n_rep);
      double mean = 0.0;
      for (double d : draws) mean += d;
      mean /= n_rep;
      double var = 0.0;
      for (double d : draws) var += (d - mean) * (d - mean);
      var /= (n_rep - 1);
      INFO(cov.spec_string(), " / ", m.spec_string());
      CHECK(std::abs(var - sigma2) <= 3.0 * sigma2 * std::sqrt(2.0 / (n_rep - 1)));
    }
  }
}

TEST_CASE("near-singular product gram still factorizes") {
  const auto cov = TimeCovariance::product();
  const auto m = SpectralMeasure::white(1);
  WZGrid g = WZGrid::full_cover(1.0, 1.0 / 32);
  NoiseGram gram = build_gram(cov, m, g);
  double clip = -1.0;
  std::vector<double> draws = sample_wz(gram, 7, 500, 0, &clip);
  CHECK(draws.size() == 500);
  for (double d : draws) CHECK(std::isfinite(d));
  CHECK(clip >= 0.0);                       // recorded (0 when a shift sufficed)
  CHECK(clip <= 1e-8 * gram.g.trace());     // never clips real mass
}

TEST_CASE("convergence study: cauchy quantities and verdicts") {
  const auto cov = TimeCovariance::brownian();
  const auto m = SpectralMeasure::white(1);
  std::vector<double> eps_list;
  for (int n = 4; n <= 7; ++n) eps_list.push_back(std::ldexp(1.0, -n));
  ConvergenceReport rep = convergence_study(cov, m, 1.0, {}, eps_list);
  CHECK(rep.verdict == "PASS");
  CHECK(rep.cauchy_decreasing);
  CHECK(rep.target_valid);
  for (size_t i = 0; i + 1 < rep.rows.size(); ++i)
    CHECK(rep.rows[i].cauchy_next >= -1e-8);

  ConvergenceReport div = convergence_study(cov, SpectralMeasure::riesz(2, 2.5), 1.0,
                                            {}, eps_list);
  CHECK(div.verdict == "DIVERGENT");

  // internal-consistency case with no closed form
  ConvergenceReport fr = convergence_study(TimeCovariance::fractional_brownian(0.7),
                                           SpectralMeasure::riesz(2, 1.0), 1.0, {},
                                           eps_list);
  CHECK(fr.cauchy_decreasing);
  CHECK_FALSE(fr.divergent);
}
