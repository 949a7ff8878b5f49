#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "spde/besov.hpp"
#include "spde/rng.hpp"
#include "spde/util.hpp"

using namespace spde;

namespace {

GridField random_field(const GridGeom& g, std::uint64_t seed) {
  GridField f = GridField::zero(g);
  CounterRng rng(seed, 0);
  for (long i = 0; i < g.size(); ++i) f[i] = rng.gaussian(static_cast<std::uint64_t>(i));
  return f;
}

}  // namespace

TEST_CASE("partition of unity and support structure") {
  for (const GridGeom& g : {GridGeom(1, 256, 8.0), GridGeom(2, 64, 8.0)}) {
    FreqPartition p = build_partition(g);
    double worst = 0.0, worst_prod = 0.0;
    for (long i = 0; i < g.size(); ++i) {
      double s = p.multiplier(-1)[static_cast<size_t>(i)];
      for (int j = 0; j <= p.j_max(); ++j) s += p.multiplier(j)[static_cast<size_t>(i)];
      worst = std::max(worst, std::abs(s - 1.0));
      worst_prod = std::max(worst_prod, p.multiplier(1)[static_cast<size_t>(i)] *
                                            p.multiplier(3)[static_cast<size_t>(i)]);
      worst_prod = std::max(worst_prod, p.multiplier(-1)[static_cast<size_t>(i)] *
                                            p.multiplier(2)[static_cast<size_t>(i)]);
    }
    CHECK(worst <= 1e-10);
    CHECK(worst_prod == 0.0);
  }
  CHECK_THROWS_AS(build_partition(GridGeom(1, 2, 100.0)), std::invalid_argument);
}

TEST_CASE("single-mode block localization") {
  const GridGeom g(1, 256, 8.0);
  FreqPartition p = build_partition(g);
  const int mode = 16;  // |xi| = 16 * 2pi/8 = 4pi
  const double xi0 = mode * g.dxi();
  GridField f = GridField::zero(g);
  for (long i = 0; i < g.size(); ++i)
    f[i] = std::cos(xi0 * g.coord_component(static_cast<int>(i)));

  int nonzero = 0;
  for (int j = -1; j <= p.j_max(); ++j) {
    GridField bl = dyadic_block(f, p, j);
    double amp = 0.0;
    for (long i = 0; i < g.size(); ++i) amp = std::max(amp, std::abs(bl[i]));
    const double expect = FreqPartition::phi_of_r(std::ldexp(xi0, -j));
    if (j == -1) {
      CHECK(amp <= 1e-12);  // xi0 far above the chi ball
    } else {
      CHECK(amp == doctest::Approx(expect).epsilon(1e-10));
    }
    if (amp > 1e-12) ++nonzero;
  }
  CHECK(nonzero <= 2);

  // blocks two apart annihilate
  GridField b1 = dyadic_block(f, p, 2);
  GridField b13 = dyadic_block(b1, p, 4);
  for (long i = 0; i < g.size(); ++i) CHECK(std::abs(b13[i]) <= 1e-14);

  // out-of-range block index gives the zero field
  GridField far = dyadic_block(f, p, p.j_max() + 3);
  for (long i = 0; i < g.size(); ++i) CHECK(far[i] == 0.0);
}

TEST_CASE("reconstruction and Parseval") {
  const GridGeom g(1, 512, 8.0);
  FreqPartition p = build_partition(g);
  GridField f = random_field(g, 99);

  GridField sum = GridField::zero(g);
  for (int j = -1; j <= p.j_max(); ++j) sum += dyadic_block(f, p, j);
  GridField diff = sum;
  diff -= f;
  CHECK(diff.l2_norm() / f.l2_norm() <= 1e-10);

  auto spec = f.spectrum();
  double phys = 0.0, freq = 0.0;
  for (long i = 0; i < g.size(); ++i) phys += f[i] * f[i];
  for (auto& z : spec) freq += std::norm(z);
  freq /= static_cast<double>(g.size());
  CHECK(std::abs(phys - freq) / phys <= 1e-12);
}

TEST_CASE("besov norm basics") {
  const GridGeom g(1, 256, 8.0);
  FreqPartition p = build_partition(g);
  BesovParams bp;
  bp.kappa = 0.3;
  bp.q = 1;

  CHECK(besov_norm(GridField::zero(g), p, bp) == 0.0);

  GridField f = random_field(g, 5);
  const double n1 = besov_norm(f, p, bp);
  GridField f3 = f;
  f3 *= -3.0;
  CHECK(std::abs(besov_norm(f3, p, bp) - 3.0 * n1) <= 1e-12 * n1);

  // monotone in kappa once the chi block is removed
  GridField hf = f;
  hf -= dyadic_block(f, p, -1);
  BesovParams lo = bp, hi = bp;
  lo.kappa = 0.1;
  hi.kappa = 0.5;
  CHECK(besov_norm(hf, p, lo) <= besov_norm(hf, p, hi) * 1.000001);

  // q = 2 path keeps homogeneity
  BesovParams q2 = bp;
  q2.q = 2;
  const double m1 = besov_norm(f, p, q2);
  CHECK(std::abs(besov_norm(f3, p, q2) - 3.0 * m1) <= 1e-12 * m1);
  CHECK_THROWS_AS(([&] {
                    BesovParams bad = bp;
                    bad.sigma = 0.5;  // must exceed the dimension
                    besov_norm(f, p, bad);
                  }()),
                  std::invalid_argument);
}

TEST_CASE("heat multiplier semantics") {
  const GridGeom g(1, 256, 8.0);
  GridField f = random_field(g, 17);

  GridField same = heat_apply(f, 0.0);
  for (long i = 0; i < g.size(); ++i) CHECK(same[i] == f[i]);

  // single mode |xi0| = 2 decays by exp(-2 tau)
  GridField mode = GridField::zero(g);
  const double dxi = g.dxi();
  const int k0 = static_cast<int>(std::lround(2.0 / dxi));
  const double xi0 = k0 * dxi;
  for (long i = 0; i < g.size(); ++i)
    mode[i] = std::cos(xi0 * g.coord_component(static_cast<int>(i)));
  const double tau = 0.37;
  GridField heated = heat_apply(mode, tau);
  const double expect = std::exp(-0.5 * tau * xi0 * xi0);
  for (long i = 0; i < 8; ++i)
    CHECK(heated[i] == doctest::Approx(expect * mode[i]).epsilon(1e-10));

  GridField two_steps = heat_apply(heat_apply(f, 0.1), 0.1);
  GridField one_step = heat_apply(f, 0.2);
  double worst = 0.0;
  for (long i = 0; i < g.size(); ++i)
    worst = std::max(worst, std::abs(two_steps[i] - one_step[i]));
  CHECK(worst <= 1e-12);

  // contraction off the zero frequency
  FreqPartition p = build_partition(g);
  BesovParams bp;
  bp.kappa = 0.2;
  GridField hf = f;
  hf -= dyadic_block(f, p, -1);
  CHECK(besov_norm(heat_apply(hf, 0.3), p, bp) <= besov_norm(hf, p, bp));

  CHECK_THROWS_AS(heat_apply(f, -0.1), std::domain_error);
}

TEST_CASE("noise field variance matches the spectral mass") {
  const GridGeom g(1, 256, 8.0);
  const auto cov = TimeCovariance::fractional_brownian(0.7);
  const auto m = SpectralMeasure::white(1);
  const double s = 0.2, t = 0.7;
  const double rect = cov.rect(s, t, s, t);

  // direct covariance target: rect * sum over grid cells of the density
  double mass = 0.0;
  for (int i = 0; i < g.n; ++i) mass += (1.0 / kTwoPi) * g.dxi();
  const double target = rect * mass;

  const int reps = 500;
  double acc = 0.0;
  for (int r = 0; r < reps; ++r) {
    GridField f = sample_noise_field(cov, m, s, t, g, 1000 + r);
    for (long i = 0; i < g.size(); ++i) acc += f[i] * f[i];
  }
  const double emp = acc / (reps * g.size());
  CHECK(std::abs(emp - target) / target <= 0.05);

  GridField a = sample_noise_field(cov, m, s, t, g, 42);
  GridField b = sample_noise_field(cov, m, s, t, g, 42);
  for (long i = 0; i < g.size(); ++i) CHECK(a[i] == b[i]);

  CHECK_THROWS_AS(sample_noise_field(cov, m, 0.7, 0.2, g, 1), std::invalid_argument);
}

TEST_CASE("besov norm of noise scales with the increment variance") {
  const GridGeom g(1, 256, 8.0);
  FreqPartition p = build_partition(g);
  const auto cov = TimeCovariance::fractional_brownian(0.6);
  const auto m = SpectralMeasure::white(1);
  BesovParams bp;
  bp.kappa = -0.65;  // just below -beta for white noise in d=1
  bp.q = 1;

  // ratio E||dW_st||^2 / rect is the same across (s,t) pairs
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  int pair = 0;
  for (auto [s, t] : std::vector<std::pair<double, double>>{
           {0.1, 0.35}, {0.4, 0.52}, {0.2, 0.9}, {0.6, 0.66}}) {
    double acc = 0.0;
    for (int r = 0; r < 100; ++r) {
      GridField f = sample_noise_field(cov, m, s, t, g,
                                       mix64(900 + static_cast<std::uint64_t>(pair)) + r);
      const double n = besov_norm(f, p, bp);
      acc += n * n;
    }
    const double ratio = acc / 100.0 / cov.rect(s, t, s, t);
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
    ++pair;
  }
  CHECK(hi / lo <= 1.3);
}

TEST_CASE("noise besov scaling recovers 2 H0") {
  const GridGeom g(1, 256, 8.0);
  BesovParams bp;
  bp.kappa = -0.6;
  bp.q = 1;
  std::vector<double> gaps;
  for (int k = 2; k <= 5; ++k) gaps.push_back(std::ldexp(1.0, -k));
  NoiseScalingReport rep = noise_besov_scaling(TimeCovariance::fractional_brownian(0.6),
                                               SpectralMeasure::white(1), g, bp, gaps,
                                               100, 3, 0);
  CHECK(std::abs(rep.slope - 1.2) <= 0.1);
}

TEST_CASE("dyadic noise refinement consistency") {
  const GridGeom g(1, 128, 8.0);
  DyadicNoise noise(TimeCovariance::fractional_brownian(0.8), SpectralMeasure::white(1),
                    5, 1.0, g, 77);
  for (int n = 2; n < 5; ++n) {
    for (long k = 0; k < (1L << n); ++k) {
      Eigen::RowVectorXcd coarse = noise.increment_spectrum(n, k);
      Eigen::RowVectorXcd fine = noise.increment_spectrum(n + 1, 2 * k) +
                                 noise.increment_spectrum(n + 1, 2 * k + 1);
      CHECK((coarse - fine).cwiseAbs().maxCoeff() <=
            1e-12 * (1.0 + coarse.cwiseAbs().maxCoeff()));
    }
  }
}

TEST_CASE("dyadic solution: single-term case and vanishing noise") {
  const GridGeom g(1, 128, 8.0);
  const auto cov = TimeCovariance::brownian();
  const auto m = SpectralMeasure::white(1);

  DyadicNoise noise(cov, m, 8, 1.0, g, 123);
  GridField direct = noise.solution(0, 0.75);
  // level 0 has the single cell [0,1): u = p_0.75 dW_{0,1}
  Eigen::RowVectorXcd inc = noise.increment_spectrum(0, 0);
  std::vector<std::complex<double>> spec(static_cast<size_t>(inc.cols()));
  for (long i = 0; i < inc.cols(); ++i) spec[static_cast<size_t>(i)] = inc(i);
  fft_nd(spec, g, true, false);
  GridField w = GridField::zero(g);
  for (long i = 0; i < g.size(); ++i) w[i] = spec[static_cast<size_t>(i)].real();
  GridField expect = heat_apply(w, 0.75);
  GridField diff = direct;
  diff -= expect;
  CHECK(diff.l2_norm() <= 1e-10 * (1.0 + expect.l2_norm()));

  GridField tiny = dyadic_solution(cov, SpectralMeasure::white(1, 1e-30), 3, 0.75, g, 5);
  CHECK(tiny.l2_norm() <= 1e-12);
}

TEST_CASE("dyadic cauchy decay is geometric") {
  const GridGeom g(1, 256, 8.0);
  BesovParams bp;
  bp.kappa = 0.1;
  bp.q = 1;
  CauchyDecayReport rep =
      dyadic_cauchy_decay(TimeCovariance::fractional_brownian(0.8),
                          SpectralMeasure::white(1), 2, 5, 0.75, g, bp, 30, 11, 0);
  CHECK(rep.theta > 0.2);
  for (size_t i = 0; i + 1 < rep.mean_diff_norms.size(); ++i)
    CHECK(rep.mean_diff_norms[i + 1] < rep.mean_diff_norms[i]);
}

TEST_CASE("smoothing rates on smooth fields do not saturate") {
  const GridGeom g(1, 256, 8.0);
  FreqPartition p = build_partition(g);
  GridField mode = GridField::zero(g);
  const double xi0 = 2.0 * g.dxi();
  for (long i = 0; i < g.size(); ++i)
    mode[i] = std::cos(xi0 * g.coord_component(static_cast<int>(i)));
  std::vector<double> taus;
  for (int k = 4; k <= 9; ++k) taus.push_back(std::ldexp(1.0, -k));
  BesovParams bp;
  bp.q = 1;
  SmoothingReport rep = smoothing_rate_check(mode, p, -0.6, 0.4, taus, bp, 2.0);
  CHECK(std::abs(rep.slope_heat) <= 0.1);  // smooth input: norm stays bounded
  CHECK(rep.pass_idminus);

  CHECK_THROWS_AS(smoothing_rate_check(mode, p, -0.6, 0.4, {0.1, 0.2, 0.3}, bp, 2.0),
                  std::invalid_argument);
}

TEST_CASE("holder estimate: rough solution and smooth control") {
  const GridGeom g(1, 256, 8.0);
  BesovParams bp;
  bp.kappa = 0.1;
  bp.q = 1;
  std::vector<double> times;
  for (int k = 8; k <= 16; ++k) times.push_back(k * 0.0625);

  HolderReport rep = holder_estimate(TimeCovariance::fractional_brownian(0.8),
                                     SpectralMeasure::white(1), 6, times, g, bp, 0.6,
                                     21, 20, 0);
  CHECK(rep.expected == doctest::Approx(0.45));
  CHECK(rep.pass);

  HolderReport again = holder_estimate(TimeCovariance::fractional_brownian(0.8),
                                       SpectralMeasure::white(1), 7, times, g, bp, 0.6,
                                       21, 20, 0);
  CHECK(std::abs(again.fitted_exponent - rep.fitted_exponent) <= 0.05);

  // smooth deterministic forcing: u_t = sum_k 2^-n p_{t - t_k} F is Lipschitz
  FreqPartition p = build_partition(g);
  GridField F = GridField::zero(g);
  const double xi0 = g.dxi();
  for (long i = 0; i < g.size(); ++i)
    F[i] = std::cos(xi0 * g.coord_component(static_cast<int>(i)));
  const int n = 8;
  const double step = std::ldexp(1.0, -n);
  auto control = [&](double t) {
    GridField u = GridField::zero(g);
    for (long k = 0; k * step < t; ++k) {
      GridField piece = heat_apply(F, t - k * step);
      piece *= step;
      u += piece;
    }
    return u;
  };
  std::vector<double> lx, ly;
  for (double gap : {0.03125, 0.0625, 0.125}) {
    GridField d = control(0.5 + gap);
    d -= control(0.5);
    lx.push_back(std::log(gap));
    ly.push_back(std::log(besov_norm(d, p, bp)));
  }
  LinearFit fit = fit_line(lx, ly);
  CHECK(fit.slope >= 0.85);
}
