#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "spde/gamma.hpp"
#include "spde/quadrature.hpp"
#include "spde/rng.hpp"
#include "spde/util.hpp"

using namespace spde;

namespace {
SpectralMeasure lebesgue_1d() {
  return SpectralMeasure::custom(
      1, [](std::span<const double>) { return 1.0; }, true, 0.0, 0.0);
}
}  // namespace

TEST_CASE("closed-form values at s=s'=0, t=1") {
  GammaKernel leb(lebesgue_1d(), 1.0);
  CHECK(leb(0.0, 0.0) == doctest::Approx(std::sqrt(kPi)).epsilon(1e-10));
  CHECK(leb.partial(0.0, 0.0, GammaOrder::Ds) ==
        doctest::Approx(std::sqrt(kPi) / 4.0).epsilon(1e-10));
  CHECK(leb.partial(0.0, 0.0, GammaOrder::DsDsp) ==
        doctest::Approx(3.0 * std::sqrt(kPi) / 16.0).epsilon(1e-10));

  GammaKernel white(SpectralMeasure::white(1), 1.0);
  CHECK(white(0.0, 0.0) == doctest::Approx(std::sqrt(kPi) / kTwoPi).epsilon(1e-10));

  // Riesz closed form: omega_d * Gamma(eta/2)/2 * (2/tau)^{eta/2}
  GammaKernel riesz(SpectralMeasure::riesz(2, 1.3), 1.0);
  const double tau = 1.7;
  const double expect =
      kTwoPi * 0.5 * std::tgamma(0.65) * std::pow(2.0 / tau, 0.65);
  CHECK(riesz.value_tau(tau, 0) == doctest::Approx(expect).epsilon(1e-10));
}

TEST_CASE("fractional product reduction matches the per-axis product formula") {
  GammaKernel fp(SpectralMeasure::fractional_product({0.6, 0.75}), 1.0);
  for (double tau : {0.4, 1.0, 2.3}) {
    double prod = 1.0;
    for (double h : {0.6, 0.75})
      prod *= std::pow(2.0 / tau, 1.0 - h) * std::tgamma(1.0 - h);
    CHECK(fp.value_tau(tau, 0) == doctest::Approx(prod).epsilon(1e-12));
  }
}

TEST_CASE("symmetry in (s, s')") {
  GammaKernel kern(SpectralMeasure::bessel(1, 1.5), 1.0);
  CounterRng rng(5, 0);
  std::uint64_t c = 0;
  for (int i = 0; i < 30; ++i) {
    const double s = 0.95 * rng.uniform(c++);
    const double sp = 0.95 * rng.uniform(c++);
    CHECK(std::abs(kern(s, sp) - kern(sp, s)) <= 1e-10 * (1.0 + kern(s, sp)));
  }
}

TEST_CASE("monotone nondecreasing in each argument") {
  for (const auto& m : {SpectralMeasure::white(1), SpectralMeasure::bessel(1, 1.5)}) {
    GammaKernel kern(m, 1.0);
    for (int order = 0; order <= 3; ++order) {
      double prev = 0.0;
      for (double s : {0.0, 0.2, 0.4, 0.6, 0.8}) {
        const double v = kern.value_tau(2.0 - s - 0.1, order);
        CHECK(v >= prev);
        prev = v;
      }
    }
  }
}

TEST_CASE("finite differences reproduce the derivative integrands") {
  GammaKernel kern(SpectralMeasure::bessel(1, 2.0), 1.0);
  CounterRng rng(6, 0);
  std::uint64_t c = 0;
  for (int i = 0; i < 5; ++i) {
    const double s = 0.6 * rng.uniform(c++);
    const double sp = 0.6 * rng.uniform(c++);
    {
      const double h = 1e-4;
      const double fd = (kern(s + h, sp) - kern(s - h, sp)) / (2 * h);
      const double v = kern.partial(s, sp, GammaOrder::Ds);
      CHECK(std::abs(v - fd) <= 1e-5 * (1.0 + std::abs(v)));
    }
    {
      const double h = 1e-4;
      const double fd = (kern(s + h, sp + h) - kern(s + h, sp - h) -
                         kern(s - h, sp + h) + kern(s - h, sp - h)) /
                        (4 * h * h);
      const double v = kern.partial(s, sp, GammaOrder::DsDsp);
      CHECK(std::abs(v - fd) <= 1e-5 * (1.0 + std::abs(v)));
    }
    {
      const double h = 5e-4;
      const double fd = (kern(s + h, sp + h) - 2 * kern(s, sp + h) + kern(s - h, sp + h) -
                         kern(s + h, sp - h) + 2 * kern(s, sp - h) - kern(s - h, sp - h)) /
                        (2 * h * h * h);
      const double v = kern.partial(s, sp, GammaOrder::D2sDsp);
      CHECK(std::abs(v - fd) <= 1e-5 * (1.0 + std::abs(v)));
    }
  }
}

TEST_CASE("equal mixed first derivatives") {
  GammaKernel kern(SpectralMeasure::white(1), 1.0);
  for (double s : {0.1, 0.5})
    for (double sp : {0.2, 0.7}) {
      const double a = kern.partial(s, sp, GammaOrder::Ds);
      const double b = kern.partial(sp, s, GammaOrder::Ds);
      CHECK(std::abs(a - b) <= 1e-8 * (1.0 + std::abs(a)));
    }
}

TEST_CASE("corner handling") {
  // infinite-mass measure blows up at the corner
  GammaKernel white(SpectralMeasure::white(1), 1.0);
  CHECK(std::isinf(white(1.0, 1.0)));
  // finite total mass stays finite
  GammaKernel heavy(SpectralMeasure::bessel(1, 3.0), 1.0);
  CHECK(std::isfinite(heavy(1.0, 1.0)));

  CHECK_THROWS_AS(white.partial(1.0, 0.5, GammaOrder::Ds), std::domain_error);
  CHECK_THROWS_AS(white.value_tau(-0.1, 0), std::domain_error);
}

TEST_CASE("non-radial custom density falls back to tensor quadrature") {
  // anisotropic gaussian-ish density; compare against the radial path on an
  // equivalent radial density
  auto aniso = SpectralMeasure::custom(
      2,
      [](std::span<const double> xi) {
        return std::exp(-0.1 * (xi[0] * xi[0] + xi[1] * xi[1]));
      },
      false, 0.0, 0.0);
  auto iso = SpectralMeasure::custom(
      2, [](std::span<const double> xi) { return std::exp(-0.1 * xi[0] * xi[0]); }, true,
      0.0, 0.0);
  GammaKernel ga(aniso, 1.0), gi(iso, 1.0);
  const double va = ga.value_tau(1.0, 0);
  const double vi = gi.value_tau(1.0, 0);
  CHECK(std::abs(va - vi) <= 1e-6 * vi);
}
