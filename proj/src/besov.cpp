#include "spde/besov.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "spde/rng.hpp"
#include "spde/util.hpp"

namespace spde {

namespace {

long conj_index(const GridGeom& g, long flat) {
  long out = 0;
  long rem = flat;
  long mult = 1;
  // decompose little-endian in the last axis; reassemble mirrored
  std::array<int, 3> idx{0, 0, 0};
  for (int a = g.dim - 1; a >= 0; --a) {
    idx[static_cast<size_t>(a)] = static_cast<int>(rem % g.n);
    rem /= g.n;
  }
  for (int a = 0; a < g.dim; ++a) {
    const int j = (g.n - idx[static_cast<size_t>(a)]) % g.n;
    out = out * g.n + j;
    (void)mult;
  }
  return out;
}

// Hermitian Gaussian spectrum with E|F_m|^2 = scale * density(xi_m) * (dxi)^d.
// Modes on singular cells (a zero coordinate where the density blows up) are
// weighted by the density at the half-cell offset.
std::vector<std::complex<double>> synth_spectrum(const SpectralMeasure& m,
                                                 const GridGeom& g, double scale,
                                                 const CounterRng& rng) {
  const long M = g.size();
  std::vector<std::complex<double>> F(static_cast<size_t>(M));
  const double cell = std::pow(g.dxi(), g.dim);
  std::vector<double> xi(static_cast<size_t>(g.dim));
  for (long i = 0; i < M; ++i) {
    const long c = conj_index(g, i);
    if (c < i) continue;
    for (int a = 0; a < g.dim; ++a)
      xi[static_cast<size_t>(a)] = g.freq_component(g.axis_index(i, a));
    double dens = m.density(xi);
    if (!std::isfinite(dens)) {
      auto shifted = xi;
      for (auto& v : shifted)
        if (v == 0.0) v = 0.5 * g.dxi();
      dens = m.density(shifted);
    }
    const double amp = std::sqrt(std::max(0.0, scale * dens * cell));
    if (c == i) {
      F[static_cast<size_t>(i)] = amp * rng.gaussian(static_cast<std::uint64_t>(2 * i));
    } else {
      const double a = rng.gaussian(static_cast<std::uint64_t>(2 * i));
      const double b = rng.gaussian(static_cast<std::uint64_t>(2 * i + 1));
      const double h = amp / std::sqrt(2.0);
      F[static_cast<size_t>(i)] = {h * a, h * b};
      F[static_cast<size_t>(c)] = {h * a, -h * b};
    }
  }
  return F;
}

GridField field_from_synthesis(const GridGeom& g, std::vector<std::complex<double>> spec) {
  fft_nd(spec, g, /*inverse=*/true, /*scale_inverse=*/false);
  std::vector<double> v(spec.size());
  for (size_t i = 0; i < spec.size(); ++i) v[i] = spec[i].real();
  return GridField(g, std::move(v));
}

Eigen::MatrixXd psd_cholesky(const Eigen::MatrixXd& g) {
  Eigen::LLT<Eigen::MatrixXd> llt(g);
  if (llt.info() == Eigen::Success) return llt.matrixL();
  Eigen::MatrixXd shifted = g;
  shifted.diagonal().array() += 1e-12 * g.trace();
  Eigen::LLT<Eigen::MatrixXd> llt2(shifted);
  if (llt2.info() == Eigen::Success) return llt2.matrixL();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g);
  if (es.info() != Eigen::Success)
    throw std::runtime_error("psd_cholesky: eigendecomposition failed");
  Eigen::VectorXd ev = es.eigenvalues();
  const double floor = -1e-8 * g.trace();
  for (long i = 0; i < ev.size(); ++i) {
    if (ev(i) < floor) throw std::runtime_error("psd_cholesky: matrix indefinite beyond floor");
    ev(i) = std::max(ev(i), 0.0);
  }
  return es.eigenvectors() * ev.cwiseSqrt().asDiagonal();
}

std::uint64_t combine_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) {
  return mix64(mix64(seed) ^ mix64((a << 20) ^ b ^ 0x6A09E667F3BCC909ULL));
}

}  // namespace

GridField::GridField(GridGeom geom, std::vector<double> values)
    : geom_(geom), v_(std::move(values)) {
  if (static_cast<long>(v_.size()) != geom_.size())
    throw std::invalid_argument("GridField: value count does not match grid");
}

GridField GridField::zero(const GridGeom& g) {
  return GridField(g, std::vector<double>(static_cast<size_t>(g.size()), 0.0));
}

std::vector<std::complex<double>> GridField::spectrum() const {
  std::vector<std::complex<double>> a(v_.begin(), v_.end());
  fft_nd(a, geom_, /*inverse=*/false);
  return a;
}

GridField GridField::from_spectrum(const GridGeom& g,
                                   std::vector<std::complex<double>> spec) {
  fft_nd(spec, g, /*inverse=*/true);
  std::vector<double> v(spec.size());
  for (size_t i = 0; i < spec.size(); ++i) v[i] = spec[i].real();
  return GridField(g, std::move(v));
}

GridField& GridField::operator+=(const GridField& o) {
  if (!(geom_ == o.geom_)) throw std::invalid_argument("GridField: grid mismatch");
  for (size_t i = 0; i < v_.size(); ++i) v_[i] += o.v_[i];
  return *this;
}

GridField& GridField::operator-=(const GridField& o) {
  if (!(geom_ == o.geom_)) throw std::invalid_argument("GridField: grid mismatch");
  for (size_t i = 0; i < v_.size(); ++i) v_[i] -= o.v_[i];
  return *this;
}

GridField& GridField::operator*=(double c) {
  for (auto& x : v_) x *= c;
  return *this;
}

double GridField::l2_norm() const {
  KahanSum s;
  for (double x : v_) s.add(x * x);
  return std::sqrt(s.value() * std::pow(geom_.dx(), geom_.dim));
}

double FreqPartition::chi_of_r(double r) {
  // exp(-1/x) glue on the shell [1, 4/3]
  const double x = (r - 1.0) * 3.0;
  if (x <= 0.0) return 1.0;
  if (x >= 1.0) return 0.0;
  const double a = std::exp(-1.0 / x);
  const double b = std::exp(-1.0 / (1.0 - x));
  return b / (a + b);
}

double FreqPartition::phi_of_r(double r) { return chi_of_r(0.5 * r) - chi_of_r(r); }

FreqPartition::FreqPartition(GridGeom geom, int j_max, std::vector<double> chi,
                             std::vector<std::vector<double>> phi)
    : geom_(geom), j_max_(j_max), chi_(std::move(chi)), phi_(std::move(phi)) {}

const std::vector<double>& FreqPartition::multiplier(int j) const {
  if (j == -1) return chi_;
  if (j < 0 || j > j_max_) throw std::out_of_range("FreqPartition: block index");
  return phi_[static_cast<size_t>(j)];
}

FreqPartition build_partition(const GridGeom& g) {
  const double xi_axis_max = kPi * g.n / g.box;
  if (xi_axis_max < 8.0 / 3.0)
    throw std::invalid_argument(
        "build_partition: grid cannot host the j=0 annulus (increase N or shrink L)");
  const double xi_max = xi_axis_max * std::sqrt(static_cast<double>(g.dim));
  int j_max = 0;
  while (std::ldexp(1.0, j_max + 1) < xi_max) ++j_max;

  const long M = g.size();
  std::vector<double> chi(static_cast<size_t>(M));
  std::vector<std::vector<double>> phi(static_cast<size_t>(j_max) + 1,
                                       std::vector<double>(static_cast<size_t>(M)));
  for (long i = 0; i < M; ++i) {
    const double r = std::sqrt(g.freq_norm2(i));
    chi[static_cast<size_t>(i)] = FreqPartition::chi_of_r(r);
    for (int j = 0; j <= j_max; ++j)
      phi[static_cast<size_t>(j)][static_cast<size_t>(i)] =
          FreqPartition::phi_of_r(std::ldexp(r, -j));
  }
  return FreqPartition(g, j_max, std::move(chi), std::move(phi));
}

GridField dyadic_block(const GridField& f, const FreqPartition& p, int j) {
  if (!(f.geom() == p.geom()))
    throw std::invalid_argument("dyadic_block: grid mismatch");
  if (j < -1 || j > p.j_max()) return GridField::zero(f.geom());
  auto spec = f.spectrum();
  const auto& mult = p.multiplier(j);
  for (size_t i = 0; i < spec.size(); ++i) spec[i] *= mult[i];
  return GridField::from_spectrum(f.geom(), std::move(spec));
}

namespace {

double weighted_l2q_pow(const GridField& f, int q, double sigma) {
  const GridGeom& g = f.geom();
  KahanSum s;
  const long M = g.size();
  for (long i = 0; i < M; ++i) {
    double x2 = 0.0;
    for (int a = 0; a < g.dim; ++a) {
      const double c = g.coord_component(g.axis_index(i, a));
      x2 += c * c;
    }
    const double w = std::pow(1.0 + std::sqrt(x2), -sigma);
    s.add(std::pow(f[i] * f[i], q) * w);
  }
  return s.value() * std::pow(g.dx(), g.dim);  // = ||f||_{L^{2q}_rho}^{2q}
}

}  // namespace

double besov_norm(const GridField& f, const FreqPartition& p, const BesovParams& bp) {
  if (!(f.geom() == p.geom()))
    throw std::invalid_argument("besov_norm: grid mismatch");
  if (bp.q < 1) throw std::invalid_argument("besov_norm: q >= 1");
  const double sigma = bp.effective_sigma(f.geom().dim);
  if (!(sigma > f.geom().dim))
    throw std::invalid_argument("besov_norm: sigma must exceed the dimension");

  auto spec = f.spectrum();
  KahanSum total;
  for (int j = -1; j <= p.j_max(); ++j) {
    const auto& mult = p.multiplier(j);
    auto block_spec = spec;
    for (size_t i = 0; i < block_spec.size(); ++i) block_spec[i] *= mult[i];
    GridField block = GridField::from_spectrum(f.geom(), std::move(block_spec));
    const double lq = weighted_l2q_pow(block, bp.q, sigma);
    total.add(std::pow(2.0, 2.0 * bp.q * j * bp.kappa) * lq);
  }
  return std::pow(total.value(), 1.0 / (2.0 * bp.q));
}

GridField heat_apply(const GridField& f, double tau) {
  if (tau < 0.0) throw std::domain_error("heat_apply: tau >= 0");
  if (tau == 0.0) return f;
  auto spec = f.spectrum();
  const GridGeom& g = f.geom();
  for (long i = 0; i < g.size(); ++i)
    spec[static_cast<size_t>(i)] *= std::exp(-0.5 * tau * g.freq_norm2(i));
  return GridField::from_spectrum(g, std::move(spec));
}

GridField sample_noise_field(const TimeCovariance& cov, const SpectralMeasure& m,
                             double s, double t, const GridGeom& g, std::uint64_t seed) {
  if (!(s < t)) throw std::invalid_argument("sample_noise_field: s < t");
  if (m.dim() != g.dim) throw std::invalid_argument("sample_noise_field: dim mismatch");
  double rect = cov.rect(s, t, s, t);
  if (rect < -1e-12)
    throw std::runtime_error("sample_noise_field: negative increment variance");
  rect = std::max(rect, 0.0);
  CounterRng rng(seed, 0);
  return field_from_synthesis(g, synth_spectrum(m, g, rect, rng));
}

DyadicNoise::DyadicNoise(const TimeCovariance& cov, const SpectralMeasure& m,
                         int gen_level, double horizon, const GridGeom& g,
                         std::uint64_t seed)
    : geom_(g), gen_level_(gen_level), horizon_(horizon) {
  if (gen_level < 0 || gen_level > 20)
    throw std::invalid_argument("DyadicNoise: gen_level in 0..20");
  if (m.dim() != g.dim) throw std::invalid_argument("DyadicNoise: dim mismatch");
  const double eps = std::ldexp(1.0, -gen_level);
  const double cells = horizon / eps;
  const long K = std::llround(cells);
  if (K < 1 || std::abs(cells - static_cast<double>(K)) > 1e-9)
    throw std::invalid_argument("DyadicNoise: horizon must be a multiple of 2^-gen_level");

  Eigen::MatrixXd gram(K, K);
  for (long k = 0; k < K; ++k)
    for (long l = 0; l <= k; ++l) {
      const double v = cov.rect(k * eps, (k + 1) * eps, l * eps, (l + 1) * eps);
      gram(k, l) = v;
      gram(l, k) = v;
    }
  Eigen::MatrixXd L = psd_cholesky(gram);

  const long M = g.size();
  Eigen::MatrixXcd white(K, M);
  for (long l = 0; l < K; ++l) {
    CounterRng rng(seed, static_cast<std::uint64_t>(l) + 1);
    auto spec = synth_spectrum(m, g, 1.0, rng);
    for (long i = 0; i < M; ++i) white(l, i) = spec[static_cast<size_t>(i)];
  }
  colored_ = L * white;
}

Eigen::RowVectorXcd DyadicNoise::increment_spectrum(int n, long k) const {
  if (n < 0 || n > gen_level_)
    throw std::invalid_argument("increment_spectrum: level out of range");
  const long span = 1L << (gen_level_ - n);
  const long lo = k * span;
  if (lo < 0 || lo + span > colored_.rows())
    throw std::out_of_range("increment_spectrum: cell outside horizon");
  return colored_.middleRows(lo, span).colwise().sum();
}

GridField DyadicNoise::solution(int n, double t) const {
  if (!(t > 0.0 && t <= horizon_ + 1e-12))
    throw std::invalid_argument("DyadicNoise::solution: t in (0, horizon]");
  const double step = std::ldexp(1.0, -n);
  Eigen::RowVectorXcd acc = Eigen::RowVectorXcd::Zero(colored_.cols());
  for (long k = 0; k * step < t; ++k) {
    const double tau = t - k * step;
    Eigen::RowVectorXcd inc = increment_spectrum(n, k);
    for (long i = 0; i < inc.cols(); ++i)
      inc(i) *= std::exp(-0.5 * tau * geom_.freq_norm2(i));
    acc += inc;
  }
  std::vector<std::complex<double>> spec(static_cast<size_t>(acc.cols()));
  for (long i = 0; i < acc.cols(); ++i) spec[static_cast<size_t>(i)] = acc(i);
  return field_from_synthesis(geom_, std::move(spec));
}

GridField dyadic_solution(const TimeCovariance& cov, const SpectralMeasure& m, int n,
                          double t, const GridGeom& g, std::uint64_t seed) {
  if (!(t > 0.0)) throw std::invalid_argument("dyadic_solution: t > 0");
  const int gl = std::max(n, 8);
  double horizon;
  if (n <= 8) {
    horizon = std::ceil(t);  // integral horizon couples all levels n <= 8
  } else {
    horizon = std::ceil(t * std::ldexp(1.0, n)) * std::ldexp(1.0, -n);
  }
  DyadicNoise noise(cov, m, gl, horizon, g, seed);
  return noise.solution(n, t);
}

NoiseScalingReport noise_besov_scaling(const TimeCovariance& cov,
                                       const SpectralMeasure& m, const GridGeom& g,
                                       const BesovParams& bp,
                                       const std::vector<double>& gaps, int n_rep,
                                       std::uint64_t seed, int threads) {
  if (gaps.size() < 3)
    throw std::invalid_argument("noise_besov_scaling: need at least 3 gaps");
  if (n_rep < 2) throw std::invalid_argument("noise_besov_scaling: n_rep >= 2");
  if (threads <= 0) threads = default_threads();
  FreqPartition part = build_partition(g);
  const double s0 = 0.25;

  NoiseScalingReport rep;
  rep.gaps = gaps;
  rep.n_rep = n_rep;
  rep.mean_sq_norms.assign(gaps.size(), 0.0);

  const long total = static_cast<long>(gaps.size()) * n_rep;
  std::vector<double> sq(static_cast<size_t>(total), 0.0);
  parallel_for(total, threads, [&](long idx) {
    const size_t gi = static_cast<size_t>(idx) / static_cast<size_t>(n_rep);
    const long r = idx % n_rep;
    GridField f = sample_noise_field(cov, m, s0, s0 + gaps[gi], g,
                                     combine_seed(seed, gi, static_cast<std::uint64_t>(r)));
    const double nrm = besov_norm(f, part, bp);
    sq[static_cast<size_t>(idx)] = nrm * nrm;
  });
  for (size_t gi = 0; gi < gaps.size(); ++gi) {
    KahanSum s;
    for (long r = 0; r < n_rep; ++r)
      s.add(sq[gi * static_cast<size_t>(n_rep) + static_cast<size_t>(r)]);
    rep.mean_sq_norms[gi] = s.value() / n_rep;
  }

  std::vector<double> lx(gaps.size()), ly(gaps.size());
  for (size_t i = 0; i < gaps.size(); ++i) {
    lx[i] = std::log(gaps[i]);
    ly[i] = std::log(rep.mean_sq_norms[i]);
  }
  LinearFit fit = fit_line(lx, ly);
  rep.slope = fit.slope;
  rep.r2 = fit.r2;
  return rep;
}

SmoothingReport smoothing_rate_check(const GridField& f, const FreqPartition& p,
                                     double alpha, double eta,
                                     const std::vector<double>& tau_list,
                                     const BesovParams& bp, double kappa_gap) {
  if (tau_list.size() < 4)
    throw std::invalid_argument("smoothing_rate_check: need at least 4 tau values");
  if (!(eta >= alpha)) throw std::invalid_argument("smoothing_rate_check: eta >= alpha");

  BesovParams bp_eta = bp, bp_alpha = bp;
  bp_eta.kappa = eta;
  bp_alpha.kappa = alpha;

  std::vector<double> lt, ln_heat, ln_idm;
  for (double tau : tau_list) {
    GridField heated = heat_apply(f, tau);
    const double nh = besov_norm(heated, p, bp_eta);
    GridField delta = f;
    delta -= heated;
    const double nd = besov_norm(delta, p, bp_alpha);
    lt.push_back(std::log(tau));
    ln_heat.push_back(std::log(nh));
    ln_idm.push_back(std::log(nd));
  }

  SmoothingReport rep;
  LinearFit fh = fit_line(lt, ln_heat);
  LinearFit fi = fit_line(lt, ln_idm);
  rep.slope_heat = fh.slope;
  rep.r2_heat = fh.r2;
  rep.expected_heat = -0.5 * (eta - alpha);
  rep.pass_heat = std::abs(rep.slope_heat - rep.expected_heat) <= 0.15;
  rep.slope_idminus = fi.slope;
  rep.r2_idminus = fi.r2;
  rep.expected_idminus = std::min(1.0, 0.5 * kappa_gap);
  rep.pass_idminus = std::abs(rep.slope_idminus - rep.expected_idminus) <= 0.15;
  return rep;
}

CauchyDecayReport dyadic_cauchy_decay(const TimeCovariance& cov,
                                      const SpectralMeasure& m, int n_lo, int n_hi,
                                      double t, const GridGeom& g,
                                      const BesovParams& bp, int n_rep,
                                      std::uint64_t seed, int threads) {
  if (n_lo < 0 || n_hi <= n_lo)
    throw std::invalid_argument("dyadic_cauchy_decay: need 0 <= n_lo < n_hi");
  const double cells_lo = t * std::ldexp(1.0, n_lo);
  if (std::abs(cells_lo - std::llround(cells_lo)) > 1e-9)
    throw std::invalid_argument("dyadic_cauchy_decay: t must be dyadic at level n_lo");
  if (threads <= 0) threads = default_threads();

  FreqPartition part = build_partition(g);
  const int gl = n_hi + 1;
  const int levels = n_hi - n_lo + 1;

  std::vector<double> acc(static_cast<size_t>(levels) * static_cast<size_t>(n_rep), 0.0);
  parallel_for(n_rep, threads, [&](long r) {
    DyadicNoise noise(cov, m, gl, t, g, combine_seed(seed, static_cast<std::uint64_t>(r)));
    GridField prev = noise.solution(n_lo, t);
    for (int n = n_lo; n <= n_hi; ++n) {
      GridField next = noise.solution(n + 1, t);
      GridField diff = prev;
      diff -= next;
      acc[static_cast<size_t>(n - n_lo) * static_cast<size_t>(n_rep) +
          static_cast<size_t>(r)] = besov_norm(diff, part, bp);
      prev = std::move(next);
    }
  });

  CauchyDecayReport rep;
  rep.n_lo = n_lo;
  rep.n_hi = n_hi;
  rep.n_rep = n_rep;
  std::vector<double> xs, ys;
  for (int li = 0; li < levels; ++li) {
    KahanSum s;
    for (long r = 0; r < n_rep; ++r)
      s.add(acc[static_cast<size_t>(li) * static_cast<size_t>(n_rep) +
                static_cast<size_t>(r)]);
    const double mean = s.value() / n_rep;
    rep.mean_diff_norms.push_back(mean);
    xs.push_back(n_lo + li);
    ys.push_back(std::log2(mean));
  }
  LinearFit fit = fit_line(xs, ys);
  rep.theta = -fit.slope;
  rep.fitted_ratio = std::pow(2.0, fit.slope);
  rep.r2 = fit.r2;
  return rep;
}

HolderReport holder_estimate(const TimeCovariance& cov, const SpectralMeasure& m,
                             int n, const std::vector<double>& times,
                             const GridGeom& g, const BesovParams& bp,
                             double beta_analysis, std::uint64_t seed, int n_rep,
                             int threads) {
  if (times.size() < 3) throw std::invalid_argument("holder_estimate: need >= 3 times");
  for (double t : times)
    if (!(t > 0.0)) throw std::invalid_argument("holder_estimate: times must be positive");
  if (threads <= 0) threads = default_threads();

  const double t_max = *std::max_element(times.begin(), times.end());
  const double step = std::ldexp(1.0, -n);
  const double horizon = std::ceil(t_max / step) * step;

  FreqPartition part = build_partition(g);

  // group pairs by gap
  std::map<double, std::vector<std::pair<size_t, size_t>>> by_gap;
  for (size_t i = 0; i < times.size(); ++i)
    for (size_t j = i + 1; j < times.size(); ++j)
      by_gap[std::abs(times[j] - times[i])].push_back({i, j});

  std::vector<double> gap_list;
  for (auto& [gap, _] : by_gap) gap_list.push_back(gap);

  std::vector<double> acc(gap_list.size() * static_cast<size_t>(n_rep), 0.0);
  parallel_for(n_rep, threads, [&](long r) {
    DyadicNoise noise(cov, m, n, horizon, g,
                      combine_seed(seed, static_cast<std::uint64_t>(r)));
    std::vector<GridField> u;
    u.reserve(times.size());
    for (double t : times) u.push_back(noise.solution(n, t));
    size_t gi = 0;
    for (auto& [gap, pairs] : by_gap) {
      KahanSum s;
      for (auto& [i, j] : pairs) {
        GridField diff = u[j];
        diff -= u[i];
        s.add(besov_norm(diff, part, bp));
      }
      acc[gi * static_cast<size_t>(n_rep) + static_cast<size_t>(r)] =
          s.value() / pairs.size();
      ++gi;
    }
  });

  HolderReport rep;
  rep.n_rep = n_rep;
  std::vector<double> lx, ly;
  for (size_t gi = 0; gi < gap_list.size(); ++gi) {
    KahanSum s;
    for (long r = 0; r < n_rep; ++r)
      s.add(acc[gi * static_cast<size_t>(n_rep) + static_cast<size_t>(r)]);
    const double mean = s.value() / n_rep;
    rep.gaps.push_back(gap_list[gi]);
    rep.mean_norms.push_back(mean);
    lx.push_back(std::log(gap_list[gi]));
    ly.push_back(std::log(mean));
  }
  LinearFit fit = fit_line(lx, ly);
  rep.fitted_exponent = fit.slope;
  rep.r2 = fit.r2;
  rep.expected = 0.5 * (cov.beta() - beta_analysis - bp.kappa);
  rep.pass = rep.fitted_exponent >= rep.expected - 0.1;
  return rep;
}

}  // namespace spde
