#include "spde/cli.hpp"

#include <CLI11.hpp>
#include <cmath>
#include <fstream>
#include <iostream>
#include <json.hpp>

#include "spde/acceptance.hpp"
#include "spde/besov.hpp"
#include "spde/config.hpp"
#include "spde/gamma.hpp"
#include "spde/ibp.hpp"
#include "spde/rng.hpp"
#include "spde/sampler.hpp"
#include "spde/util.hpp"
#include "spde/variance.hpp"

namespace spde {

namespace {

using json = nlohmann::ordered_json;

struct CliOptions {
  std::string config_path;
  std::string out_path;
  bool has_seed = false;
  std::uint64_t seed = 0;
  int threads = 0;
  bool has_t = false;
  double t = 0.0;
  bool has_eps = false;
  double eps = 0.0;
  bool has_reps = false;
  int reps = 0;
  std::string eps_list_str;
};

StudyConfig load_config(const CliOptions& opt) {
  if (opt.config_path.empty()) throw ConfigError("missing --config <file>");
  StudyConfig c = StudyConfig::from_file(opt.config_path);
  if (opt.has_seed) c.seed = opt.seed;
  if (opt.threads > 0) c.threads = opt.threads;
  if (opt.has_t) c.t = opt.t;
  if (opt.has_eps) c.eps = opt.eps;
  if (opt.has_reps) c.n_rep = opt.reps;
  if (!opt.eps_list_str.empty()) {
    c.eps_list.clear();
    std::stringstream ss(opt.eps_list_str);
    std::string item;
    while (std::getline(ss, item, ','))
      if (!item.empty()) c.eps_list.push_back(std::stod(item));
  }
  return c;
}

void write_csv(const std::string& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
  std::ofstream f(path);
  if (!f) throw ConfigError("cannot open output file: " + path);
  f.precision(17);
  for (size_t i = 0; i < header.size(); ++i) f << (i ? "," : "") << header[i];
  f << "\r\n";
  for (const auto& row : rows) {
    for (size_t i = 0; i < row.size(); ++i) f << (i ? "," : "") << row[i];
    f << "\r\n";
  }
}

json report_head(const char* command, const StudyConfig& c) {
  json j;
  j["schema"] = 1;
  j["command"] = command;
  j["time_cov"] = c.time_cov;
  j["measure"] = c.measure;
  j["dim"] = c.dim;
  return j;
}

int cmd_check(const CliOptions& opt, std::ostream& out) {
  StudyConfig c = load_config(opt);
  ExistenceReport rep = existence_verdict(c.make_measure(), c.make_time_cov());
  json j = report_head("check", c);
  j["beta"] = rep.beta;
  j["verdict"] = rep.analytic;
  j["analytic"] = rep.analytic;
  j["numeric"] = rep.numeric;
  j["agree"] = rep.agree;
  j["condition"] = rep.condition;
  j["dalang"] = {{"value", rep.integral.value},
                 {"converged", rep.integral.converged},
                 {"tail_bound", rep.integral.tail_bound},
                 {"error_est", rep.integral.error_est}};
  out << j.dump(2) << "\n";
  return rep.analytic ? 0 : 2;
}

int cmd_variance(const CliOptions& opt, std::ostream& out) {
  StudyConfig c = load_config(opt);
  const TimeCovariance cov = c.make_time_cov();
  const SpectralMeasure m = c.make_measure();
  VarianceBreakdown vb = variance_exact(cov, m, c.t);
  json j = report_head("variance", c);
  j["t"] = c.t;
  if (vb.divergent) {
    j["verdict"] = "DIVERGENT";
  } else {
    j["verdict"] = "OK";
    j["term_const"] = vb.term_const;
    j["term_s"] = vb.term_s;
    j["term_sp"] = vb.term_sp;
    j["term_double"] = vb.term_double;
    j["total"] = vb.total;
    j["quad_err_est"] = vb.quad_err_est;
    JBounds jb = j_bounds(cov, m, c.t);
    j["j_term"] = {{"J", vb.term_double},
                   {"J1_bound", jb.J1_bound},
                   {"J2_bound", jb.J2_bound},
                   {"bound_holds",
                    std::abs(vb.term_double) <= jb.J1_bound + jb.J2_bound + 1e-9}};
  }
  out << j.dump(2) << "\n";
  return vb.divergent ? 2 : 0;
}

int cmd_simulate(const CliOptions& opt, std::ostream& out) {
  StudyConfig c = load_config(opt);
  if (!(c.eps > 0.0)) throw ConfigError("simulate: set eps in the config or pass --eps");
  const TimeCovariance cov = c.make_time_cov();
  const SpectralMeasure m = c.make_measure();
  const WZGrid grid = c.wz_coverage == "margin"
                          ? WZGrid::margin_truncated(c.t, c.eps)
                          : WZGrid::full_cover(c.t, c.eps, {}, c.make_rule());
  NoiseGram gram = build_gram(cov, m, grid);
  const double gsum = discrete_second_moment(gram);
  std::vector<double> draws = sample_wz(gram, c.seed, c.n_rep, c.threads);
  double mean = 0.0;
  for (double d : draws) mean += d;
  mean /= draws.size();
  double var = 0.0;
  for (double d : draws) var += (d - mean) * (d - mean);
  var /= (draws.size() > 1 ? draws.size() - 1 : 1);

  json j = report_head("simulate", c);
  j["t"] = c.t;
  j["eps"] = c.eps;
  j["wz_rule"] = c.wz_rule;
  j["wz_coverage"] = c.wz_coverage;
  j["t_eps"] = grid.t_eps;
  j["k_max"] = grid.k_max;
  j["gram_sum"] = gsum;
  j["seed"] = c.seed;
  j["rng"] = rng_name();
  j["n_rep"] = c.n_rep;
  j["mc_mean"] = mean;
  j["mc_var"] = var;
  j["mc_var_se"] = gsum * std::sqrt(2.0 / std::max<size_t>(draws.size() - 1, 1));
  out << j.dump(2) << "\n";

  if (!opt.out_path.empty()) {
    std::vector<std::vector<double>> rows;
    rows.reserve(draws.size());
    for (size_t i = 0; i < draws.size(); ++i)
      rows.push_back({static_cast<double>(i), draws[i]});
    write_csv(opt.out_path, {"replicate", "value"}, rows);
  }
  return 0;
}

int cmd_converge(const CliOptions& opt, std::ostream& out) {
  StudyConfig c = load_config(opt);
  if (c.eps_list.size() < 2)
    throw ConfigError("converge: set eps_list in the config or pass --eps-list");
  const std::string rule = c.wz_rule;
  ConvergenceReport rep = convergence_study(c.make_time_cov(), c.make_measure(), c.t, {},
                                            c.eps_list, c.make_rule());
  json j = report_head("converge", c);
  j["t"] = c.t;
  j["wz_rule"] = rule;
  json rows = json::array();
  for (auto& row : rep.rows) {
    rows.push_back({{"eps", row.eps},
                    {"second_moment", row.second_moment},
                    {"cross_next", row.cross_next},
                    {"cauchy_next", row.cauchy_next}});
  }
  j["rows"] = rows;
  if (rep.target_valid) {
    j["target"] = rep.target;
    j["limit_gap_rel"] = rep.limit_gap_rel;
  }
  j["cauchy_decreasing"] = rep.cauchy_decreasing;
  j["verdict"] = rep.verdict;
  out << j.dump(2) << "\n";

  if (!opt.out_path.empty()) {
    std::vector<std::vector<double>> rows_csv;
    for (auto& row : rep.rows)
      rows_csv.push_back({row.eps, row.second_moment, row.cross_next, row.cauchy_next});
    write_csv(opt.out_path, {"eps", "second_moment", "cross_next", "cauchy_next"},
              rows_csv);
  }
  return rep.verdict == "PASS" ? 0 : 2;
}

int cmd_ibp_verify(const CliOptions& opt, std::ostream& out) {
  StudyConfig c = load_config(opt);
  if (!(c.eps > 0.0)) throw ConfigError("ibp-verify: set eps");
  const double eps_tilde = c.eps_tilde > 0.0 ? c.eps_tilde : c.eps;
  const double t_tilde = c.t_tilde > 0.0 ? c.t_tilde : c.t;
  const double gamma_t = c.gamma_t > 0.0 ? c.gamma_t : 2.0 * std::max(c.t, t_tilde);
  GammaKernel kern(c.make_measure(), gamma_t);
  auto gamma_fn = [&](double s, double sp) { return kern(s, sp); };
  IbpBreakdown br = ibp_decompose(gamma_fn, c.make_time_cov(),
                                  DiscretizationPair(c.eps, eps_tilde, c.t, t_tilde));
  const double tol = 1e-9 * (1.0 + std::abs(br.A));
  const bool pass = std::abs(br.residual()) <= tol;

  json j = report_head("ibp-verify", c);
  j["t"] = c.t;
  j["t_tilde"] = t_tilde;
  j["eps"] = c.eps;
  j["eps_tilde"] = eps_tilde;
  j["gamma_t"] = gamma_t;
  j["A"] = br.A;
  j["A0"] = br.A0;
  j["I0"] = br.I0;
  j["I1"] = br.I1;
  j["I2"] = br.I2;
  j["I3"] = br.I3;
  j["I4"] = br.I4;
  j["residual"] = br.residual();
  j["tolerance"] = tol;
  j["pass"] = pass;
  out << j.dump(2) << "\n";
  return pass ? 0 : 2;
}

int cmd_besov_analyze(const CliOptions& opt, std::ostream& out) {
  StudyConfig c = load_config(opt);
  std::vector<double> gaps = c.gap_list;
  if (gaps.empty())
    for (int k = 2; k <= 7; ++k) gaps.push_back(std::ldexp(1.0, -k));
  const GridGeom g(c.dim, c.grid_n, c.grid_l);
  BesovParams bp;
  bp.kappa = c.kappa;
  bp.q = c.q;
  bp.sigma = c.sigma;
  const TimeCovariance cov = c.make_time_cov();
  NoiseScalingReport rep =
      noise_besov_scaling(cov, c.make_measure(), g, bp, gaps, c.n_rep, c.seed, c.threads);

  json j = report_head("besov-analyze", c);
  j["grid_n"] = c.grid_n;
  j["grid_l"] = c.grid_l;
  j["kappa"] = bp.kappa;
  j["q"] = bp.q;
  j["n_rep"] = c.n_rep;
  j["seed"] = c.seed;
  j["rng"] = rng_name();
  j["gaps"] = rep.gaps;
  j["mean_sq_norms"] = rep.mean_sq_norms;
  j["slope"] = rep.slope;
  j["r2"] = rep.r2;
  bool pass = true;
  j["expected_slope"] = cov.beta();
  pass = std::abs(rep.slope - cov.beta()) <= 0.1;
  j["pass"] = pass;
  out << j.dump(2) << "\n";

  if (!opt.out_path.empty()) {
    std::vector<std::vector<double>> rows;
    for (size_t i = 0; i < rep.gaps.size(); ++i)
      rows.push_back({rep.gaps[i], rep.mean_sq_norms[i]});
    write_csv(opt.out_path, {"gap", "mean_sq_norm"}, rows);
  }
  return pass ? 0 : 2;
}

int cmd_regularity(const CliOptions& opt, std::ostream& out) {
  StudyConfig c = load_config(opt);
  std::vector<double> times = c.times;
  if (times.empty())
    for (int k = 1; k <= 8; ++k) times.push_back(0.25 + k * 0.0625);
  const GridGeom g(c.dim, c.grid_n, c.grid_l);
  BesovParams bp;
  bp.kappa = c.eta;
  bp.q = c.q;
  bp.sigma = c.sigma;
  HolderReport rep = holder_estimate(c.make_time_cov(), c.make_measure(), c.level, times,
                                     g, bp, c.analysis_beta(), c.seed, c.n_rep, c.threads);

  json j = report_head("regularity", c);
  j["level"] = c.level;
  j["eta"] = c.eta;
  j["beta_analysis"] = c.analysis_beta();
  j["n_rep"] = c.n_rep;
  j["seed"] = c.seed;
  j["rng"] = rng_name();
  j["gaps"] = rep.gaps;
  j["mean_norms"] = rep.mean_norms;
  j["fitted_exponent"] = rep.fitted_exponent;
  j["expected_exponent"] = rep.expected;
  j["r2"] = rep.r2;
  j["pass"] = rep.pass;
  out << j.dump(2) << "\n";

  if (!opt.out_path.empty()) {
    std::vector<std::vector<double>> rows;
    for (size_t i = 0; i < rep.gaps.size(); ++i)
      rows.push_back({rep.gaps[i], rep.mean_norms[i]});
    write_csv(opt.out_path, {"gap", "mean_norm"}, rows);
  }
  return rep.pass ? 0 : 2;
}

int cmd_report_all(const CliOptions& opt, std::ostream& out) {
  std::vector<CriterionResult> results = run_acceptance(opt.threads);
  json j;
  j["schema"] = 1;
  j["command"] = "report-all";
  json arr = json::array();
  bool all = true;
  for (auto& r : results) {
    all = all && r.pass;
    arr.push_back({{"id", r.id},
                   {"name", r.name},
                   {"pass", r.pass},
                   {"seconds", r.seconds},
                   {"limit_seconds", r.limit_seconds},
                   {"details", r.details}});
  }
  j["criteria"] = arr;
  j["all_pass"] = all;
  out << j.dump(2) << "\n";
  return all ? 0 : 2;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"spde: stochastic heat equation with general Gaussian noise"};
  app.require_subcommand(1);

  CliOptions opt;
  auto add_common = [&](CLI::App* sub, bool needs_config = true) {
    auto* o = sub->add_option("--config", opt.config_path, "study configuration file");
    if (needs_config) o->required();
    sub->add_option("--out", opt.out_path, "CSV output path");
    sub->add_option("--seed", opt.seed, "RNG seed override")
        ->each([&](const std::string&) { opt.has_seed = true; });
    sub->add_option("--threads", opt.threads, "worker threads (0 = auto)");
    sub->add_option("--t", opt.t, "terminal time override")
        ->each([&](const std::string&) { opt.has_t = true; });
    sub->add_option("--eps", opt.eps, "time step override")
        ->each([&](const std::string&) { opt.has_eps = true; });
    sub->add_option("--reps", opt.reps, "replicate count override")
        ->each([&](const std::string&) { opt.has_reps = true; });
    sub->add_option("--eps-list", opt.eps_list_str, "comma-separated eps schedule");
  };

  auto* c_check = app.add_subcommand("check", "existence condition verdict");
  add_common(c_check);
  auto* c_var = app.add_subcommand("variance", "exact second-moment identity");
  add_common(c_var);
  auto* c_sim = app.add_subcommand("simulate", "Wong-Zakai sampling");
  add_common(c_sim);
  auto* c_conv = app.add_subcommand("converge", "Wong-Zakai convergence study");
  add_common(c_conv);
  auto* c_ibp = app.add_subcommand("ibp-verify", "discrete integration-by-parts identity");
  add_common(c_ibp);
  auto* c_besov = app.add_subcommand("besov-analyze", "noise Besov scaling study");
  add_common(c_besov);
  auto* c_reg = app.add_subcommand("regularity", "time-Holder regularity study");
  add_common(c_reg);
  auto* c_all = app.add_subcommand("report-all", "run the full verification matrix");
  c_all->add_option("--threads", opt.threads, "worker threads (0 = auto)");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    out << app.help() << std::endl;
    return 0;
  } catch (const CLI::ParseError& e) {
    err << e.what() << std::endl;
    return 1;
  }

  try {
    if (c_check->parsed()) return cmd_check(opt, out);
    if (c_var->parsed()) return cmd_variance(opt, out);
    if (c_sim->parsed()) return cmd_simulate(opt, out);
    if (c_conv->parsed()) return cmd_converge(opt, out);
    if (c_ibp->parsed()) return cmd_ibp_verify(opt, out);
    if (c_besov->parsed()) return cmd_besov_analyze(opt, out);
    if (c_reg->parsed()) return cmd_regularity(opt, out);
    if (c_all->parsed()) return cmd_report_all(opt, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << std::endl;
    return 1;
  } catch (const std::invalid_argument& e) {
    err << "config error: " << e.what() << std::endl;
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << std::endl;
    return 1;
  }
  err << "no subcommand given" << std::endl;
  return 1;
}

}  // namespace spde
