#include "spde/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <memory>
#include <sstream>

#include "spde/expr.hpp"

namespace spde {

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

double to_double(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (...) {
    throw ConfigError("config key '" + key + "': expected a number, got '" + v + "'");
  }
}

long to_long(const std::string& key, const std::string& v) {
  try {
    size_t pos = 0;
    long x = std::stol(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (...) {
    throw ConfigError("config key '" + key + "': expected an integer, got '" + v + "'");
  }
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("config key '" + key + "': expected a boolean, got '" + v + "'");
}

std::vector<double> to_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item.empty()) continue;
    out.push_back(to_double(key, item));
  }
  if (out.empty()) throw ConfigError("config key '" + key + "': empty list");
  return out;
}

}  // namespace

StudyConfig StudyConfig::from_string(const std::string& text, const std::string& base_dir) {
  StudyConfig c;
  c.base_dir = base_dir;
  std::stringstream ss(text);
  std::string line;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (val.empty())
      throw ConfigError("config key '" + key + "': empty value");

    if (key == "time_cov") c.time_cov = val;
    else if (key == "measure") c.measure = val;
    else if (key == "dim") c.dim = static_cast<int>(to_long(key, val));
    else if (key == "t") c.t = to_double(key, val);
    else if (key == "eps") c.eps = to_double(key, val);
    else if (key == "eps_list") c.eps_list = to_list(key, val);
    else if (key == "t_tilde") c.t_tilde = to_double(key, val);
    else if (key == "eps_tilde") c.eps_tilde = to_double(key, val);
    else if (key == "gamma_t") c.gamma_t = to_double(key, val);
    else if (key == "grid_n") c.grid_n = static_cast<int>(to_long(key, val));
    else if (key == "grid_l") c.grid_l = to_double(key, val);
    else if (key == "kappa") c.kappa = to_double(key, val);
    else if (key == "q") c.q = static_cast<int>(to_long(key, val));
    else if (key == "sigma") c.sigma = to_double(key, val);
    else if (key == "eta") c.eta = to_double(key, val);
    else if (key == "alpha") c.alpha = to_double(key, val);
    else if (key == "beta") c.beta = to_double(key, val);
    else if (key == "seed") c.seed = static_cast<std::uint64_t>(to_long(key, val));
    else if (key == "n_rep") c.n_rep = static_cast<int>(to_long(key, val));
    else if (key == "threads") c.threads = static_cast<int>(to_long(key, val));
    else if (key == "level") c.level = static_cast<int>(to_long(key, val));
    else if (key == "times") c.times = to_list(key, val);
    else if (key == "tau_list") c.tau_list = to_list(key, val);
    else if (key == "gap_list") c.gap_list = to_list(key, val);
    else if (key == "wz_rule") c.wz_rule = val;
    else if (key == "wz_coverage") c.wz_coverage = val;
    else if (key == "trunc_radius") c.trunc_radius = to_double(key, val);
    else if (key == "measure_radial") c.measure_radial = to_bool(key, val);
    else if (key == "measure_tail_exponent") c.measure_tail_exponent = to_double(key, val);
    else if (key == "measure_origin_exponent") c.measure_origin_exponent = to_double(key, val);
    else
      throw ConfigError("unknown config key '" + key + "' (line " +
                        std::to_string(lineno) + ")");
  }

  if (c.dim < 1) throw ConfigError("config: dim must be >= 1");
  if (c.wz_rule != "left" && c.wz_rule != "midpoint")
    throw ConfigError("config key 'wz_rule': expected left|midpoint");
  if (c.wz_coverage != "margin" && c.wz_coverage != "full")
    throw ConfigError("config key 'wz_coverage': expected margin|full");
  return c;
}

StudyConfig StudyConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  std::string dir;
  const size_t slash = path.find_last_of('/');
  if (slash != std::string::npos) dir = path.substr(0, slash + 1);
  return from_string(buf.str(), dir);
}

TimeCovariance parse_time_cov(const std::string& spec) {
  if (spec == "brownian") return TimeCovariance::brownian();
  if (spec == "product") return TimeCovariance::product();
  if (spec.rfind("fbm:", 0) == 0) {
    const std::string rest = spec.substr(4);
    if (rest.rfind("H0=", 0) != 0)
      throw ConfigError("time_cov: expected fbm:H0=<x>, got '" + spec + "'");
    return TimeCovariance::fractional_brownian(to_double("time_cov", rest.substr(3)));
  }
  throw ConfigError("time_cov: unknown spec '" + spec +
                    "' (brownian | fbm:H0=<x> | product)");
}

SpectralMeasure parse_measure(const std::string& spec, int dim, bool radial,
                              double tail_exponent, double origin_exponent,
                              const std::string& base_dir) {
  auto param_of = [&](const std::string& prefix) {
    const std::string rest = spec.substr(spec.find(':') + 1);
    const size_t eq = rest.find('=');
    if (eq == std::string::npos)
      throw ConfigError("measure: expected " + prefix + "<name>=<value>, got '" + spec + "'");
    return to_double("measure", rest.substr(eq + 1));
  };
  if (spec.rfind("white", 0) == 0) {
    const double s = spec == "white" ? 1.0 : param_of("white:");
    return SpectralMeasure::white(dim, s);
  }
  if (spec.rfind("riesz:", 0) == 0) return SpectralMeasure::riesz(dim, param_of("riesz:"));
  if (spec.rfind("bessel:", 0) == 0) return SpectralMeasure::bessel(dim, param_of("bessel:"));
  if (spec.rfind("fracprod:", 0) == 0) {
    const std::string rest = spec.substr(9);
    if (rest.rfind("H=", 0) != 0)
      throw ConfigError("measure: expected fracprod:H=h1,h2,..., got '" + spec + "'");
    std::vector<double> hs = to_list("measure", rest.substr(2));
    if (static_cast<int>(hs.size()) != dim)
      throw ConfigError("measure: fracprod needs exactly dim=" + std::to_string(dim) +
                        " Hurst values");
    return SpectralMeasure::fractional_product(std::move(hs));
  }
  if (spec.rfind("custom:", 0) == 0) {
    std::string path = spec.substr(7);
    if (!path.empty() && path[0] != '/') path = base_dir + path;
    std::ifstream in(path);
    if (!in) throw ConfigError("measure: cannot open density file: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    std::string text;
    std::string line;
    while (std::getline(buf, line)) {
      const size_t hash = line.find('#');
      if (hash != std::string::npos) line = line.substr(0, hash);
      text += line + " ";
    }
    auto expr = std::make_shared<Expression>(Expression::parse(trim(text)));
    auto fn = [expr](std::span<const double> xi) { return expr->eval(xi); };
    return SpectralMeasure::custom(dim, fn, radial, tail_exponent, origin_exponent);
  }
  throw ConfigError("measure: unknown spec '" + spec +
                    "' (white:scale=.. | riesz:eta=.. | bessel:eta=.. | fracprod:H=.. | custom:<path>)");
}

TimeCovariance StudyConfig::make_time_cov() const { return parse_time_cov(time_cov); }

SpectralMeasure StudyConfig::make_measure() const {
  SpectralMeasure m = parse_measure(measure, dim, measure_radial, measure_tail_exponent,
                                    measure_origin_exponent, base_dir);
  if (trunc_radius > 0.0) m.set_truncation_radius(trunc_radius);
  return m;
}

FreezeRule StudyConfig::make_rule() const {
  return wz_rule == "midpoint" ? FreezeRule::Midpoint : FreezeRule::LeftEndpoint;
}

double StudyConfig::analysis_beta() const {
  if (beta > 0.0) return beta;
  return make_time_cov().beta();
}

}  // namespace spde
