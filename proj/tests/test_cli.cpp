#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "spde/cli.hpp"
#include "spde/config.hpp"

using namespace spde;
using json = nlohmann::json;

namespace {

struct TempFile {
  std::string path;
  TempFile(const std::string& name, const std::string& content) {
    path = std::string("/tmp/spde_test_") + name;
    std::ofstream f(path);
    f << content;
  }
  ~TempFile() { std::remove(path.c_str()); }
};

struct CliRun {
  int code;
  std::string out;
  std::string err;
};

CliRun run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

}  // namespace

TEST_CASE("config parsing") {
  StudyConfig c = StudyConfig::from_string(
      "time_cov = fbm:H0=0.7\n"
      "measure = riesz:eta=1.0  # spatial part\n"
      "dim = 2\n"
      "t = 0.5\n"
      "eps_list = 0.25, 0.125\n"
      "seed = 7\n");
  CHECK(c.dim == 2);
  CHECK(c.t == 0.5);
  CHECK(c.eps_list.size() == 2);
  CHECK(c.make_time_cov().beta() == doctest::Approx(1.4));
  CHECK(c.make_measure().spec_string() == "riesz:eta=1");

  CHECK_THROWS_WITH_AS(StudyConfig::from_string("tim_cov = brownian\n"),
                       doctest::Contains("tim_cov"), ConfigError);
  CHECK_THROWS_AS(StudyConfig::from_string("time_cov brownian\n"), ConfigError);
  CHECK_THROWS_AS(StudyConfig::from_string("t = abc\n"), ConfigError);
  CHECK_THROWS_AS(StudyConfig::from_string("wz_rule = center\n"), ConfigError);
}

TEST_CASE("spec string round trips") {
  CHECK(parse_time_cov("brownian").beta() == 1.0);
  CHECK(parse_time_cov("product").beta() == 2.0);
  CHECK(parse_time_cov("fbm:H0=0.25").beta() == doctest::Approx(0.5));
  CHECK_THROWS_AS(parse_time_cov("ou"), ConfigError);

  CHECK(parse_measure("white:scale=2", 1, true, 0, 0, "").spec_string() ==
        "white:scale=2");
  CHECK(parse_measure("bessel:eta=1.5", 3, true, 0, 0, "").dim() == 3);
  CHECK_THROWS_AS(parse_measure("fracprod:H=0.5,0.5", 1, true, 0, 0, ""), ConfigError);
  CHECK_THROWS_AS(parse_measure("gau:1", 1, true, 0, 0, ""), ConfigError);
}

TEST_CASE("check subcommand verdicts and exit codes") {
  TempFile good("check_good.cfg",
                "time_cov = brownian\nmeasure = riesz:eta=1.5\ndim = 2\n");
  CliRun r = run({"check", "--config", good.path});
  CHECK(r.code == 0);
  json j = json::parse(r.out);
  CHECK(j["schema"] == 1);
  CHECK(j["verdict"] == true);
  CHECK(j["agree"] == true);

  TempFile bad("check_bad.cfg",
               "time_cov = brownian\nmeasure = riesz:eta=2.5\ndim = 2\n");
  CliRun r2 = run({"check", "--config", bad.path});
  CHECK(r2.code == 2);
  CHECK(json::parse(r2.out)["verdict"] == false);
}

TEST_CASE("malformed config exits 1 and names the key") {
  TempFile f("broken.cfg", "time_cov = brownian\nmeasuer = white\n");
  CliRun r = run({"check", "--config", f.path});
  CHECK(r.code == 1);
  CHECK(r.err.find("measuer") != std::string::npos);
}

TEST_CASE("custom density through an expression file") {
  TempFile dens("dens.expr", "1/(2*pi)  # flat density\n");
  TempFile cfg("custom.cfg", "time_cov = brownian\nmeasure = custom:" + dens.path +
                                 "\ndim = 1\nmeasure_tail_exponent = 0\n");
  CliRun r = run({"check", "--config", cfg.path});
  CHECK(r.code == 0);
  json j = json::parse(r.out);
  CHECK(std::abs(j["dalang"]["value"].get<double>() - 0.5) <= 1e-5);
}

TEST_CASE("variance subcommand") {
  TempFile cfg("var.cfg", "time_cov = brownian\nmeasure = white:scale=1\ndim = 1\nt = 1.0\n");
  CliRun r = run({"variance", "--config", cfg.path});
  CHECK(r.code == 0);
  json j = json::parse(r.out);
  CHECK(std::abs(j["total"].get<double>() - 0.5641896) <= 1e-3);
  CHECK(j["j_term"]["bound_holds"] == true);

  TempFile div("var_div.cfg",
               "time_cov = brownian\nmeasure = riesz:eta=2.5\ndim = 2\nt = 1.0\n");
  CliRun r2 = run({"variance", "--config", div.path});
  CHECK(r2.code == 2);
  CHECK(json::parse(r2.out)["verdict"] == "DIVERGENT");
}

TEST_CASE("ibp-verify subcommand") {
  TempFile cfg("ibp.cfg",
               "time_cov = brownian\nmeasure = white:scale=1\ndim = 1\n"
               "t = 1.0\nt_tilde = 1.0\neps = 0.0625\neps_tilde = 0.125\ngamma_t = 2.0\n");
  CliRun r = run({"ibp-verify", "--config", cfg.path});
  CHECK(r.code == 0);
  json j = json::parse(r.out);
  CHECK(j["pass"] == true);
  CHECK(std::abs(j["residual"].get<double>()) <=
        1e-9 * (1.0 + std::abs(j["A"].get<double>())));
}

TEST_CASE("simulate writes csv and is deterministic") {
  TempFile cfg("sim.cfg",
               "time_cov = brownian\nmeasure = white:scale=1\ndim = 1\n"
               "t = 1.0\neps = 0.03125\nn_rep = 200\nseed = 42\nwz_coverage = full\n"
               "wz_rule = midpoint\nthreads = 2\n");
  const std::string csv = "/tmp/spde_test_draws.csv";
  CliRun r1 = run({"simulate", "--config", cfg.path, "--out", csv});
  CliRun r2 = run({"simulate", "--config", cfg.path, "--out", csv});
  CHECK(r1.code == 0);
  CHECK(r1.out == r2.out);  // byte-identical JSON for identical config + seed

  std::ifstream in(csv);
  std::string header;
  std::getline(in, header);
  CHECK(header.find("replicate,value") == 0);
  int lines = 0;
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) ++lines;
  CHECK(lines == 200);
  std::remove(csv.c_str());
}

TEST_CASE("converge subcommand") {
  TempFile cfg("conv.cfg",
               "time_cov = brownian\nmeasure = white:scale=1\ndim = 1\nt = 1.0\n"
               "eps_list = 0.0625,0.03125,0.015625\nwz_rule = midpoint\n");
  CliRun r = run({"converge", "--config", cfg.path});
  CHECK(r.code == 0);
  json j = json::parse(r.out);
  CHECK(j["verdict"] == "PASS");
  CHECK(j["rows"].size() == 3);
}

TEST_CASE("usage errors") {
  CliRun none = run({});
  CHECK(none.code == 1);
  CliRun help = run({"--help"});
  CHECK(help.code == 0);
  CHECK(help.out.find("spde") != std::string::npos);
  CliRun missing = run({"check"});
  CHECK(missing.code == 1);
  CliRun nofile = run({"check", "--config", "/tmp/does_not_exist_spde.cfg"});
  CHECK(nofile.code == 1);
}
