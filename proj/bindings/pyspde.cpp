#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "spde/acceptance.hpp"
#include "spde/besov.hpp"
#include "spde/cli.hpp"
#include "spde/config.hpp"
#include "spde/expr.hpp"
#include "spde/gamma.hpp"
#include "spde/ibp.hpp"
#include "spde/sampler.hpp"
#include "spde/variance.hpp"

namespace py = pybind11;
using namespace spde;

namespace {

FreezeRule rule_from_string(const std::string& s) {
  if (s == "left") return FreezeRule::LeftEndpoint;
  if (s == "midpoint") return FreezeRule::Midpoint;
  throw std::invalid_argument("rule must be left | midpoint");
}

WZGrid grid_from_strings(double t, double eps, const std::string& rule,
                         const std::string& coverage) {
  if (coverage == "margin") return WZGrid::margin_truncated(t, eps);
  if (coverage == "full") return WZGrid::full_cover(t, eps, {}, rule_from_string(rule));
  throw std::invalid_argument("coverage must be margin | full");
}

GammaOrder order_from_string(const std::string& s) {
  if (s == "ds") return GammaOrder::Ds;
  if (s == "dsdsp") return GammaOrder::DsDsp;
  if (s == "d2sdsp") return GammaOrder::D2sDsp;
  throw std::invalid_argument("order must be ds | dsdsp | d2sdsp");
}

GridField field_from(const std::vector<double>& v, int dim, int n, double box) {
  return GridField(GridGeom(dim, n, box), v);
}

}  // namespace

PYBIND11_MODULE(pyspde, m) {
  m.doc() = "stochastic heat equation with general Gaussian noise";

  py::class_<TimeCovariance>(m, "TimeCovariance")
      .def_static("brownian", &TimeCovariance::brownian)
      .def_static("fractional_brownian", &TimeCovariance::fractional_brownian,
                  py::arg("h0"))
      .def_static("product", &TimeCovariance::product)
      .def_static(
          "custom",
          [](std::function<double(double, double)> fn, double beta, double upper,
             double lower) {
            return TimeCovariance::custom(std::move(fn), beta, upper, lower);
          },
          py::arg("fn"), py::arg("beta"), py::arg("holder_upper"),
          py::arg("holder_lower") = 0.0)
      .def("__call__", &TimeCovariance::operator(), py::arg("s"), py::arg("t"))
      .def("rect", &TimeCovariance::rect, py::arg("s"), py::arg("t"), py::arg("u"),
           py::arg("v"))
      .def_property_readonly("beta", &TimeCovariance::beta)
      .def("spec_string", &TimeCovariance::spec_string);

  py::class_<SpectralMeasure>(m, "SpectralMeasure")
      .def_static("white", &SpectralMeasure::white, py::arg("dim"),
                  py::arg("scale") = 1.0)
      .def_static("riesz", &SpectralMeasure::riesz, py::arg("dim"), py::arg("eta"))
      .def_static("bessel", &SpectralMeasure::bessel, py::arg("dim"), py::arg("eta"))
      .def_static("fractional_product", &SpectralMeasure::fractional_product,
                  py::arg("hurst"))
      .def_static(
          "custom_expr",
          [](int dim, const std::string& text, bool radial, double tail_exponent,
             double origin_exponent) {
            auto expr = std::make_shared<Expression>(Expression::parse(text));
            return SpectralMeasure::custom(
                dim, [expr](std::span<const double> xi) { return expr->eval(xi); },
                radial, tail_exponent, origin_exponent);
          },
          py::arg("dim"), py::arg("expr"), py::arg("radial") = true,
          py::arg("tail_exponent") = 0.0, py::arg("origin_exponent") = 0.0)
      .def("density",
           [](const SpectralMeasure& m_, const std::vector<double>& xi) {
             return m_.density(xi);
           })
      .def_property_readonly("dim", &SpectralMeasure::dim)
      .def("spec_string", &SpectralMeasure::spec_string);

  m.def("dalang_integral", [](const SpectralMeasure& mm, double beta) {
    DalangResult r = dalang_integral(mm, beta);
    py::dict d;
    d["value"] = r.value;
    d["converged"] = r.converged;
    d["tail_bound"] = r.tail_bound;
    return d;
  });

  m.def("existence_verdict", [](const SpectralMeasure& mm, const TimeCovariance& cov) {
    ExistenceReport r = existence_verdict(mm, cov);
    py::dict d;
    d["analytic"] = r.analytic;
    d["numeric"] = r.numeric;
    d["agree"] = r.agree;
    d["condition"] = r.condition;
    d["value"] = r.integral.value;
    return d;
  });

  py::class_<GammaKernel>(m, "GammaKernel")
      .def(py::init<SpectralMeasure, double, double>(), py::arg("measure"),
           py::arg("t"), py::arg("quad_tol") = 1e-10)
      .def("__call__", &GammaKernel::operator(), py::arg("s"), py::arg("sp"))
      .def(
          "partial",
          [](const GammaKernel& k, double s, double sp, const std::string& order) {
            return k.partial(s, sp, order_from_string(order));
          },
          py::arg("s"), py::arg("sp"), py::arg("order"));

  m.def(
      "disc_integral",
      [](std::function<double(double)> f, double s, double t, double eps) {
        return disc_integral(f, s, t, eps);
      },
      py::arg("f"), py::arg("s"), py::arg("t"), py::arg("eps"));

  m.def(
      "ibp_decompose",
      [](std::function<double(double, double)> gamma_fn, const TimeCovariance& cov,
         double eps, double eps_tilde, double t, double t_tilde) {
        IbpBreakdown b =
            ibp_decompose(gamma_fn, cov, DiscretizationPair(eps, eps_tilde, t, t_tilde));
        py::dict d;
        d["A"] = b.A;
        d["A0"] = b.A0;
        d["I0"] = b.I0;
        d["I1"] = b.I1;
        d["I2"] = b.I2;
        d["I3"] = b.I3;
        d["I4"] = b.I4;
        d["residual"] = b.residual();
        return d;
      },
      py::arg("gamma_fn"), py::arg("cov"), py::arg("eps"), py::arg("eps_tilde"),
      py::arg("t"), py::arg("t_tilde"));

  m.def("variance_exact",
        [](const TimeCovariance& cov, const SpectralMeasure& mm, double t) {
          VarianceBreakdown v = variance_exact(cov, mm, t);
          py::dict d;
          d["term_const"] = v.term_const;
          d["term_s"] = v.term_s;
          d["term_sp"] = v.term_sp;
          d["term_double"] = v.term_double;
          d["total"] = v.total;
          d["quad_err_est"] = v.quad_err_est;
          d["divergent"] = v.divergent;
          return d;
        });

  m.def("j_term", [](const TimeCovariance& cov, const SpectralMeasure& mm, double t) {
    JTermResult r = j_term(cov, mm, t);
    py::dict d;
    d["J"] = r.J;
    d["J1_bound"] = r.J1_bound;
    d["J2_bound"] = r.J2_bound;
    d["bound_holds"] = r.bound_holds;
    d["divergent"] = r.divergent;
    return d;
  });

  m.def(
      "second_moment",
      [](const TimeCovariance& cov, const SpectralMeasure& mm, double t, double eps,
         const std::string& rule, const std::string& coverage) {
        return discrete_second_moment(
            build_gram(cov, mm, grid_from_strings(t, eps, rule, coverage)));
      },
      py::arg("cov"), py::arg("measure"), py::arg("t"), py::arg("eps"),
      py::arg("rule") = "midpoint", py::arg("coverage") = "full");

  m.def(
      "sample_wz",
      [](const TimeCovariance& cov, const SpectralMeasure& mm, double t, double eps,
         std::uint64_t seed, int n_rep, const std::string& rule,
         const std::string& coverage) {
        return sample_wz(build_gram(cov, mm, grid_from_strings(t, eps, rule, coverage)),
                         seed, n_rep, 1);
      },
      py::arg("cov"), py::arg("measure"), py::arg("t"), py::arg("eps"), py::arg("seed"),
      py::arg("n_rep"), py::arg("rule") = "midpoint", py::arg("coverage") = "full");

  m.def("convergence_study",
        [](const TimeCovariance& cov, const SpectralMeasure& mm, double t,
           const std::vector<double>& eps_list) {
          ConvergenceReport r = convergence_study(cov, mm, t, {}, eps_list);
          py::dict d;
          py::list rows;
          for (auto& row : r.rows) {
            py::dict rd;
            rd["eps"] = row.eps;
            rd["second_moment"] = row.second_moment;
            rd["cauchy_next"] = row.cauchy_next;
            rows.append(rd);
          }
          d["rows"] = rows;
          d["verdict"] = r.verdict;
          d["target"] = r.target;
          d["limit_gap_rel"] = r.limit_gap_rel;
          return d;
        });

  m.def(
      "noise_field",
      [](const TimeCovariance& cov, const SpectralMeasure& mm, double s, double t,
         int dim, int n, double box, std::uint64_t seed) {
        return sample_noise_field(cov, mm, s, t, GridGeom(dim, n, box), seed).values();
      },
      py::arg("cov"), py::arg("measure"), py::arg("s"), py::arg("t"), py::arg("dim"),
      py::arg("n"), py::arg("box"), py::arg("seed"));

  m.def(
      "besov_norm",
      [](const std::vector<double>& values, int dim, int n, double box, double kappa,
         int q, double sigma) {
        GridField f = field_from(values, dim, n, box);
        FreqPartition p = build_partition(f.geom());
        BesovParams bp;
        bp.kappa = kappa;
        bp.q = q;
        bp.sigma = sigma;
        return besov_norm(f, p, bp);
      },
      py::arg("values"), py::arg("dim"), py::arg("n"), py::arg("box"), py::arg("kappa"),
      py::arg("q") = 1, py::arg("sigma") = 0.0);

  m.def(
      "heat_apply",
      [](const std::vector<double>& values, int dim, int n, double box, double tau) {
        return heat_apply(field_from(values, dim, n, box), tau).values();
      },
      py::arg("values"), py::arg("dim"), py::arg("n"), py::arg("box"), py::arg("tau"));

  m.def(
      "partition_unity_error",
      [](int dim, int n, double box) {
        const GridGeom g(dim, n, box);
        FreqPartition p = build_partition(g);
        double worst = 0.0;
        for (long i = 0; i < g.size(); ++i) {
          double s = p.multiplier(-1)[static_cast<size_t>(i)];
          for (int j = 0; j <= p.j_max(); ++j)
            s += p.multiplier(j)[static_cast<size_t>(i)];
          worst = std::max(worst, std::abs(s - 1.0));
        }
        return worst;
      },
      py::arg("dim"), py::arg("n"), py::arg("box"));

  m.def(
      "dyadic_solution",
      [](const TimeCovariance& cov, const SpectralMeasure& mm, int level, double t,
         int dim, int n, double box, std::uint64_t seed) {
        return dyadic_solution(cov, mm, level, t, GridGeom(dim, n, box), seed).values();
      },
      py::arg("cov"), py::arg("measure"), py::arg("level"), py::arg("t"), py::arg("dim"),
      py::arg("n"), py::arg("box"), py::arg("seed"));

  m.def("run_cli", [](const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = run_cli(args, out, err);
    return py::make_tuple(code, out.str(), err.str());
  });

  m.def(
      "run_criterion",
      [](int id) {
        CriterionResult r = run_criterion(id);
        py::dict d;
        d["id"] = r.id;
        d["name"] = r.name;
        d["pass"] = r.pass;
        d["seconds"] = r.seconds;
        d["details"] = r.details;
        return d;
      },
      py::arg("id"));
}
