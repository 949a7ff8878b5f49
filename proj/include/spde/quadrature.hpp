#pragma once

#include <functional>

namespace spde {

struct QuadResult {
  double value = 0.0;
  double error = 0.0;
  long evals = 0;
  bool converged = true;

  QuadResult& operator+=(const QuadResult& o) {
    value += o.value;
    error += o.error;
    evals += o.evals;
    converged = converged && o.converged;
    return *this;
  }
};

using Integrand = std::function<double(double)>;

// Single 15-point Gauss-Kronrod panel on [a,b]; *err gets |K15 - G7|.
double gk15_panel(const Integrand& f, double a, double b, double* err);

// Enumerates the 15 Kronrod abscissae and weights of the panel centered at c
// with half-width h (weights already scaled by h).
void gk15_nodes(double c, double h, const std::function<void(double, double)>& emit);

// Globally adaptive bisection driven by the per-interval Kronrod error
// estimate. Deterministic: ties broken by interval creation order and the
// final sum runs left to right with compensation.
QuadResult adaptive_gk15(const Integrand& f, double a, double b, double abs_tol,
                         double rel_tol, int max_intervals = 4000);

// Composite rule on a geometric mesh refined toward `a` (breakpoints
// a + (b-a)*2^-k). Meant for integrable power singularities at the left
// endpoint; GK nodes never touch the endpoints.
QuadResult graded_gk15(const Integrand& f, double a, double b, int levels,
                       bool adaptive_cells = false, double cell_rel_tol = 1e-10);

}  // namespace spde
