#include "spde/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <vector>

#include "spde/util.hpp"

namespace spde {

namespace {

// QUADPACK qk15 abscissae/weights on [-1,1].
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144838258730, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

}  // namespace

void gk15_nodes(double c, double h, const std::function<void(double, double)>& emit) {
  for (int i = 0; i < 7; ++i) {
    emit(c - h * kXgk[i], h * kWgk[i]);
    emit(c + h * kXgk[i], h * kWgk[i]);
  }
  emit(c, h * kWgk[7]);
}

double gk15_panel(const Integrand& f, double a, double b, double* err) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  double fv[15];
  for (int i = 0; i < 7; ++i) {
    fv[i] = f(c - h * kXgk[i]);
    fv[14 - i] = f(c + h * kXgk[i]);
  }
  fv[7] = f(c);
  double kron = kWgk[7] * fv[7];
  double gauss = kWg[3] * fv[7];
  for (int i = 0; i < 7; ++i) {
    kron += kWgk[i] * (fv[i] + fv[14 - i]);
    if (i % 2 == 1) gauss += kWg[i / 2] * (fv[i] + fv[14 - i]);
  }
  kron *= h;
  gauss *= h;
  if (err) *err = std::abs(kron - gauss);
  return kron;
}

QuadResult adaptive_gk15(const Integrand& f, double a, double b, double abs_tol,
                         double rel_tol, int max_intervals) {
  struct Seg {
    double a, b, val, err;
    long id;
  };
  struct Cmp {
    bool operator()(const Seg& x, const Seg& y) const {
      if (x.err != y.err) return x.err < y.err;
      return x.id > y.id;  // older interval first on ties
    }
  };

  QuadResult r;
  if (a == b) return r;

  std::priority_queue<Seg, std::vector<Seg>, Cmp> heap;
  std::vector<Seg> done;
  long next_id = 0;

  double e0 = 0.0;
  double v0 = gk15_panel(f, a, b, &e0);
  r.evals = 15;
  heap.push({a, b, v0, e0, next_id++});
  double total_val = v0, total_err = e0;

  while (total_err > std::max(abs_tol, rel_tol * std::abs(total_val))) {
    if (static_cast<int>(heap.size() + done.size()) >= max_intervals) {
      r.converged = false;
      break;
    }
    Seg s = heap.top();
    heap.pop();
    const double m = 0.5 * (s.a + s.b);
    if (!(s.a < m && m < s.b)) {  // interval exhausted in double precision
      done.push_back(s);
      continue;
    }
    double el = 0, er = 0;
    const double vl = gk15_panel(f, s.a, m, &el);
    const double vr = gk15_panel(f, m, s.b, &er);
    r.evals += 30;
    total_val += vl + vr - s.val;
    total_err += el + er - s.err;
    heap.push({s.a, m, vl, el, next_id++});
    heap.push({m, s.b, vr, er, next_id++});
  }

  while (!heap.empty()) {
    done.push_back(heap.top());
    heap.pop();
  }
  std::sort(done.begin(), done.end(),
            [](const Seg& x, const Seg& y) { return x.a < y.a; });
  KahanSum sv;
  double se = 0.0;
  for (const Seg& s : done) {
    sv.add(s.val);
    se += s.err;
  }
  r.value = sv.value();
  r.error = se;
  return r;
}

QuadResult graded_gk15(const Integrand& f, double a, double b, int levels,
                       bool adaptive_cells, double cell_rel_tol) {
  QuadResult r;
  if (a == b) return r;
  const double len = b - a;
  KahanSum sv;
  // cells [a + len*2^-(k+1), a + len*2^-k], k = 0..levels-1, plus the stub
  // [a, a + len*2^-levels] handled by a single panel.
  for (int k = levels; k >= 0; --k) {
    const double hi = a + len * std::ldexp(1.0, -k);
    const double lo = (k == levels) ? a : a + len * std::ldexp(1.0, -(k + 1));
    if (!(lo < hi)) continue;
    if (adaptive_cells) {
      QuadResult cr = adaptive_gk15(f, lo, hi, 0.0, cell_rel_tol, 200);
      sv.add(cr.value);
      r.error += cr.error;
      r.evals += cr.evals;
      r.converged = r.converged && cr.converged;
    } else {
      double e = 0.0;
      sv.add(gk15_panel(f, lo, hi, &e));
      r.error += e;
      r.evals += 15;
    }
  }
  r.value = sv.value();
  return r;
}

}  // namespace spde
