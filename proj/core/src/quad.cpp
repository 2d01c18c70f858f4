#include "pdflow/quad.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <vector>

namespace pdflow {

namespace {

// Kronrod 15 nodes/weights on [-1,1] and embedded Gauss 7 weights.
const double kXgk[8] = {0.991455371120813, 0.949107912342759, 0.864864423359769,
                        0.741531185599394, 0.586087235467691, 0.405845151377397,
                        0.207784955007898, 0.000000000000000};
const double kWgk[8] = {0.022935322010529, 0.063092092629979, 0.104790010322250,
                        0.140653259715525, 0.169004726639267, 0.190350578064785,
                        0.204432940075298, 0.209482141084728};
const double kWg[4] = {0.129484966168870, 0.279705391489277, 0.381830050505119,
                       0.417959183673469};

struct PanelResult {
  double value;
  double error;
};

PanelResult gk15(const Fn1& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double hw = 0.5 * (b - a);
  double fv[15];
  for (int i = 0; i < 7; ++i) {
    fv[i] = f(c - hw * kXgk[i]);
    fv[14 - i] = f(c + hw * kXgk[i]);
  }
  fv[7] = f(c);
  double resk = 0.0, resg = 0.0;
  for (int i = 0; i < 7; ++i) {
    resk += kWgk[i] * (fv[i] + fv[14 - i]);
    if (i % 2 == 1) resg += kWg[i / 2] * (fv[i] + fv[14 - i]);
  }
  resk += kWgk[7] * fv[7];
  resg += kWg[3] * fv[7];
  const double value = resk * hw;
  const double diff = std::abs(resk - resg) * hw;
  const double err = diff > 0.0 ? std::min(diff, 200.0 * diff * std::sqrt(diff)) : 0.0;
  return {value, std::max(err, diff * 1e-3)};
}

struct Interval {
  double a, b, value, error;
  bool operator<(const Interval& o) const { return error < o.error; }
};

}  // namespace

QuadResult integrate_gk(const Fn1& f, double a, double b, double abs_tol,
                        double rel_tol, int max_intervals) {
  QuadResult out;
  if (a == b) return out;
  std::priority_queue<Interval> heap;
  PanelResult p = gk15(f, a, b);
  out.evals = 15;
  heap.push({a, b, p.value, p.error});
  double total = p.value, total_err = p.error;
  int n = 1;
  while (n < max_intervals) {
    const double tol = std::max(abs_tol, rel_tol * std::abs(total));
    if (total_err <= tol) break;
    Interval top = heap.top();
    heap.pop();
    const double m = 0.5 * (top.a + top.b);
    PanelResult l = gk15(f, top.a, m);
    PanelResult r = gk15(f, m, top.b);
    out.evals += 30;
    total += l.value + r.value - top.value;
    total_err += l.error + r.error - top.error;
    heap.push({top.a, m, l.value, l.error});
    heap.push({m, top.b, r.value, r.error});
    ++n;
  }
  out.value = total;
  out.error = std::max(total_err, 0.0);
  return out;
}

QuadResult integrate_exp_line(const Fn1& logf, double u0, double rel_tol,
                              double log_drop, double scan_step,
                              double scan_limit) {
  // Scan for the maximum reachable from u0, then expand the window on both
  // sides until logf has dropped log_drop below the maximum.
  double best_u = u0;
  double best = logf(u0);
  for (int dir : {+1, -1}) {
    double u = u0;
    double prev = best;
    int bad = 0;
    while (std::abs(u - u0) < scan_limit) {
      u += dir * scan_step;
      const double v = logf(u);
      if (v > best) {
        best = v;
        best_u = u;
      }
      if (v < prev) {
        if (++bad >= 3 && v < best - log_drop) break;
      } else {
        bad = 0;
      }
      prev = v;
      if (!std::isfinite(v) && !std::isfinite(prev)) break;
    }
  }
  if (!std::isfinite(best)) return {0.0, 0.0, 0};

  double lo = best_u, hi = best_u;
  while (logf(lo) > best - log_drop && best_u - lo < scan_limit) lo -= scan_step;
  while (logf(hi) > best - log_drop && hi - best_u < scan_limit) hi += scan_step;

  const double shift = best;
  const Fn1 g = [&](double u) {
    const double v = logf(u) - shift;
    return v > -745.0 ? std::exp(v) : 0.0;
  };
  QuadResult q = integrate_gk(g, lo, hi, 0.0, rel_tol);
  q.value *= std::exp(shift);
  q.error *= std::exp(shift);
  return q;
}

QuadResult integrate_cone_1d_log(const Fn1& log_g, double x0, double rel_tol) {
  const Fn1 logf = [&](double u) { return log_g(std::exp(u)); };
  return integrate_exp_line(logf, std::log(x0), rel_tol);
}

QuadResult integrate_exp_plane(const std::function<double(double, double)>& logf,
                               double u0, double v0, double rel_tol,
                               double log_drop) {
  // Inner integral over v at fixed u; track the inner argmax to seed neighbours.
  double v_seed = v0;
  long evals = 0;
  double inner_err_max = 0.0;
  const Fn1 outer = [&](double u) {
    double vs = v_seed;
    const Fn1 inner_log = [&](double v) { return logf(u, v); };
    QuadResult q = integrate_exp_line(inner_log, vs, rel_tol * 0.1, log_drop);
    evals += q.evals;
    inner_err_max = std::max(inner_err_max, q.error);
    return q.value;
  };
  QuadResult q = integrate_exp_line(
      [&](double u) {
        const double val = outer(u);
        return val > 0.0 ? std::log(val) : -1e308;
      },
      u0, rel_tol, log_drop);
  q.evals += evals;
  q.error += inner_err_max;
  return q;
}

}  // namespace pdflow
