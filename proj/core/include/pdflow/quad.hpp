#pragma once

#include <functional>

#include "pdflow/types.hpp"

namespace pdflow {

struct QuadResult {
  double value = 0.0;
  double error = 0.0;  // absolute error estimate
  long evals = 0;
};

using Fn1 = std::function<double(double)>;

/// Adaptive Gauss-Kronrod 7/15 on [a, b].
QuadResult integrate_gk(const Fn1& f, double a, double b, double abs_tol = 0.0,
                        double rel_tol = 1e-10, int max_intervals = 4000);

/// Integrate exp(logf(u)) du over the real line. logf must be continuous,
/// -inf allowed, with a single dominant region reachable from u0 by scanning.
/// Window grows until logf drops log_drop below its running maximum.
QuadResult integrate_exp_line(const Fn1& logf, double u0, double rel_tol = 1e-10,
                              double log_drop = 60.0, double scan_step = 0.5,
                              double scan_limit = 400.0);

/// Integral over the cone (0,inf) of g against the measure dx/x (n=1 invariant
/// measure): substitutes x = e^u and calls integrate_exp_line on log g(e^u).
QuadResult integrate_cone_1d_log(const Fn1& log_g, double x0 = 1.0,
                                 double rel_tol = 1e-10);

/// Iterated 2-d version of integrate_exp_line: u integral outer, v inner.
QuadResult integrate_exp_plane(const std::function<double(double, double)>& logf,
                               double u0, double v0, double rel_tol = 1e-8,
                               double log_drop = 46.0);

}  // namespace pdflow
