#pragma once

#include <functional>

#include "pdflow/types.hpp"

namespace pdflow {

/// Scalar field on symmetric matrices. The argument is always exactly symmetric.
using ScalarField = std::function<double(const Matrix&)>;

/// Step defaults: h1 for first-order differences, h2 for second-order.
struct FdSteps {
  double h1 = 1e-5;
  double h2 = 1e-4;
};

/// Central-difference realization of the matrix derivative
/// ∂_X = ((1/2)(1+δ_ij) ∂/∂x_ij); off-diagonal perturbations move x_{ij} and
/// x_{ji} together. Throws NumericError("evaluation failed") on non-finite f.
SymMatrix matrix_grad_fd(const ScalarField& f, const Matrix& x, double h = 1e-5);

/// theta_X f = X ∂_X f.
Matrix theta_fd(const ScalarField& f, const Matrix& x, double h = 1e-5);

/// Weighted coordinate Hessian: entry [(a,b),(c,d)] = ∂_ab ∂_cd f with the same
/// (1/2)(1+δ) weighting as matrix_grad_fd, stored on pair indices a<=b, c<=d.
struct CoordHessian {
  int n = 0;
  std::vector<double> h;  // d*d entries, d = n(n+1)/2, pair-major
  double at(int a, int b, int c, int d) const;  // any index order
  static int pair_index(int n, int a, int b);
};
CoordHessian coord_hessian_fd(const ScalarField& f, const Matrix& x, double h = 1e-4);

/// Laplacian Δ_X f = tr((X ∂_X)^2) f, assembled as
/// (n+1)/2 tr(X ∂f) + Σ_{ijlm} X_il X_jm ∂_lj ∂_mi f.
double laplacian_fd(const ScalarField& f, const Matrix& x, double h = 1e-4);

/// The O(n)-invariant operator Ω_X = tr(X^2 ∂^2) + (1/2) tr(X∂) + (1/2) tr X tr ∂.
double omega_fd(const ScalarField& f, const Matrix& x, double h = 1e-4);

/// Smooth compactly supported bump, value exp(-1/(1-t^2)) normalized to 1 at
/// t=0, zero for |t| >= 1.
double bump(double t);

}  // namespace pdflow
