#pragma once

#include "pdflow/specfun.hpp"
#include "pdflow/types.hpp"

namespace pdflow {

/// Triangular pattern {Y^m_i : 1 <= i <= m <= N} of PD matrices.
/// Mirrors the anchored domain when the top row equals a fixed X.
class TriangularArray {
 public:
  TriangularArray(int levels, int n);
  static TriangularArray anchored(const std::vector<PdMatrix>& top);

  int levels() const { return N_; }
  int n() const { return n_; }
  Matrix& y(int m, int i);              // 1-based, i <= m
  const Matrix& y(int m, int i) const;
  int particle_count() const { return N_ * (N_ + 1) / 2; }

  /// Flat index ordered by level then position (1,1),(1,2),(2,2),(1,3),...
  static int flat_index(int m, int i) { return m * (m - 1) / 2 + (i - 1); }

  void check_pd() const;  // throws if any entry leaves the cone

 private:
  int N_;
  int n_;
  std::vector<Matrix> ys_;
};

/// Interaction energy F(Y) = Σ_{1<=i<=m<N} tr[Y^m_i (Y^{m+1}_i)^{-1}] +
/// tr[Y^{m+1}_{i+1} (Y^m_i)^{-1}].
double whittaker_energy(const TriangularArray& y);

/// log e_λ(Y) with e_λ(Y) = e_{λ1}(Y^1) ∏_{m>=2} e_{λm}(Y^m) e_{-λm}(Y^{m-1}).
double log_e_lambda(const TriangularArray& y, const Vector& lambda);

/// F_λ(Y) = F(Y) - ln e_λ(Y).
double whittaker_energy_lambda(const TriangularArray& y, const Vector& lambda);

struct PsiConfig {
  double rel_tol = 1e-10;
  BesselConfig bessel;  // n=2 path
};

/// Whittaker function ψ_λ(X) by the kernel recursion:
/// n=1 supports N <= 3 (nested quadrature), n=2 supports N <= 2.
IntegralResult whittaker_psi(const Vector& lambda,
                             const std::vector<PdMatrix>& x,
                             const PsiConfig& cfg = {});

/// Closed form at n=1, N=2 through the Macdonald function:
/// ψ_λ(x1,x2) = 2 (x1 x2)^{λ2+α/2} K_α(2 sqrt(x2/x1)), α = λ1-λ2.
double log_whittaker_psi_n1_2(const Vector& lambda, double x1, double x2);

/// Kernel Q^{(N)}_ν(X,Y) in log form, X in P^N, Y in P^{N-1}.
double log_q_kernel(double nu, const std::vector<PdMatrix>& x,
                    const std::vector<PdMatrix>& y);

/// Whittaker measure density against μ_N (includes the Γ normalization):
/// ∏_{ij} Γ_n(λ_i+ν_j)^{-1} etr(-X_N^{-1}) ψ_{-λ}(X) ψ_{-ν}(X).
IntegralResult whittaker_density(const Vector& lambda, const Vector& nu,
                                 const std::vector<PdMatrix>& x,
                                 const PsiConfig& cfg = {});

/// Both sides of the Stade-type identity at n=1, N=2.
/// lhs: ∫_{P^2} x1^s etr(-x1/A) ψ_λ ψ_ν μ_2(dX) by quadrature,
/// rhs: Γ(s+a)/Γ(a) A^{s+a} ∏_{ij} Γ(λ_i+ν_j), a = Σ(λ_i+ν_i).
IntegralResult stade_lhs_n1_2(double s, double a_scale, const Vector& lambda,
                              const Vector& nu, double rel_tol = 1e-7);
double stade_rhs_n1_2(double s, double a_scale, const Vector& lambda,
                      const Vector& nu);

}  // namespace pdflow
