#pragma once

#include "pdflow/quad.hpp"
#include "pdflow/rng.hpp"
#include "pdflow/types.hpp"

namespace pdflow {

/// Power function p_s(X) = prod_k |X^(k)|^{s_k} over leading corners.
double power_fn(const Vector& s, const Matrix& x);
double log_power_fn(const Vector& s, const Matrix& x);

/// Convergence condition 2(s_k + ... + s_n) > k-1 for every k.
bool gamma_condition(const Vector& s);

/// Γ_n(s) by the closed product formula; throws DomainError when the
/// convergence condition fails.
double gamma_n(const Vector& s);
double log_gamma_n(const Vector& s);
/// Γ_n(ν) = Γ_n((0,...,0,ν)).
double gamma_n_nu(int n, double nu);
double log_gamma_n_nu(int n, double nu);

/// Eigenvalue of the Laplacian on p_s:
/// λ₂(s) = Σ r_i² + (n-n³)/48,  r_i = s_i+...+s_n + (n+1-2i)/4.
double lambda2(const Vector& s);

struct McResult {
  double value = 0.0;
  double stderr_ = 0.0;
};

/// Spherical function h_s(X) by Haar Monte Carlo over O(n).
McResult spherical_h(const Vector& s, const PdMatrix& x, int mc_samples,
                     RngStream& rng);

/// Deterministic h_s for n <= 2 (n=1 trivial, n=2 by angle quadrature).
double spherical_h_small(const Vector& s, const PdMatrix& x);

struct IntegralResult {
  double value = 0.0;
  double error = 0.0;  // combined quadrature/MC error estimate
};

enum class BesselMethod { AUTO, QUAD_1D, EIG_QUAD_HAAR, IMPORTANCE_MC };

struct BesselConfig {
  BesselMethod method = BesselMethod::AUTO;
  double rel_tol = 1e-10;      // 1-d quadrature
  double plane_tol = 1e-7;     // 2-d quadrature
  int haar_samples = 256;      // n=2 frame average
  int is_samples = 20000;      // n=3 importance sampling
  std::uint64_t seed = 0x9e1507;
};

/// Matrix K-Bessel K_n(s|V,W) = ∫_P p_s(Y) etr(-VY - WY^{-1}) μ(dY).
/// n=1 adaptive quadrature; n=2 eigenvalue-coordinate quadrature with Haar MC
/// over the frame; n=3 importance sampling with a GIG-shaped mixture proposal.
IntegralResult bessel_K(const Vector& s, const PdMatrix& v, const PdMatrix& w,
                        const BesselConfig& cfg = {});
IntegralResult bessel_K_nu(double nu, const PdMatrix& v, const PdMatrix& w,
                           const BesselConfig& cfg = {});

/// B_ν(X) = K_n(ν | X, I).
IntegralResult bessel_B(double nu, const PdMatrix& x,
                        const BesselConfig& cfg = {});

/// Scalar Macdonald function K_ν(z) (cosh-integral representation) and the
/// exponentially scaled variant e^z K_ν(z).
double macdonald_k(double nu, double z);
double macdonald_k_scaled(double nu, double z);
/// d/dz log K_ν(z) = -(K_{ν-1}(z) + K_{ν+1}(z)) / (2 K_ν(z)).
double macdonald_dlog(double nu, double z);

/// c_s = ∫_P h_s(A²) etr(-A^{-1}) μ(dA); finite iff all μ_i = -r_i > 0.
/// Product formula c_s = ∏ Γ(2μ_i) ∏_{i<j} B(1/2, μ_i+μ_j), stated for n <= 3.
double c_s_formula(const Vector& s);
/// Numeric integral for n <= 2.
IntegralResult c_s_quadrature(const Vector& s);

/// Eigenvalue-coordinate normalization c_n of the invariant measure, fixed by
/// calibration against Γ_n closed forms (n <= 3 supported).
double eigen_coord_constant(int n);

double log_beta_fn(double a, double b);

}  // namespace pdflow
