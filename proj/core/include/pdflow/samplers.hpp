#pragma once

#include <optional>

#include "pdflow/rng.hpp"
#include "pdflow/types.hpp"

namespace pdflow {

/// Wishart parameters: scale Σ and degrees of freedom p > n-1.
struct WishartParams {
  PdMatrix sigma;
  double dof;
  void validate() const;
};

/// Matrix GIG parameters: density ∝ |X|^ν etr(-A X - B X^{-1}) μ(dX).
struct MatrixGigParams {
  double nu;
  PdMatrix a;
  PdMatrix b;
};

struct McmcConfig {
  int burn_in = 2000;
  int thin = 10;
  double initial_scale = 0.3;
  double target_accept = 0.3;
};

struct McmcDiagnostics {
  double acceptance_rate = 0.0;
  double ess = 0.0;
  bool acceptance_warning = false;
};

/// Haar-distributed orthogonal matrix (QR of a Gaussian matrix with sign fix).
Matrix sample_haar_orthogonal(int n, RngStream& rng);

/// Wishart draw. Integer p >= n uses the Gaussian rectangle Σ^{1/2}A^tAΣ^{1/2};
/// real p > n-1 uses the Bartlett construction (chi on the triangular diagonal).
PdMatrix sample_wishart(const WishartParams& params, RngStream& rng);

/// Inverse of a Wishart draw with the same parameters.
PdMatrix sample_inverse_wishart(const WishartParams& params, RngStream& rng);

/// Scalar generalized inverse Gaussian, density ∝ x^{lambda-1} e^{-(chi/x + psi x)/2},
/// sampled by ratio of uniforms with mode shift.
double sample_gig_1d(double lambda, double chi, double psi, RngStream& rng);

/// Random-walk Metropolis chain on S = log X targeting the matrix GIG law.
/// Proposal scale adapts toward target_accept during burn-in, then freezes.
class MatrixGigChain {
 public:
  MatrixGigChain(const MatrixGigParams& params, const McmcConfig& config,
                 RngStream rng);
  PdMatrix next();                       // advances thin steps
  const McmcDiagnostics& diagnostics() const { return diag_; }
  void update_diagnostics();             // acceptance + ESS of tr X so far

 private:
  double log_target(const Matrix& s, const EigDecomp& eig) const;
  void step();

  MatrixGigParams params_;
  McmcConfig config_;
  RngStream rng_;
  Matrix s_;
  double logp_;
  double scale_;
  long accepted_ = 0;
  long proposed_ = 0;
  std::vector<double> trace_;
  McmcDiagnostics diag_;
};

/// One matrix GIG draw (runs a fresh chain; prefer MatrixGigChain for many).
PdMatrix sample_matrix_gig(const MatrixGigParams& params, RngStream& rng,
                           const McmcConfig& config = {},
                           McmcDiagnostics* diag = nullptr);

/// Exact draw from the Markov kernel Π_a(X, dY), 2a > n-1:
/// Y = X^{1/2} W X^{1/2} with W Wishart(I/2, 2a).
PdMatrix sample_kernel_pi(double a, const PdMatrix& x, RngStream& rng);

}  // namespace pdflow
