#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <vector>

namespace pdflow {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Parameter or domain violation (bad input, constraint not satisfied).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Runtime numerical failure (non-finite values, guard exhaustion, divergence).
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Dense real symmetric matrix. Construction stores the symmetric part, so
/// entries(i,j) == entries(j,i) holds exactly afterwards.
class SymMatrix {
 public:
  explicit SymMatrix(const Matrix& m);
  SymMatrix(int n, double diag);  // diag * I

  int dim() const { return static_cast<int>(m_.rows()); }
  const Matrix& mat() const { return m_; }
  double operator()(int i, int j) const { return m_(i, j); }

 private:
  Matrix m_;
};

struct EigDecomp {
  Vector eigenvalues;  // non-increasing
  Matrix frame;        // orthogonal, column k pairs with eigenvalues[k]
};

/// Symmetric eigendecomposition, eigenvalues sorted non-increasing.
EigDecomp eig_sym(const Matrix& x);
inline EigDecomp eig_sym(const SymMatrix& x) { return eig_sym(x.mat()); }

/// Point of the positive definite cone P. Construction runs a symmetric
/// eigendecomposition and rejects any eigenvalue <= 0; the decomposition is
/// cached for sqrt/inverse/log-det.
class PdMatrix {
 public:
  explicit PdMatrix(const Matrix& m);
  explicit PdMatrix(const SymMatrix& m) : PdMatrix(m.mat()) {}
  static PdMatrix identity(int n);
  static PdMatrix diagonal(const Vector& d);

  int dim() const { return static_cast<int>(m_.rows()); }
  const Matrix& mat() const { return m_; }
  const EigDecomp& eig() const { return eig_; }
  double operator()(int i, int j) const { return m_(i, j); }

  double min_eigenvalue() const { return eig_.eigenvalues(dim() - 1); }
  double log_det() const;
  double det() const { return std::exp(log_det()); }
  Matrix sqrt() const;       // unique positive square root
  Matrix inv_sqrt() const;
  Matrix inverse() const;
  Matrix power(double p) const;
  PdMatrix pd_inverse() const;

 private:
  Matrix m_;
  EigDecomp eig_;
};

/// Congruence action X[a] = a^t X a. Throws DomainError("degenerate congruence")
/// when a is numerically singular.
PdMatrix congruence(const PdMatrix& x, const Matrix& a);
Matrix congruence_sym(const Matrix& x, const Matrix& a);

/// Unique positive square root of X.
PdMatrix sqrt_pd(const PdMatrix& x);

/// Unique PD solution A of A X A = Y: A = X^{-1/2} (X^{1/2} Y X^{1/2})^{1/2} X^{-1/2}.
PdMatrix solve_quadratic_mean(const PdMatrix& x, const PdMatrix& y);

/// Density of the GL(n)-invariant measure against prod dx_{ij}: |X|^{-(n+1)/2}.
double invariant_density(const PdMatrix& x);

/// Matrix exponential of a general square matrix (scaling and squaring + series).
Matrix expm(const Matrix& a);

/// exp of a symmetric matrix through its eigendecomposition.
Matrix expm_sym(const Matrix& s);

/// log of a PD matrix.
Matrix logm_pd(const PdMatrix& x);

/// Upper-triangular g with positive diagonal such that W = g^t g.
Matrix upper_cholesky_factor(const PdMatrix& w);

bool is_finite(const Matrix& m);

/// Frobenius relative difference ||a-b||_F / max(||a||_F, ||b||_F, floor).
double rel_diff(const Matrix& a, const Matrix& b, double floor = 1e-300);
double rel_diff(double a, double b, double floor = 1e-300);

}  // namespace pdflow
