#include "pdflow/types.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

namespace pdflow {

SymMatrix::SymMatrix(const Matrix& m) {
  if (m.rows() != m.cols() || m.rows() < 1) {
    throw DomainError("SymMatrix: square matrix required");
  }
  const int n = static_cast<int>(m.rows());
  m_.resize(n, n);
  for (int i = 0; i < n; ++i) {
    m_(i, i) = m(i, i);
    for (int j = i + 1; j < n; ++j) {
      const double v = 0.5 * (m(i, j) + m(j, i));
      m_(i, j) = v;
      m_(j, i) = v;
    }
  }
  if (!is_finite(m_)) throw DomainError("SymMatrix: non-finite entries");
}

SymMatrix::SymMatrix(int n, double diag) : m_(Matrix::Identity(n, n) * diag) {}

EigDecomp eig_sym(const Matrix& x) {
  Eigen::SelfAdjointEigenSolver<Matrix> solver(x);
  if (solver.info() != Eigen::Success) {
    throw NumericError("eig_sym: iteration failure, ||X||_F = " +
                       std::to_string(x.norm()));
  }
  const int n = static_cast<int>(x.rows());
  EigDecomp d;
  d.eigenvalues.resize(n);
  d.frame.resize(n, n);
  // Eigen sorts increasing; flip to non-increasing.
  for (int k = 0; k < n; ++k) {
    d.eigenvalues(k) = solver.eigenvalues()(n - 1 - k);
    d.frame.col(k) = solver.eigenvectors().col(n - 1 - k);
  }
  return d;
}

PdMatrix::PdMatrix(const Matrix& m) : m_(SymMatrix(m).mat()), eig_(eig_sym(m_)) {
  if (min_eigenvalue() <= 0.0) {
    throw DomainError("PdMatrix: not positive definite (min eigenvalue " +
                      std::to_string(min_eigenvalue()) + ")");
  }
}

PdMatrix PdMatrix::identity(int n) { return PdMatrix(Matrix::Identity(n, n)); }

PdMatrix PdMatrix::diagonal(const Vector& d) {
  Matrix m = Matrix::Zero(d.size(), d.size());
  m.diagonal() = d;
  return PdMatrix(m);
}

double PdMatrix::log_det() const {
  return eig_.eigenvalues.array().log().sum();
}

Matrix PdMatrix::power(double p) const {
  const Vector lam = eig_.eigenvalues.array().pow(p);
  return eig_.frame * lam.asDiagonal() * eig_.frame.transpose();
}

Matrix PdMatrix::sqrt() const { return power(0.5); }
Matrix PdMatrix::inv_sqrt() const { return power(-0.5); }
Matrix PdMatrix::inverse() const { return power(-1.0); }
PdMatrix PdMatrix::pd_inverse() const { return PdMatrix(inverse()); }

PdMatrix congruence(const PdMatrix& x, const Matrix& a) {
  if (a.rows() != a.cols() || a.rows() != x.dim()) {
    throw DomainError("congruence: dimension mismatch");
  }
  Eigen::FullPivLU<Matrix> lu(a);
  lu.setThreshold(1e-12);
  if (!lu.isInvertible()) throw DomainError("degenerate congruence");
  return PdMatrix(a.transpose() * x.mat() * a);
}

Matrix congruence_sym(const Matrix& x, const Matrix& a) {
  return a.transpose() * x * a;
}

PdMatrix sqrt_pd(const PdMatrix& x) { return PdMatrix(x.sqrt()); }

PdMatrix solve_quadratic_mean(const PdMatrix& x, const PdMatrix& y) {
  if (x.dim() != y.dim()) throw DomainError("solve_quadratic_mean: dimension mismatch");
  const Matrix xs = x.sqrt();
  const Matrix xis = x.inv_sqrt();
  const PdMatrix inner(xs * y.mat() * xs);
  return PdMatrix(xis * inner.sqrt() * xis);
}

double invariant_density(const PdMatrix& x) {
  const double n = x.dim();
  return std::exp(-0.5 * (n + 1.0) * x.log_det());
}

Matrix expm(const Matrix& a) {
  const int n = static_cast<int>(a.rows());
  double nrm = a.cwiseAbs().rowwise().sum().maxCoeff();  // inf-norm
  int squarings = 0;
  Matrix b = a;
  if (nrm > 0.25) {
    squarings = static_cast<int>(std::ceil(std::log2(nrm / 0.25)));
    b /= std::pow(2.0, squarings);
  }
  // 12-term Taylor on the scaled matrix: ||b|| <= 0.25 gives ~1e-17 truncation.
  Matrix result = Matrix::Identity(n, n);
  Matrix term = Matrix::Identity(n, n);
  for (int k = 1; k <= 12; ++k) {
    term = term * b / static_cast<double>(k);
    result += term;
  }
  for (int s = 0; s < squarings; ++s) result = result * result;
  return result;
}

Matrix expm_sym(const Matrix& s) {
  const EigDecomp d = eig_sym(s);
  const Vector lam = d.eigenvalues.array().exp();
  return d.frame * lam.asDiagonal() * d.frame.transpose();
}

Matrix logm_pd(const PdMatrix& x) {
  const Vector lam = x.eig().eigenvalues.array().log();
  return x.eig().frame * lam.asDiagonal() * x.eig().frame.transpose();
}

Matrix upper_cholesky_factor(const PdMatrix& w) {
  // W = L L^t with L lower triangular, positive diagonal; g = L^t is upper
  // triangular with W = g^t g.
  Eigen::LLT<Matrix> llt(w.mat());
  if (llt.info() != Eigen::Success) throw NumericError("cholesky failed");
  return Matrix(llt.matrixL()).transpose();
}

bool is_finite(const Matrix& m) { return m.allFinite(); }

double rel_diff(const Matrix& a, const Matrix& b, double floor) {
  const double scale = std::max({a.norm(), b.norm(), floor});
  return (a - b).norm() / scale;
}

double rel_diff(double a, double b, double floor) {
  const double scale = std::max({std::abs(a), std::abs(b), floor});
  return std::abs(a - b) / scale;
}

}  // namespace pdflow
