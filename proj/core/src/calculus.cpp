#include "pdflow/calculus.hpp"

#include <cmath>

namespace pdflow {

namespace {

double eval_checked(const ScalarField& f, const Matrix& x) {
  const double v = f(x);
  if (!std::isfinite(v)) throw NumericError("evaluation failed");
  return v;
}

// Pair basis direction: E_ii for a==b, E_ab + E_ba otherwise.
Matrix pair_dir(int n, int a, int b) {
  Matrix e = Matrix::Zero(n, n);
  e(a, b) += 1.0;
  if (a != b) e(b, a) += 1.0;
  return e;
}

}  // namespace

SymMatrix matrix_grad_fd(const ScalarField& f, const Matrix& x, double h) {
  const int n = static_cast<int>(x.rows());
  Matrix g(n, n);
  for (int a = 0; a < n; ++a) {
    for (int b = a; b < n; ++b) {
      const Matrix e = pair_dir(n, a, b);
      const double fp = eval_checked(f, x + h * e);
      const double fm = eval_checked(f, x - h * e);
      const double d = (fp - fm) / (2.0 * h);      // pair derivative
      const double w = (a == b) ? 1.0 : 0.5;       // (1/2)(1+δ)
      g(a, b) = w * d;
      g(b, a) = g(a, b);
    }
  }
  return SymMatrix(g);
}

Matrix theta_fd(const ScalarField& f, const Matrix& x, double h) {
  return x * matrix_grad_fd(f, x, h).mat();
}

int CoordHessian::pair_index(int n, int a, int b) {
  if (a > b) std::swap(a, b);
  // row-major over pairs (a,b), a<=b
  return a * n - a * (a - 1) / 2 + (b - a);
}

double CoordHessian::at(int a, int b, int c, int d) const {
  const int dpairs = n * (n + 1) / 2;
  return h[pair_index(n, a, b) * dpairs + pair_index(n, c, d)];
}

CoordHessian coord_hessian_fd(const ScalarField& f, const Matrix& x, double h) {
  const int n = static_cast<int>(x.rows());
  const int d = n * (n + 1) / 2;
  CoordHessian out;
  out.n = n;
  out.h.assign(static_cast<size_t>(d) * d, 0.0);

  std::vector<Matrix> dirs;
  std::vector<double> w;
  dirs.reserve(d);
  for (int a = 0; a < n; ++a) {
    for (int b = a; b < n; ++b) {
      dirs.push_back(pair_dir(n, a, b));
      w.push_back((a == b) ? 1.0 : 0.5);
    }
  }

  const double f0 = eval_checked(f, x);
  std::vector<double> fp(d), fm(d);
  for (int i = 0; i < d; ++i) {
    fp[i] = eval_checked(f, x + h * dirs[i]);
    fm[i] = eval_checked(f, x - h * dirs[i]);
  }
  for (int i = 0; i < d; ++i) {
    // raw pair second derivative, then the two weights
    out.h[static_cast<size_t>(i) * d + i] =
        w[i] * w[i] * (fp[i] - 2.0 * f0 + fm[i]) / (h * h);
    for (int j = i + 1; j < d; ++j) {
      const double fpp = eval_checked(f, x + h * dirs[i] + h * dirs[j]);
      const double fpm = eval_checked(f, x + h * dirs[i] - h * dirs[j]);
      const double fmp = eval_checked(f, x - h * dirs[i] + h * dirs[j]);
      const double fmm = eval_checked(f, x - h * dirs[i] - h * dirs[j]);
      const double raw = (fpp - fpm - fmp + fmm) / (4.0 * h * h);
      const double v = w[i] * w[j] * raw;
      out.h[static_cast<size_t>(i) * d + j] = v;
      out.h[static_cast<size_t>(j) * d + i] = v;
    }
  }
  return out;
}

double laplacian_fd(const ScalarField& f, const Matrix& x, double h) {
  const int n = static_cast<int>(x.rows());
  const Matrix grad = matrix_grad_fd(f, x, h).mat();
  const CoordHessian hess = coord_hessian_fd(f, x, h);

  const double first = 0.5 * (n + 1.0) * (x * grad).trace();
  double second = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int l = 0; l < n; ++l)
        for (int m = 0; m < n; ++m)
          second += x(i, l) * x(j, m) * hess.at(l, j, m, i);
  return first + second;
}

double omega_fd(const ScalarField& f, const Matrix& x, double h) {
  const int n = static_cast<int>(x.rows());
  const Matrix grad = matrix_grad_fd(f, x, h).mat();
  const CoordHessian hess = coord_hessian_fd(f, x, h);
  const Matrix x2 = x * x;

  double second = 0.0;  // tr(X^2 ∂^2) = Σ_{ijk} (X^2)_ij ∂_jk ∂_ki
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        second += x2(i, j) * hess.at(j, k, k, i);
  const double first =
      0.5 * (x * grad).trace() + 0.5 * x.trace() * grad.trace();
  return second + first;
}

double bump(double t) {
  const double t2 = t * t;
  if (t2 >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - t2));
}

}  // namespace pdflow
