#include <cmath>

#include "doctest.h"
#include "pdflow/calculus.hpp"
#include "pdflow/experiments.hpp"
#include "pdflow/rng.hpp"

using namespace pdflow;

TEST_CASE("matrix gradient closed forms") {
  RngStream rng(11, 0);
  for (int n = 1; n <= 3; ++n) {
    const PdMatrix x = random_pd(n, rng);
    const PdMatrix a = random_pd(n, rng, 0.4);

    // theta tr(AX) = XA within 1e-6 at h=1e-5
    const ScalarField trax = [&](const Matrix& m) {
      return (a.mat() * m).trace();
    };
    CHECK(rel_diff(theta_fd(trax, x.mat()), Matrix(x.mat() * a.mat())) < 1e-6);

    // tr(X) at I: gradient is the identity
    if (n >= 2) {
      const ScalarField tr = [](const Matrix& m) { return m.trace(); };
      CHECK(rel_diff(matrix_grad_fd(tr, Matrix::Identity(n, n)).mat(),
                     Matrix::Identity(n, n)) < 1e-9);
    }

    // grad log|X| = X^{-1}
    const ScalarField logdet = [](const Matrix& m) {
      return PdMatrix(m).log_det();
    };
    CHECK(rel_diff(matrix_grad_fd(logdet, x.mat()).mat(), x.inverse()) < 1e-6);
  }
}

TEST_CASE("laplacian closed forms") {
  RngStream rng(12, 0);
  for (int n = 1; n <= 3; ++n) {
    const PdMatrix x = random_pd(n, rng);
    const PdMatrix a = random_pd(n, rng, 0.4);

    const ScalarField trax = [&](const Matrix& m) {
      return (a.mat() * m).trace();
    };
    CHECK(rel_diff(laplacian_fd(trax, x.mat()),
                   0.5 * (n + 1.0) * trax(x.mat())) < 1e-5);

    const ScalarField logdet = [](const Matrix& m) {
      return PdMatrix(m).log_det();
    };
    const PdMatrix xm = random_pd(n, rng, 0.25);
    CHECK(std::abs(laplacian_fd(logdet, xm.mat())) < 1e-6);

    // tr X^2: (k=2 power formula) 2 tr X^2 + tr X tr X + n tr X^2
    const ScalarField tr2 = [](const Matrix& m) { return (m * m).trace(); };
    const double t1 = x.mat().trace();
    const double t2 = (x.mat() * x.mat()).trace();
    CHECK(rel_diff(laplacian_fd(tr2, x.mat()), 2.0 * t2 + t1 * t1 + n * t2) <
          1e-5);
  }
  // n=1 scalar form x^2 f'' + x f'
  const ScalarField cube = [](const Matrix& m) {
    return m(0, 0) * m(0, 0) * m(0, 0);
  };
  Matrix x1(1, 1);
  x1 << 1.7;
  const double expect = 1.7 * 1.7 * (6.0 * 1.7) + 1.7 * (3.0 * 1.7 * 1.7);
  CHECK(rel_diff(laplacian_fd(cube, x1), expect) < 1e-7);
}

TEST_CASE("omega operator") {
  RngStream rng(13, 0);
  const int n = 2;
  const PdMatrix x = random_pd(n, rng);
  const PdMatrix y = random_pd(n, rng);

  // agrees with the Laplacian on radial functions tr X^k
  for (int k = 1; k <= 3; ++k) {
    const ScalarField trk = [&](const Matrix& m) {
      Matrix p = m;
      for (int i = 1; i < k; ++i) p = p * m;
      return p.trace();
    };
    CHECK(rel_diff(omega_fd(trk, x.mat()), laplacian_fd(trk, x.mat())) < 1e-5);
  }

  // Omega_X k = Omega_Y k for k(X,Y) = etr(-Y X^{-1})
  const ScalarField k_x = [&](const Matrix& m) {
    return std::exp(-(y.mat() * PdMatrix(m).inverse()).trace());
  };
  const ScalarField k_y = [&](const Matrix& m) {
    return std::exp(-(m * x.inverse()).trace());
  };
  CHECK(rel_diff(omega_fd(k_x, x.mat()), omega_fd(k_y, y.mat())) < 1e-4);

  // product rule: Ω(fg) = (Ωf)g + f(Ωg) + tr[X^2 ∂f ∂g] + tr[X^2 ∂g ∂f]
  const ScalarField f = [&](const Matrix& m) { return (y.mat() * m).trace(); };
  const ScalarField g = [](const Matrix& m) { return (m * m).trace(); };
  const ScalarField fg = [&](const Matrix& m) { return f(m) * g(m); };
  const Matrix df = matrix_grad_fd(f, x.mat()).mat();
  const Matrix dg = matrix_grad_fd(g, x.mat()).mat();
  const Matrix x2 = x.mat() * x.mat();
  const double rhs = omega_fd(f, x.mat()) * g(x.mat()) +
                     f(x.mat()) * omega_fd(g, x.mat()) +
                     (x2 * df * dg).trace() + (x2 * dg * df).trace();
  CHECK(rel_diff(omega_fd(fg, x.mat()), rhs) < 1e-5);

  // inversion invariance of Omega
  const ScalarField q = [&](const Matrix& m) {
    return (y.mat() * m).trace() + 0.5 * (m * m).trace();
  };
  const ScalarField qinv = [&](const Matrix& m) {
    return q(PdMatrix(m).inverse());
  };
  CHECK(rel_diff(omega_fd(q, x.inverse()), omega_fd(qinv, x.mat())) < 1e-4);
}

TEST_CASE("evaluation failure surfaces as NumericError") {
  const ScalarField bad = [](const Matrix&) {
    return std::numeric_limits<double>::quiet_NaN();
  };
  CHECK_THROWS_AS(matrix_grad_fd(bad, Matrix::Identity(2, 2)), NumericError);
  CHECK_THROWS_AS(laplacian_fd(bad, Matrix::Identity(2, 2)), NumericError);
}
