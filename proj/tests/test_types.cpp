#include "doctest.h"
#include "pdflow/experiments.hpp"
#include "pdflow/rng.hpp"
#include "pdflow/types.hpp"

using namespace pdflow;

TEST_CASE("congruence basics") {
  const PdMatrix eye = PdMatrix::identity(2);
  CHECK(rel_diff(congruence(eye, Matrix::Identity(2, 2)).mat(),
                 Matrix::Identity(2, 2)) < 1e-15);

  Matrix a(2, 2);
  a << 1.0, 2.0, 0.5, -1.0;
  CHECK(rel_diff(congruence(eye, a).mat(), Matrix(a.transpose() * a)) < 1e-14);

  // scalar: 3 * 4 * 3
  Matrix x(1, 1), s(1, 1);
  x << 4.0;
  s << 3.0;
  CHECK(congruence(PdMatrix(x), s)(0, 0) == doctest::Approx(36.0));

  CHECK_THROWS_AS(congruence(eye, Matrix::Zero(2, 2)), DomainError);
}

TEST_CASE("sqrt_pd reconstructs") {
  CHECK(rel_diff(sqrt_pd(PdMatrix::identity(3)).mat(), Matrix::Identity(3, 3)) <
        1e-14);

  Vector d(2);
  d << 4.0, 9.0;
  Vector expect(2);
  expect << 2.0, 3.0;
  CHECK(rel_diff(sqrt_pd(PdMatrix::diagonal(d)).mat(),
                 Matrix(expect.asDiagonal())) < 1e-14);

  RngStream rng(42, 0);
  for (int n = 1; n <= 4; ++n) {
    const PdMatrix x = random_pd(n, rng);
    const Matrix r = sqrt_pd(x).mat();
    CHECK(rel_diff(Matrix(r * r), x.mat()) < 1e-12);
  }
}

TEST_CASE("solve_quadratic_mean") {
  RngStream rng(7, 0);
  const PdMatrix y = random_pd(3, rng);
  // (I, Y) -> Y^{1/2}
  CHECK(rel_diff(solve_quadratic_mean(PdMatrix::identity(3), y).mat(),
                 y.sqrt()) < 1e-12);
  // (X, X) -> I
  const PdMatrix x = random_pd(3, rng);
  CHECK(rel_diff(solve_quadratic_mean(x, x).mat(), Matrix::Identity(3, 3)) <
        1e-12);
  // scalar: sqrt(9/4)
  Matrix x1(1, 1), y1(1, 1);
  x1 << 4.0;
  y1 << 9.0;
  CHECK(solve_quadratic_mean(PdMatrix(x1), PdMatrix(y1))(0, 0) ==
        doctest::Approx(1.5));
  // A X A = Y within 1e-10
  const PdMatrix y2 = random_pd(3, rng);
  const Matrix a = solve_quadratic_mean(x, y2).mat();
  CHECK(rel_diff(Matrix(a * x.mat() * a), y2.mat()) < 1e-10);
}

TEST_CASE("invariant density") {
  CHECK(invariant_density(PdMatrix::identity(3)) == doctest::Approx(1.0));
  Matrix x(1, 1);
  x << 4.0;
  CHECK(invariant_density(PdMatrix(x)) == doctest::Approx(0.25));
  Vector d(2);
  d << 2.0, 2.0;
  CHECK(invariant_density(PdMatrix::diagonal(d)) ==
        doctest::Approx(std::pow(4.0, -1.5)));
}

TEST_CASE("eig_sym invariants") {
  const EigDecomp id = eig_sym(Matrix::Identity(4, 4));
  for (int i = 0; i < 4; ++i) CHECK(id.eigenvalues(i) == doctest::Approx(1.0));

  Vector d(2);
  d << 3.0, 1.0;
  const EigDecomp diag = eig_sym(Matrix(d.asDiagonal()));
  CHECK(diag.eigenvalues(0) == doctest::Approx(3.0));
  CHECK(diag.eigenvalues(1) == doctest::Approx(1.0));

  RngStream rng(3, 0);
  for (int n = 2; n <= 4; ++n) {
    const Matrix s = rng.gaussian_sym(n);
    const EigDecomp e = eig_sym(s);
    CHECK(rel_diff(Matrix(e.frame * e.eigenvalues.asDiagonal() *
                          e.frame.transpose()),
                   s) < 1e-12);
    CHECK((e.frame.transpose() * e.frame - Matrix::Identity(n, n)).norm() <
          1e-12);
    for (int i = 1; i < n; ++i) CHECK(e.eigenvalues(i - 1) >= e.eigenvalues(i));
  }
}

TEST_CASE("PdMatrix rejects non-PD") {
  Matrix bad(2, 2);
  bad << 1.0, 2.0, 2.0, 1.0;  // eigenvalues 3, -1
  CHECK_THROWS_AS(PdMatrix{bad}, DomainError);
  CHECK_THROWS_AS(PdMatrix{Matrix::Zero(2, 2)}, DomainError);
}

TEST_CASE("expm agrees with symmetric eigen route") {
  RngStream rng(5, 0);
  for (int n = 1; n <= 3; ++n) {
    const Matrix s = 0.8 * rng.gaussian_sym(n);
    CHECK(rel_diff(expm(s), expm_sym(s)) < 1e-12);
    const Matrix b = rng.gaussian_matrix(n, n);
    // exp(b) exp(-b) = I
    CHECK(rel_diff(Matrix(expm(b) * expm(-b)), Matrix::Identity(n, n)) < 1e-12);
  }
}

TEST_CASE("upper cholesky factor") {
  RngStream rng(9, 0);
  const PdMatrix w = random_pd(3, rng);
  const Matrix g = upper_cholesky_factor(w);
  CHECK(rel_diff(Matrix(g.transpose() * g), w.mat()) < 1e-12);
  for (int i = 0; i < 3; ++i) {
    CHECK(g(i, i) > 0.0);
    for (int j = 0; j < i; ++j) CHECK(g(i, j) == 0.0);
  }
}
