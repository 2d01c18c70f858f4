#include <cmath>

#include "doctest.h"
#include "pdflow/calculus.hpp"
#include "pdflow/experiments.hpp"
#include "pdflow/quad.hpp"
#include "pdflow/specfun.hpp"

using namespace pdflow;

namespace {
Matrix m1(double v) {
  Matrix m(1, 1);
  m(0, 0) = v;
  return m;
}
}  // namespace

TEST_CASE("quadrature basics") {
  // ∫_0^∞ x^3 e^{-x} dx = 6 against dx/x form
  const QuadResult q = integrate_cone_1d_log(
      [](double x) { return 4.0 * std::log(x) - x; }, 2.0);
  CHECK(q.value == doctest::Approx(6.0).epsilon(1e-9));

  // gaussian over the line
  const QuadResult g = integrate_exp_line(
      [](double u) { return -0.5 * u * u; }, 0.3);
  CHECK(g.value == doctest::Approx(std::sqrt(2.0 * M_PI)).epsilon(1e-9));

  // 2-d factorized gaussian
  const QuadResult p = integrate_exp_plane(
      [](double u, double v) { return -0.5 * (u * u + v * v) + u * v * 0.2; },
      0.0, 0.0, 1e-9);
  // covariance inverse [[1,-0.2],[-0.2,1]] : integral = 2π/sqrt(det) with det = 1-0.04
  CHECK(p.value ==
        doctest::Approx(2.0 * M_PI / std::sqrt(1.0 - 0.04)).epsilon(1e-7));
}

TEST_CASE("power function and gamma_n") {
  CHECK(power_fn(Vector::Constant(3, 0.7), Matrix::Identity(3, 3)) ==
        doctest::Approx(1.0));
  // n=1: x^s
  Vector s1(1);
  s1 << 1.3;
  CHECK(power_fn(s1, m1(2.0)) == doctest::Approx(std::pow(2.0, 1.3)));
  // n=2 diag(2,3), s=(1,1): 2 * 6
  Vector s2(2);
  s2 << 1.0, 1.0;
  Vector d(2);
  d << 2.0, 3.0;
  CHECK(power_fn(s2, Matrix(d.asDiagonal())) == doctest::Approx(12.0));

  // Γ_1((2)) = Γ(2) = 1
  Vector g1(1);
  g1 << 2.0;
  CHECK(gamma_n(g1) == doctest::Approx(1.0));
  // Γ_2((0, 3/2)) = sqrt(π) Γ(3/2) Γ(1) = π/2
  Vector g2(2);
  g2 << 0.0, 1.5;
  CHECK(gamma_n(g2) == doctest::Approx(M_PI / 2.0).epsilon(1e-12));
  // quadrature cross-check at n=1: ∫ x^s e^{-x} dx/x = Γ(s)
  const double s = 2.6;
  const QuadResult q = integrate_cone_1d_log(
      [&](double x) { return s * std::log(x) - x; }, s);
  CHECK(rel_diff(q.value, gamma_n_nu(1, s)) < 1e-9);
  // domain violation
  Vector bad(2);
  bad << 0.0, 0.2;
  CHECK_THROWS_AS(gamma_n(bad), DomainError);
}

TEST_CASE("lambda2 eigenvalue formula") {
  // n=1: λ2(s) = s^2
  Vector s1(1);
  s1 << 0.9;
  CHECK(lambda2(s1) == doctest::Approx(0.81));
  // n=2, s=(0,ν): λ2 = 2ν² (the (n-n³)/48 constant cancels the ±1/4 shifts)
  Vector s2(2);
  s2 << 0.0, 0.8;
  CHECK(lambda2(s2) == doctest::Approx(2.0 * 0.64).epsilon(1e-12));
}

TEST_CASE("spherical function") {
  RngStream rng(51, 0);
  Vector s(2);
  s << 0.4, -0.3;
  // h_s(I) = 1 exactly
  const McResult at_id = spherical_h(s, PdMatrix::identity(2), 200, rng);
  CHECK(at_id.value == doctest::Approx(1.0));
  CHECK(at_id.stderr_ == doctest::Approx(0.0));
  // n=1: h_s(x) = x^s
  Vector s1(1);
  s1 << 0.6;
  RngStream rng1(51, 1);
  CHECK(spherical_h(s1, PdMatrix(m1(1.7)), 10, rng1).value ==
        doctest::Approx(std::pow(1.7, 0.6)));
  // MC agrees with the deterministic n=2 angle quadrature
  const PdMatrix x = random_pd(2, rng);
  const double det_val = spherical_h_small(s, x);
  const McResult mc = spherical_h(s, x, 20000, rng);
  CHECK(std::abs(mc.value - det_val) < 4.0 * mc.stderr_ + 1e-9);

  // eigenfunction within MC error: Δ h_s = λ2(s) h_s
  const ScalarField h = [&](const Matrix& m) {
    return spherical_h_small(s, PdMatrix(m));
  };
  const double lap = laplacian_fd(h, x.mat());
  CHECK(rel_diff(lap, lambda2(s) * det_val) < 1e-5);
}

TEST_CASE("macdonald function") {
  // frozen reference: K_0(2) = 0.11389387274953343, so 2 K_0(2) ≈ 0.2278
  CHECK(macdonald_k(0.0, 2.0) == doctest::Approx(0.11389387274953343).epsilon(1e-10));
  // K_{1/2}(z) = sqrt(π/(2z)) e^{-z}
  for (double z : {0.5, 2.0, 10.0}) {
    CHECK(rel_diff(macdonald_k(0.5, z),
                   std::sqrt(M_PI / (2.0 * z)) * std::exp(-z)) < 1e-10);
  }
  // recurrence K_{ν+1} - K_{ν-1} = (2ν/z) K_ν
  const double nu = 0.8, z = 1.7;
  CHECK(rel_diff(macdonald_k(nu + 1.0, z) - macdonald_k(nu - 1.0, z),
                 2.0 * nu / z * macdonald_k(nu, z)) < 1e-9);
  CHECK(rel_diff(macdonald_k_scaled(nu, z), std::exp(z) * macdonald_k(nu, z)) <
        1e-12);
}

TEST_CASE("bessel n=1 reductions") {
  // B_0(1) = 2 K_0(2) ≈ 0.2278
  const IntegralResult b0 = bessel_B(0.0, PdMatrix(m1(1.0)));
  CHECK(b0.value == doctest::Approx(0.22778774549906687).epsilon(1e-8));
  // K_1(s|v,w) = 2 (w/v)^{s/2} K_s(2 sqrt(vw))
  const double s = 0.9, v = 1.4, w = 0.6;
  const IntegralResult k = bessel_K_nu(s, PdMatrix(m1(v)), PdMatrix(m1(w)));
  CHECK(rel_diff(k.value, 2.0 * std::pow(w / v, 0.5 * s) *
                              macdonald_k(s, 2.0 * std::sqrt(v * w))) < 1e-8);
  // B_{-ν}(x) = x^ν B_ν(x)
  const double nu = 0.7, x = 1.9;
  const IntegralResult bp = bessel_B(nu, PdMatrix(m1(x)));
  const IntegralResult bm = bessel_B(-nu, PdMatrix(m1(x)));
  CHECK(rel_diff(bm.value, std::pow(x, nu) * bp.value) < 1e-8);
}

TEST_CASE("bessel n=2 asymptotics (Laplace form)") {
  // B_ν(X) ≈ π^{n(n+1)/4} |S|^{-ν-1/2} Π_{i<j}(σ_i+σ_j)^{-1/2} e^{-2 tr S},
  // S = X^{1/2}; checked at n=1 exactly and n=2 within 5% at z=30
  const double nu = 0.5, z = 30.0;
  {
    const double x = z * z / 2.0;  // n=1, M=1
    const IntegralResult b = bessel_B(nu, PdMatrix(m1(x)));
    const double s = std::sqrt(x);
    const double ref =
        std::sqrt(M_PI) * std::pow(s, -nu - 0.5) * std::exp(-2.0 * s);
    CHECK(rel_diff(b.value, ref) < 0.05);
  }
  {
    Vector md(2);
    md << 1.0, 0.6;
    const Matrix m = md.asDiagonal();
    const PdMatrix x(z * z / 2.0 * m * m);
    BesselConfig cfg;
    cfg.haar_samples = 128;
    const IntegralResult b = bessel_B(nu, x, cfg);
    const PdMatrix s(x.sqrt());
    const double sig1 = s.eig().eigenvalues(0), sig2 = s.eig().eigenvalues(1);
    const double ref = std::pow(M_PI, 1.5) *
                       std::exp(-(nu + 0.5) * s.log_det()) /
                       std::sqrt(sig1 + sig2) * std::exp(-2.0 * (sig1 + sig2));
    CHECK(std::abs(b.value - ref) < 0.05 * ref + 3.0 * b.error);
  }
}

TEST_CASE("bessel n=3 importance sampling vs radial quadrature") {
  // K_3(ν|I,I): the integrand depends only on eigenvalues; a deterministic
  // 3-d eigenvalue-coordinate quadrature (with its own calibration of c_3)
  // provides the oracle.
  const double nu = 0.6;
  const auto radial3 = [&](const std::function<double(const Vector&)>& g,
                           double guess) {
    // iterated integrate_exp for u1; inner plane over (u2,u3)
    const auto logf = [&](double u1, double u2, double u3) {
      Vector a(3);
      a << std::exp(u1), std::exp(u2), std::exp(u3);
      const double gap = std::abs((a(0) - a(1)) * (a(0) - a(2)) * (a(1) - a(2)));
      if (gap == 0.0) return -1e308;
      return std::log(g(a)) + std::log(gap) - 1.0 * (u1 + u2 + u3);
      // a_i^{-(n-1)/2-1} da = a^{-2} da = e^{-u} du at n=3
    };
    const Fn1 outer = [&](double u1) {
      const QuadResult inner = integrate_exp_plane(
          [&](double u2, double u3) { return logf(u1, u2, u3); }, guess - 0.2,
          guess - 0.4, 1e-7);
      return inner.value > 0.0 ? std::log(inner.value) : -1e308;
    };
    return integrate_exp_line(outer, guess, 1e-7).value;
  };
  const double j_gamma = radial3(
      [&](const Vector& a) {
        return std::exp(2.0 * std::log(a.prod()) - a.sum());
      },
      0.5);
  const double c3 = gamma_n_nu(3, 2.0) / j_gamma;
  const double j_k = radial3(
      [&](const Vector& a) {
        return std::exp(nu * std::log(a.prod()) - a.sum() -
                        a.cwiseInverse().sum());
      },
      0.0);
  const double oracle = c3 * j_k;

  BesselConfig cfg;
  cfg.is_samples = 40000;
  const IntegralResult is =
      bessel_K_nu(nu, PdMatrix::identity(3), PdMatrix::identity(3), cfg);
  CHECK(std::abs(is.value - oracle) < 4.0 * is.error + 0.02 * oracle);
}

TEST_CASE("c_s constant") {
  // n=1: c = Γ(2μ), μ = -s; μ=1 -> 1
  Vector s1(1);
  s1 << -1.0;
  CHECK(c_s_formula(s1) == doctest::Approx(1.0));
  const IntegralResult q1 = c_s_quadrature(s1);
  CHECK(rel_diff(q1.value, 1.0) < 1e-8);

  // n=2: formula vs quadrature within 1e-3
  Vector s2(2);
  s2 << -0.4, -1.1;  // r = (s1+s2+1/4, s2-1/4) = (-1.25, -1.35): μ > 0
  const double formula = c_s_formula(s2);
  const IntegralResult quad = c_s_quadrature(s2);
  CHECK(rel_diff(quad.value, formula) < 1e-3);

  // divergence flagged when the domain condition fails
  Vector bad(1);
  bad << 0.5;
  CHECK_THROWS_AS(c_s_formula(bad), DomainError);
  CHECK_THROWS_AS(c_s_quadrature(bad), DomainError);
}
