#include <cmath>

#include "doctest.h"
#include "pdflow/experiments.hpp"
#include "pdflow/quad.hpp"
#include "pdflow/samplers.hpp"
#include "pdflow/stats.hpp"

using namespace pdflow;

TEST_CASE("rng reproducibility and stream independence") {
  RngStream a(123, 5), b(123, 5), c(123, 6);
  std::vector<double> xa, xb, xc;
  for (int i = 0; i < 200; ++i) {
    xa.push_back(a.normal());
    xb.push_back(b.normal());
    xc.push_back(c.normal());
  }
  CHECK(xa == xb);
  CHECK(xa != xc);
  double corr = 0.0;
  for (int i = 0; i < 200; ++i) corr += xa[i] * xc[i];
  CHECK(std::abs(corr / 200.0) < 0.2);
}

TEST_CASE("gamma sampler moments") {
  RngStream rng(17, 0);
  for (double shape : {0.5, 1.3, 4.0}) {
    double sum = 0.0, sq = 0.0;
    const int m = 40000;
    for (int i = 0; i < m; ++i) {
      const double g = rng.gamma(shape);
      sum += g;
      sq += g * g;
    }
    const double mean = sum / m;
    const double var = sq / m - mean * mean;
    CHECK(std::abs(mean - shape) < 4.0 * std::sqrt(shape / m) + 2e-2);
    CHECK(std::abs(var - shape) < 0.12 * shape + 5e-2);
  }
}

TEST_CASE("haar orthogonal sampler") {
  RngStream rng(19, 0);
  // O(1) = {±1} with equal probability
  int plus = 0;
  const int m = 10000;
  for (int i = 0; i < m; ++i) {
    if (sample_haar_orthogonal(1, rng)(0, 0) > 0.0) ++plus;
  }
  CHECK(std::abs(plus / double(m) - 0.5) < 0.02);

  // orthogonality and mean zero
  Matrix mean = Matrix::Zero(3, 3);
  for (int i = 0; i < 4000; ++i) {
    const Matrix q = sample_haar_orthogonal(3, rng);
    CHECK((q.transpose() * q - Matrix::Identity(3, 3)).norm() < 1e-12);
    mean += q;
  }
  mean /= 4000.0;
  CHECK(mean.cwiseAbs().maxCoeff() < 3.0 * std::sqrt(1.0 / 3.0 / 4000.0) + 0.02);

  // left-invariance: fixed rotation of the draws keeps tr-distribution
  RngStream rng2(19, 1);
  const Matrix fixed = sample_haar_orthogonal(3, rng2);
  std::vector<double> tr_plain, tr_rotated;
  for (int i = 0; i < 4000; ++i) {
    tr_plain.push_back(sample_haar_orthogonal(3, rng2).trace());
    tr_rotated.push_back((fixed * sample_haar_orthogonal(3, rng2)).trace());
  }
  CHECK(ks_p_value(ks_statistic(tr_plain, tr_rotated), 4000, 4000) > 0.01);
}

TEST_CASE("wishart mean p*Sigma and PD") {
  RngStream rng(23, 0);
  // n=1, Sigma=1/2, p=4: mean 2
  {
    Matrix half(1, 1);
    half << 0.5;
    const WishartParams wp{PdMatrix(half), 4.0};
    double sum = 0.0, sq = 0.0;
    const int m = 20000;
    for (int i = 0; i < m; ++i) {
      const double w = sample_wishart(wp, rng)(0, 0);
      sum += w;
      sq += w * w;
    }
    const double mean = sum / m;
    const double se = std::sqrt((sq / m - mean * mean) / m);
    CHECK(std::abs(mean - 2.0) < 3.0 * se);
  }
  // Sigma = I/2, p = 2*1.7 (Bartlett path): mean = 1.7 I
  {
    const int n = 2;
    const WishartParams wp{PdMatrix(0.5 * Matrix::Identity(n, n)), 3.4};
    Matrix mean = Matrix::Zero(n, n);
    const int m = 20000;
    for (int i = 0; i < m; ++i) mean += sample_wishart(wp, rng).mat();
    mean /= double(m);
    CHECK((mean - 1.7 * Matrix::Identity(n, n)).cwiseAbs().maxCoeff() < 0.06);
  }
}

TEST_CASE("inverse wishart consistency with wishart") {
  RngStream rng(29, 0);
  const int n = 2;
  const WishartParams wp{random_pd(n, rng), 5.0};
  std::vector<double> tr_direct, tr_inverted, ld_direct, ld_inverted;
  for (int i = 0; i < 4000; ++i) {
    tr_direct.push_back(sample_wishart(wp, rng).mat().trace());
    ld_direct.push_back(sample_wishart(wp, rng).log_det());
    const PdMatrix iw = sample_inverse_wishart(wp, rng);
    tr_inverted.push_back(iw.pd_inverse().mat().trace());
    ld_inverted.push_back(-iw.log_det());
  }
  CHECK(ks_p_value(ks_statistic(tr_direct, tr_inverted), 4000, 4000) > 0.01);
  CHECK(ks_p_value(ks_statistic(ld_direct, ld_inverted), 4000, 4000) > 0.01);
}

TEST_CASE("scalar inverse wishart matches inverse gamma moments") {
  RngStream rng(31, 0);
  // n=1, Sigma=1/2, p=2ν ⇒ X^{-1} ~ Gamma(ν, 1): E X^{-1} = ν, E X = 1/(ν-1)
  const double nu = 3.0;
  Matrix half(1, 1);
  half << 0.5;
  const WishartParams wp{PdMatrix(half), 2.0 * nu};
  double s_inv = 0.0, s_x = 0.0;
  const int m = 40000;
  for (int i = 0; i < m; ++i) {
    const double x = sample_inverse_wishart(wp, rng)(0, 0);
    s_inv += 1.0 / x;
    s_x += x;
  }
  CHECK(std::abs(s_inv / m - nu) < 0.05);
  CHECK(std::abs(s_x / m - 1.0 / (nu - 1.0)) < 0.02);
}

TEST_CASE("scalar gig sampler matches quadrature moments") {
  RngStream rng(37, 0);
  const double lambda = 0.8, chi = 2.0, psi = 3.0;
  const Fn1 logf = [&](double x) {
    return (lambda - 1.0) * std::log(x) - 0.5 * (chi / x + psi * x);
  };
  const double z = integrate_gk([&](double x) { return std::exp(logf(x)); },
                                1e-6, 60.0, 0.0, 1e-12)
                       .value;
  const double m1 = integrate_gk(
                        [&](double x) { return x * std::exp(logf(x)); }, 1e-6,
                        60.0, 0.0, 1e-12)
                        .value /
                    z;
  const double m2 = integrate_gk(
                        [&](double x) { return x * x * std::exp(logf(x)); },
                        1e-6, 60.0, 0.0, 1e-12)
                        .value /
                    z;
  double sum = 0.0, sq = 0.0;
  const int m = 60000;
  for (int i = 0; i < m; ++i) {
    const double x = sample_gig_1d(lambda, chi, psi, rng);
    sum += x;
    sq += x * x;
  }
  const double se1 = std::sqrt((m2 - m1 * m1) / m);
  CHECK(std::abs(sum / m - m1) < 4.0 * se1);
  CHECK(std::abs(sq / m - m2) / m2 < 0.05);
}

TEST_CASE("matrix gig mcmc matches scalar gig at n=1") {
  RngStream rng(41, 0);
  Matrix a(1, 1), b(1, 1);
  a << 1.5;
  b << 1.0;
  // matrix law |X|^ν etr(-AX - BX^{-1})μ(dX) at n=1 is GIG(ν, 2b, 2a)
  const MatrixGigParams params{0.7, PdMatrix(a), PdMatrix(b)};
  McmcConfig cfg;
  cfg.burn_in = 3000;
  cfg.thin = 10;
  MatrixGigChain chain(params, cfg, RngStream(41, 1));
  std::vector<double> mcmc;
  for (int i = 0; i < 3000; ++i) mcmc.push_back(chain.next()(0, 0));
  chain.update_diagnostics();
  CHECK(chain.diagnostics().acceptance_rate > 0.1);
  CHECK(chain.diagnostics().acceptance_rate < 0.7);
  CHECK(chain.diagnostics().ess > 200.0);

  std::vector<double> exact;
  for (int i = 0; i < 3000; ++i)
    exact.push_back(sample_gig_1d(params.nu, 2.0 * b(0, 0), 2.0 * a(0, 0), rng));
  CHECK(ks_p_value(ks_statistic(mcmc, exact), mcmc.size(), exact.size()) > 0.01);
}

TEST_CASE("kernel pi sampler") {
  RngStream rng(43, 0);
  // n=1, a=2, x=1: density y^2 e^{-y} / (Γ(2) y): mean by quadrature
  {
    Matrix one(1, 1);
    one << 1.0;
    const double z =
        integrate_gk([](double y) { return y * std::exp(-y); }, 0.0, 80.0, 0.0,
                     1e-12)
            .value;
    const double mean_ref = integrate_gk([](double y) { return y * y *
                                                              std::exp(-y); },
                                         0.0, 80.0, 0.0, 1e-12)
                                .value /
                            z;
    double sum = 0.0, sq = 0.0;
    const int m = 20000;
    for (int i = 0; i < m; ++i) {
      const double y = sample_kernel_pi(2.0, PdMatrix(one), rng)(0, 0);
      sum += y;
      sq += y * y;
    }
    const double se = std::sqrt((sq / m - sum / m * sum / m) / m);
    CHECK(std::abs(sum / m - mean_ref) < 3.0 * se);
    CHECK(mean_ref == doctest::Approx(2.0));
  }
  // conditional invariance: X^{-1/2} Y X^{-1/2} has an X-independent law
  {
    const int n = 2;
    RngStream r1(43, 1), r2(43, 2);
    const PdMatrix xa = random_pd(n, r1);
    const PdMatrix xb = random_pd(n, r1);
    std::vector<double> ta, tb;
    for (int i = 0; i < 4000; ++i) {
      const PdMatrix ya = sample_kernel_pi(1.5, xa, r1);
      const PdMatrix yb = sample_kernel_pi(1.5, xb, r2);
      ta.push_back((xa.inv_sqrt() * ya.mat() * xa.inv_sqrt()).trace());
      tb.push_back((xb.inv_sqrt() * yb.mat() * xb.inv_sqrt()).trace());
    }
    CHECK(ks_p_value(ks_statistic(ta, tb), ta.size(), tb.size()) > 0.01);
  }
  CHECK_THROWS_AS(sample_kernel_pi(0.4, PdMatrix::identity(2), rng),
                  DomainError);
}

TEST_CASE("wishart rejects p <= n-1") {
  RngStream rng(1, 1);
  CHECK_THROWS_AS(sample_wishart(WishartParams{PdMatrix::identity(3), 1.9}, rng),
                  DomainError);
}
