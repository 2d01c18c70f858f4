#include <cmath>

#include "doctest.h"
#include "pdflow/experiments.hpp"
#include "pdflow/sde.hpp"
#include "pdflow/stats.hpp"
#include "pdflow/specfun.hpp"
#include "pdflow/toda.hpp"

using namespace pdflow;

namespace {
Matrix m1(double v) {
  Matrix m(1, 1);
  m(0, 0) = v;
  return m;
}
}  // namespace

TEST_CASE("drift fields match the generators") {
  RngStream rng(71, 0);
  const int n = 2;
  // Doob transform of det power: a(X) = 2νX
  {
    SystemSpec spec;
    spec.kind = SystemKind::DOOB_BM;
    spec.n = n;
    spec.nu = 0.7;
    const PdMatrix x = random_pd(n, rng);
    const std::vector<Matrix> a = drift_field(spec, {x.mat()});
    CHECK(rel_diff(a[0], Matrix(1.4 * x.mat())) < 1e-14);
  }
  // Burke pair: a_X = 2Y + 2νX, a_Y = 2λY
  {
    SystemSpec spec;
    spec.kind = SystemKind::BURKE_PAIR;
    spec.n = n;
    spec.lambda = 1.0;
    spec.nu = -1.0;
    const PdMatrix x = random_pd(n, rng);
    const PdMatrix y = random_pd(n, rng);
    const std::vector<Matrix> a = drift_field(spec, {x.mat(), y.mat()});
    CHECK(rel_diff(a[0], Matrix(2.0 * y.mat() - 2.0 * x.mat())) < 1e-14);
    CHECK(rel_diff(a[1], Matrix(2.0 * y.mat())) < 1e-14);
  }
  // dimension mismatch
  {
    SystemSpec spec;
    spec.kind = SystemKind::CHAIN;
    spec.n = n;
    spec.N = 2;
    spec.lambda_vec = Vector::Zero(2);
    CHECK_THROWS_AS(drift_field(spec, {Matrix::Identity(2, 2)}), DomainError);
  }
  // power-function drift: a = 2 X (∂ log p_s) X against finite differences
  {
    SystemSpec spec;
    spec.kind = SystemKind::DOOB_BM;
    spec.n = n;
    spec.phi = DriftTag::POWER_S;
    Vector s(n);
    s << 0.6, -0.3;
    spec.s = s;
    const PdMatrix x = random_pd(n, rng, 0.3);
    const std::vector<Matrix> a = drift_field(spec, {x.mat()});
    const ScalarField logp = [&](const Matrix& m) {
      return log_power_fn(s, m);
    };
    const Matrix grad = matrix_grad_fd(logp, x.mat()).mat();
    CHECK(rel_diff(a[0], Matrix(x.mat() * grad * x.mat() +
                                x.mat() * grad.transpose() * x.mat())) < 1e-6);
  }
  // the wall pair keeps both particles in the cone
  {
    SystemSpec spec;
    spec.kind = SystemKind::WALL_PAIR;
    spec.n = 2;
    spec.nu = 0.8;
    StepperConfig cfg;
    cfg.h = 1e-3;
    RngStream wrng(711, 0);
    const PathSample path = simulate(
        spec, {Matrix::Identity(2, 2), Matrix::Identity(2, 2)}, 0.5, cfg, wrng);
    CHECK(path.states.size() == 501);
    const std::vector<Matrix> a =
        drift_field(spec, {Matrix::Identity(2, 2), Matrix::Identity(2, 2)});
    CHECK(rel_diff(a[0], Matrix((spec.nu + 1.0) * Matrix::Identity(2, 2))) <
          1e-14);
    CHECK(rel_diff(a[1], Matrix((2.0 - spec.nu) * Matrix::Identity(2, 2))) <
          1e-14);
  }
}

TEST_CASE("generator application closed forms") {
  RngStream rng(72, 0);
  // DOOB_BM(ν) on log det X -> 2nν
  for (int n = 1; n <= 2; ++n) {
    SystemSpec spec;
    spec.kind = SystemKind::DOOB_BM;
    spec.n = n;
    spec.nu = 0.8;
    const PdMatrix x = random_pd(n, rng);
    const auto f = [](const State& s) { return PdMatrix(s[0]).log_det(); };
    const double g = generator_apply_fd(spec, f, {x.mat()});
    CHECK(rel_diff(g, 2.0 * n * spec.nu) < 1e-5);
  }
  // constant field -> 0
  {
    SystemSpec spec;
    spec.kind = SystemKind::DOOB_BM;
    spec.n = 2;
    spec.nu = 0.3;
    const PdMatrix x = random_pd(2, rng);
    const auto f = [](const State&) { return 2.5; };
    CHECK(std::abs(generator_apply_fd(spec, f, {x.mat()})) < 1e-10);
  }
  // Appendix B Example 2: T V = (n+3) tr(YX^{-1}) - 2 tr((YX^{-1})^2)
  {
    const int n = 2;
    SystemSpec spec;
    spec.kind = SystemKind::BURKE_PAIR;
    spec.n = n;
    spec.lambda = 0.0;
    spec.nu = 0.0;
    const PdMatrix x = random_pd(n, rng);
    const PdMatrix y = random_pd(n, rng);
    const auto v = [](const State& s) {
      const Matrix q = s[1] * PdMatrix(s[0]).inverse();
      return q.trace() - std::log(q.determinant());
    };
    const Matrix q = y.mat() * x.inverse();
    const double closed = (n + 3.0) * q.trace() - 2.0 * (q * q).trace();
    CHECK(rel_diff(generator_apply_fd(spec, v, {x.mat(), y.mat()}), closed) <
          1e-4);
  }
}

TEST_CASE("triangular drift equals twice the cascade velocity") {
  RngStream rng(73, 0);
  const int n = 2, N = 3;
  Vector lambda(N);
  lambda << 0.6, 0.0, -0.5;
  SystemSpec spec;
  spec.kind = SystemKind::TRIANGULAR;
  spec.n = n;
  spec.N = N;
  spec.lambda_vec = lambda;
  for (int trial = 0; trial < 20; ++trial) {
    TriangularArray y(N, n);
    State state;
    for (int m = 1; m <= N; ++m) {
      for (int i = 1; i <= m; ++i) {
        y.y(m, i) = random_pd(n, rng).mat();
        state.push_back(y.y(m, i));
      }
    }
    const std::vector<Matrix> a = drift_field(spec, state);
    const std::vector<Matrix> cas = cascade_rhs(y, lambda);
    for (size_t i = 0; i < a.size(); ++i) {
      CHECK(rel_diff(a[i], Matrix(2.0 * cas[i])) < 1e-12);
    }
  }
}

TEST_CASE("gl path moments at n=1") {
  // ν=0: log Y_1 ~ N(0, 2); ν=ν0: d/dt E[log det Y] = 2 n ν0
  const int paths = 4000;
  std::vector<double> logy(paths), logdet2(paths);
  for (int p = 0; p < paths; ++p) {
    RngStream rng(74, p);
    const GlPath g1 = gl_bm_path(1, 0.0, 1.0, 1e-3, rng, 1 << 30);
    logy[p] = std::log(g1.y.back()(0, 0));
    const GlPath g2 = gl_bm_path(2, 0.6, 1.0, 1e-3, rng, 1 << 30);
    logdet2[p] = std::log(PdMatrix(g2.y.back()).det());
  }
  const Moments m = moments(logy);
  CHECK(std::abs(m.mean) < 3.0 * m.stderr_);
  CHECK(std::abs(m.var - 2.0) < 3.0 * m.var * std::sqrt(2.0 / (paths - 1)));
  const Moments md = moments(logdet2);
  // 2 n ν t = 2*2*0.6 = 2.4 at t=1
  CHECK(std::abs(md.mean - 2.4) < 3.0 * md.stderr_);
}

TEST_CASE("simulate zero horizon returns the initial state") {
  SystemSpec spec;
  spec.kind = SystemKind::DOOB_BM;
  spec.n = 2;
  spec.nu = 0.5;
  RngStream rng(75, 0);
  const Matrix x0 = random_pd(2, rng).mat();
  StepperConfig cfg;
  const PathSample path = simulate(spec, {x0}, 0.0, cfg, rng);
  REQUIRE(path.states.size() == 1);
  CHECK(path.times[0] == 0.0);
  CHECK(rel_diff(path.states[0][0], x0) == 0.0);
}

TEST_CASE("split scheme matches the exact construction in law") {
  // DOOB_BM marginal of log det at t=1 vs gl_bm_path (two-sample KS), n<=2
  for (int n = 1; n <= 2; ++n) {
    const int paths = 3000;
    const double nu = 0.5, T = 1.0, h = 1e-3;
    std::vector<double> split(paths), exact(paths);
    SystemSpec spec;
    spec.kind = SystemKind::DOOB_BM;
    spec.n = n;
    spec.nu = nu;
    StepperConfig cfg;
    cfg.h = h;
    for (int p = 0; p < paths; ++p) {
      RngStream rng(76, p);
      State state{Matrix::Identity(n, n)};
      simulate_visit(spec, state, T, cfg, rng,
                     [&](double, const State& s) { state = s; });
      split[p] = PdMatrix(state[0]).log_det();
      RngStream rng2(77, p);
      const GlPath g = gl_bm_path(n, nu, T, h, rng2, 1 << 30);
      exact[p] = PdMatrix(g.y.back()).log_det();
    }
    CHECK(ks_p_value(ks_statistic(split, exact), paths, paths) > 0.01);
  }
}

TEST_CASE("weak order one in h for the split scheme") {
  // n=1 log-det bias per step is n*log(1+2νh) - 2νh: deterministic O(h)
  const double nu = 1.0, T = 1.0;
  std::vector<double> hs = {4e-3, 2e-3, 1e-3};
  std::vector<double> gaps;
  for (double h : hs) {
    const long steps = std::lround(T / h);
    const double bias = steps * (std::log(1.0 + 2.0 * nu * h) - 2.0 * nu * h);
    gaps.push_back(std::abs(bias));
  }
  const double slope =
      std::log(gaps[0] / gaps[2]) / std::log(hs[0] / hs[2]);
  CHECK(slope == doctest::Approx(1.0).epsilon(0.3));
  // and the generic scheme reproduces that bias against the exact construction
  const double h = 4e-3;
  SystemSpec spec;
  spec.kind = SystemKind::DOOB_BM;
  spec.n = 1;
  spec.nu = nu;
  StepperConfig cfg;
  cfg.h = h;
  const int paths = 400;
  double mean_gap = 0.0;
  for (int p = 0; p < paths; ++p) {
    RngStream rng(78, p);
    State state{Matrix::Identity(1, 1)};
    simulate_visit(spec, state, T, cfg, rng,
                   [&](double, const State& s) { state = s; });
    RngStream rng2(78, p);  // same stream: coupled noise
    const GlPath g = gl_bm_path(1, nu, T, h, rng2, 1 << 30);
    mean_gap += std::log(state[0](0, 0)) - std::log(g.y.back()(0, 0));
  }
  mean_gap /= paths;
  const long steps = std::lround(T / h);
  const double predicted = steps * (std::log(1.0 + 2.0 * nu * h) - 2.0 * nu * h);
  CHECK(mean_gap == doctest::Approx(predicted).epsilon(0.05));
}

TEST_CASE("euler projected agrees with split on scalar functionals") {
  const int paths = 3000;
  const double T = 1.0;
  std::vector<double> split(paths), euler(paths);
  SystemSpec spec;
  spec.kind = SystemKind::DOOB_BM;
  spec.n = 1;
  spec.nu = 0.4;
  for (int p = 0; p < paths; ++p) {
    StepperConfig cfg;
    cfg.h = 1e-3;
    RngStream rng(79, p);
    State state{m1(1.0)};
    simulate_visit(spec, state, T, cfg, rng,
                   [&](double, const State& s) { state = s; });
    split[p] = std::log(state[0](0, 0));
    cfg.scheme = Scheme::EULER_PROJECTED;
    RngStream rng2(80, p);
    State state2{m1(1.0)};
    simulate_visit(spec, state2, T, cfg, rng2,
                   [&](double, const State& s) { state2 = s; });
    euler[p] = std::log(state2[0](0, 0));
  }
  CHECK(ks_p_value(ks_statistic(split, euler), paths, paths) > 0.01);
}

TEST_CASE("chain reduces to the exponential interaction at n=1") {
  // increments of x_1 = ln X_1 are Gaussian: first particle is free BM
  SystemSpec spec;
  spec.kind = SystemKind::CHAIN;
  spec.n = 1;
  spec.N = 2;
  spec.lambda_vec = Vector::Zero(2);
  StepperConfig cfg;
  cfg.h = 1e-3;
  const int paths = 2500;
  std::vector<double> increments(paths), gauss(paths);
  for (int p = 0; p < paths; ++p) {
    RngStream rng(81, p);
    State state{m1(1.0), m1(1.0)};
    simulate_visit(spec, state, 0.5, cfg, rng,
                   [&](double, const State& s) { state = s; });
    increments[p] = std::log(state[0](0, 0));
    gauss[p] = std::sqrt(2.0 * 0.5) * rng.normal();
  }
  CHECK(ks_p_value(ks_statistic(increments, gauss), paths, paths) > 0.01);
}

TEST_CASE("nrw path eigenvalues coincide with the transposed product") {
  RngStream rng(82, 0);
  const NrwPath path = nrw_path(2, 0.6, 0.5, 1e-3, rng, 25);
  for (size_t k = 0; k < path.times.size(); ++k) {
    const EigDecomp ex = eig_sym(path.x[k]);
    const EigDecomp ey = eig_sym(path.y[k]);
    CHECK((ex.eigenvalues - ey.eigenvalues).cwiseAbs().maxCoeff() < 1e-10);
  }
  CHECK(rel_diff(path.x.front(), Matrix::Identity(2, 2)) == 0.0);
}

TEST_CASE("path functionals") {
  // constant path Y ≡ I over [0,1]: INT_TRACE = n
  PathSample path;
  for (int k = 0; k <= 10; ++k) {
    path.times.push_back(0.1 * k);
    path.states.push_back({Matrix::Identity(3, 3)});
  }
  CHECK(path_functional(path, {FunctionalKind::INT_TRACE, 0}) ==
        doctest::Approx(3.0));
  CHECK(path_functional(path, {FunctionalKind::TERMINAL_LOGDET, 0}) ==
        doctest::Approx(0.0));

  // constant two-particle path: INT_CROSS integrates tr(Y1^{-1} Y2)
  PathSample pair;
  RngStream prng(86, 0);
  const Matrix y1 = random_pd(2, prng).mat();
  const Matrix y2 = random_pd(2, prng).mat();
  for (int k = 0; k <= 4; ++k) {
    pair.times.push_back(0.25 * k);
    pair.states.push_back({y1, y2});
  }
  CHECK(path_functional(pair, {FunctionalKind::INT_CROSS, 0}) ==
        doctest::Approx((PdMatrix(y1).inverse() * y2).trace()));

  // Dufresne at n=1: E ∫ y dt = 1/(ν-1) for BM with drift -ν/2 from 1
  const double nu = 3.0;
  const int paths = 3000;
  std::vector<double> zs(paths);
  for (int p = 0; p < paths; ++p) {
    RngStream rng(83, p);
    double logy = 0.0, acc = 0.0, prev = 1.0;
    const double h = 1e-3, T = 14.0;
    const long steps = std::lround(T / h);
    for (long k = 0; k < steps; ++k) {
      logy += -nu * h + std::sqrt(2.0 * h) * rng.normal();
      const double cur = std::exp(logy);
      acc += 0.5 * h * (prev + cur);
      prev = cur;
    }
    zs[p] = acc;
  }
  const Moments m = moments(zs);
  CHECK(std::abs(m.mean - 1.0 / (nu - 1.0)) < 3.0 * m.stderr_);
}

TEST_CASE("log eigenvalue slope functional") {
  // DOOB_BM(ν) at n=1: slope of log x over [0,T] concentrates near 2ν
  SystemSpec spec;
  spec.kind = SystemKind::DOOB_BM;
  spec.n = 1;
  spec.nu = 0.5;
  StepperConfig cfg;
  cfg.h = 2e-3;
  cfg.store_every = 1 << 30;
  const int paths = 60;
  double mean_slope = 0.0;
  for (int p = 0; p < paths; ++p) {
    RngStream rng(84, p);
    const PathSample path = simulate(spec, {m1(1.0)}, 40.0, cfg, rng);
    mean_slope +=
        path_functional(path, {FunctionalKind::LOG_EIG, 0, 0}) / paths;
  }
  CHECK(std::abs(mean_slope - 1.0) < 0.1);
}

TEST_CASE("stiff drift guard reports time and particle") {
  SystemSpec spec;
  spec.kind = SystemKind::CHAIN_INV;
  spec.n = 1;
  spec.N = 2;
  spec.lambda_vec = Vector::Zero(2);
  StepperConfig cfg;
  cfg.h = 0.5;          // huge step
  cfg.max_substeps = 0; // no halving allowed
  RngStream rng(85, 0);
  // drift of the second particle is -2 x_2^2 / x_1 = -2000 at x1=1e-3
  const State init{m1(1e-3), m1(1.0)};
  CHECK_THROWS_WITH_AS(simulate(spec, init, 1.0, cfg, rng),
                       doctest::Contains("stiff drift"), NumericError);
}

TEST_CASE("system spec validation cites the hypothesis") {
  SystemSpec spec;
  spec.kind = SystemKind::BURKE_PAIR;
  spec.n = 2;
  spec.lambda = 1.0;
  spec.nu = 1.0;
  CHECK_THROWS_WITH_AS(spec.validate(), doctest::Contains("2(λ−ν)>n−1"),
                       DomainError);
}
