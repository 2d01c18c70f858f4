#include <benchmark/benchmark.h>

#include "pdflow/calculus.hpp"
#include "pdflow/experiments.hpp"
#include "pdflow/samplers.hpp"
#include "pdflow/sde.hpp"
#include "pdflow/specfun.hpp"
#include "pdflow/stats.hpp"

using namespace pdflow;

static void BM_LaplacianFd(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  RngStream rng(1, 0);
  const PdMatrix x = random_pd(n, rng, 0.3);
  const PdMatrix a = random_pd(n, rng, 0.3);
  const ScalarField f = [&](const Matrix& m) { return (a.mat() * m).trace(); };
  for (auto _ : state) {
    benchmark::DoNotOptimize(laplacian_fd(f, x.mat()));
  }
}
BENCHMARK(BM_LaplacianFd)->Arg(1)->Arg(2)->Arg(3);

static void BM_SplitStep(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  SystemSpec spec;
  spec.kind = SystemKind::DOOB_BM;
  spec.n = n;
  spec.nu = 0.5;
  StepperConfig cfg;
  cfg.h = 1e-3;
  RngStream rng(2, 0);
  const long steps_per_iter = 256;
  for (auto _ : state) {
    State s{Matrix::Identity(n, n)};
    simulate_visit(spec, s, steps_per_iter * cfg.h, cfg, rng,
                   [](double, const State&) {});
  }
  state.SetItemsProcessed(state.iterations() * steps_per_iter);
}
BENCHMARK(BM_SplitStep)->Arg(1)->Arg(2)->Arg(3);

static void BM_GlStep(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  RngStream rng(3, 0);
  const long steps_per_iter = 256;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        gl_bm_path(n, 0.5, steps_per_iter * 1e-3, 1e-3, rng, 1 << 30));
  }
  state.SetItemsProcessed(state.iterations() * steps_per_iter);
}
BENCHMARK(BM_GlStep)->Arg(2)->Arg(4);

static void BM_BesselB1(benchmark::State& state) {
  const PdMatrix x(1.7 * Matrix::Identity(1, 1));
  for (auto _ : state) {
    benchmark::DoNotOptimize(bessel_B(0.7, x));
  }
}
BENCHMARK(BM_BesselB1);

static void BM_MacdonaldK(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(macdonald_k(0.7, 2.3));
  }
}
BENCHMARK(BM_MacdonaldK);

static void BM_WishartSample(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  RngStream rng(4, 0);
  const WishartParams wp{PdMatrix::identity(n), n + 2.5};
  for (auto _ : state) {
    benchmark::DoNotOptimize(sample_wishart(wp, rng));
  }
}
BENCHMARK(BM_WishartSample)->Arg(2)->Arg(4);

static void BM_KsTwoSample(benchmark::State& state) {
  RngStream rng(5, 0);
  std::vector<double> a(4000), b(4000);
  for (int i = 0; i < 4000; ++i) {
    a[i] = rng.normal();
    b[i] = rng.normal();
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(ks_statistic(a, b));
  }
}
BENCHMARK(BM_KsTwoSample);

BENCHMARK_MAIN();
