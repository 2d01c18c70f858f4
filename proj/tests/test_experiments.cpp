#include <cmath>

#include "doctest.h"
#include "pdflow/experiments.hpp"
#include "pdflow/parallel.hpp"
#include "pdflow/samplers.hpp"
#include "pdflow/stats.hpp"

using namespace pdflow;

namespace {

std::vector<StatReport> run_quick(ExperimentKind kind) {
  ExperimentConfig cfg;
  cfg.kind = kind;
  cfg.quick = true;
  return run_experiment(cfg);
}

}  // namespace

TEST_CASE("quick smoke across experiment kinds") {
  for (ExperimentKind kind :
       {ExperimentKind::WHITTAKER_LAPLACE, ExperimentKind::DRESSING,
        ExperimentKind::STADE, ExperimentKind::MATSUMOTO_YOR,
        ExperimentKind::BURKE_CONDITIONAL, ExperimentKind::GIG_CONCENTRATION,
        ExperimentKind::INTERTWINING_BURKE}) {
    const std::vector<StatReport> rows = run_quick(kind);
    REQUIRE(!rows.empty());
    for (const StatReport& row : rows) {
      CHECK_MESSAGE(row.pass, row.kind, " z=", row.z);
    }
  }
}

TEST_CASE("experiments are reproducible bit for bit") {
  ExperimentConfig cfg;
  cfg.kind = ExperimentKind::MATSUMOTO_YOR;
  cfg.quick = true;
  const std::vector<StatReport> a = run_experiment(cfg);
  const std::vector<StatReport> b = run_experiment(cfg);
  REQUIRE(a.size() == b.size());
  for (size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].estimate == b[i].estimate);
    CHECK(a[i].z == b[i].z);
  }
}

TEST_CASE("degenerate Matsumoto-Yor start") {
  // A_t^{-1} Y_t A_t^{-1} from A_0 -> 0 matches the construction started at a
  // large X_0, and is insensitive to the regularization scale
  const double nu = 1.0, T = 1.0, h = 1e-3;
  const int paths = 3000;
  const auto degenerate = [&](double a0, std::uint64_t stream) {
    std::vector<double> out(paths);
    parallel_for(paths, [&](long p) {
      RngStream rng(314, stream + p);
      double logy = 0.0;
      double y = 1.0;
      double a = a0;
      const long steps = std::lround(T / h);
      for (long k = 0; k < steps; ++k) {
        const double prev = y;
        logy += nu * h + std::sqrt(2.0 * h) * rng.normal();
        y = std::exp(logy);
        a += 0.5 * h * (prev + y);
      }
      out[p] = std::log(y / (a * a));
    });
    return out;
  };
  const auto from_large_x0 = [&](double x0, std::uint64_t stream) {
    std::vector<double> out(paths);
    parallel_for(paths, [&](long p) {
      RngStream rng(315, stream + p);
      const double a0 = sample_gig_1d(nu, 2.0, 2.0 * x0, rng);
      double logy = 0.0;
      double ytil = a0 * x0 * a0;
      double atil = a0;
      const long steps = std::lround(T / h);
      for (long k = 0; k < steps; ++k) {
        const double prev = ytil;
        logy += nu * h + std::sqrt(2.0 * h) * rng.normal();
        ytil = a0 * x0 * std::exp(logy) * a0;
        atil += 0.5 * h * (prev + ytil);
      }
      out[p] = std::log(ytil / (atil * atil));
    });
    return out;
  };
  const std::vector<double> deg_a = degenerate(1e-8, 1000);
  const std::vector<double> deg_b = degenerate(2e-8, 20000);
  const std::vector<double> big = from_large_x0(1e4, 40000);
  CHECK(ks_p_value(ks_statistic(deg_a, deg_b), paths, paths) > 0.01);
  CHECK(ks_p_value(ks_statistic(deg_a, big), paths, paths) > 0.01);
}

TEST_CASE("criterion registry") {
  CHECK(criterion_count() == 13);
  CHECK(criterion_name(1).find("calculus") != std::string::npos);
  CHECK_THROWS_AS(criterion_name(14), DomainError);
  CHECK(experiment_kind_names().size() >= 30);
  CHECK(experiment_kind_from_string("DUFRESNE") == ExperimentKind::DUFRESNE);
  CHECK_THROWS_AS(experiment_kind_from_string("NOPE"), DomainError);
}
