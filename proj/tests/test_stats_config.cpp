#include <cmath>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "pdflow/config.hpp"
#include "pdflow/csvio.hpp"
#include "pdflow/experiments.hpp"
#include "pdflow/rng.hpp"
#include "pdflow/stats.hpp"

using namespace pdflow;

TEST_CASE("two sample report calibration") {
  RngStream rng(201, 0);
  // identical seeded streams -> exact pass with z = 0
  {
    std::vector<double> a, b;
    RngStream r1(5, 9), r2(5, 9);
    for (int i = 0; i < 500; ++i) {
      a.push_back(r1.normal());
      b.push_back(r2.normal());
    }
    const StatReport rep = two_sample_report("same", a, b);
    CHECK(rep.pass);
    CHECK(rep.z == doctest::Approx(0.0));
  }
  // N(0,1) vs N(1,1): decisive fail
  {
    std::vector<double> a, b;
    for (int i = 0; i < 1000; ++i) {
      a.push_back(rng.normal());
      b.push_back(rng.normal() + 1.0);
    }
    const StatReport rep = two_sample_report("shifted", a, b);
    CHECK_FALSE(rep.pass);
    CHECK(std::abs(rep.z) > 3.0);
  }
  // independent same-law runs: pass rate ≈ 0.99
  {
    int passes = 0;
    const int runs = 300;
    for (int k = 0; k < runs; ++k) {
      std::vector<double> a, b;
      for (int i = 0; i < 400; ++i) {
        a.push_back(rng.normal());
        b.push_back(rng.normal());
      }
      if (two_sample_report("calib", a, b).pass) ++passes;
    }
    CHECK(passes >= static_cast<int>(0.96 * runs));
  }
  // degenerate variance falls back to exact equality
  {
    const std::vector<double> a(50, 1.0), b(50, 1.0);
    const StatReport rep = two_sample_report("degenerate", a, b);
    CHECK(rep.pass);
    CHECK(rep.note.find("degenerate") != std::string::npos);
  }
}

TEST_CASE("ks p-value sanity") {
  RngStream rng(202, 0);
  std::vector<double> a, b;
  for (int i = 0; i < 2000; ++i) {
    a.push_back(rng.normal());
    b.push_back(rng.normal() * 1.8);
  }
  CHECK(ks_p_value(ks_statistic(a, b), a.size(), b.size()) < 1e-4);
}

TEST_CASE("dyson determinant formula") {
  // n=1 reduction
  Vector nu(1), y(1);
  nu << 1.2;
  y << 0.8;
  CHECK(dyson_max_cdf(nu, y) ==
        doctest::Approx(1.0 - std::exp(-2.0 * 1.2 * 0.8)).epsilon(1e-14));
  // y -> ∞: tends to 1; monotone nondecreasing in each component
  Vector nu2(2), y2(2);
  nu2 << 2.0, 1.0;
  y2 << 30.0, 29.0;
  CHECK(dyson_max_cdf(nu2, y2) == doctest::Approx(1.0).epsilon(1e-8));
  double prev = 0.0;
  for (double z = 0.5; z < 4.0; z += 0.25) {
    Vector yy(2);
    yy << z + 0.7, z;
    const double val = dyson_max_cdf(nu2, yy);
    CHECK(val >= prev - 1e-12);
    CHECK(val >= 0.0);
    CHECK(val <= 1.0 + 1e-12);
    prev = val;
  }
  CHECK_THROWS_AS(dyson_max_cdf(nu2, Vector::Zero(2)), DomainError);
}

TEST_CASE("ini config parsing") {
  const std::string text =
      "# pdflow config\n"
      "[system]\n"
      "kind = DUFRESNE\n"
      "n = 2\n"
      "nu = 2.0\n"
      "[stepper]\n"
      "h = 1e-3\n"
      "[experiment]\n"
      "kind = DUFRESNE\n"
      "seed = 7\n";
  const IniConfig cfg = IniConfig::parse(text);
  CHECK(cfg.get_string("system", "kind") == "DUFRESNE");
  CHECK(cfg.get_double("system", "nu") == doctest::Approx(2.0));
  CHECK(cfg.get_long("experiment", "seed") == 7);
  CHECK(cfg.get_double("stepper", "eig_floor", 1e-10) ==
        doctest::Approx(1e-10));

  // duplicate keys name both lines
  CHECK_THROWS_WITH_AS(IniConfig::parse("[a]\nx = 1\nx = 2\n"),
                       doctest::Contains("lines 2 and 3"), ConfigError);
  // type mismatch carries the line number
  CHECK_THROWS_WITH_AS(IniConfig::parse("[a]\nx = pear\n").get_double("a", "x"),
                       doctest::Contains("line 2"), ConfigError);
  // unknown keys flagged through consumption tracking
  const IniConfig extra = IniConfig::parse("[a]\nx = 1\nzz = 3\n");
  extra.get_long("a", "x");
  CHECK_THROWS_WITH_AS(extra.check_all_consumed(),
                       doctest::Contains("unknown key 'zz'"), ConfigError);
}

TEST_CASE("experiment config from ini applies defaults and constraints") {
  {
    const IniConfig ini = IniConfig::parse("[experiment]\nkind = DUFRESNE\n");
    const ExperimentConfig cfg = experiment_config_from_ini(ini);
    CHECK(cfg.kind == ExperimentKind::DUFRESNE);
    CHECK(cfg.paths == 0);  // defaults filled at resolve time
  }
  {
    const IniConfig ini = IniConfig::parse(
        "[system]\nn = 2\nlambda = 1\nnu = 1\n[experiment]\nkind = "
        "BURKE_OUTPUT\n");
    CHECK_THROWS_WITH_AS(experiment_config_from_ini(ini),
                         doctest::Contains("2(λ−ν)>n−1"), ConfigError);
  }
}

TEST_CASE("system spec from ini") {
  const IniConfig ini = IniConfig::parse(
      "[system]\nkind = CHAIN\nn = 1\nN = 3\nlambda_vec = 0.5, 0.1, -0.2\n");
  const SystemSpec spec = system_spec_from_ini(ini);
  CHECK(spec.kind == SystemKind::CHAIN);
  CHECK(spec.N == 3);
  CHECK(spec.lambda_vec(2) == doctest::Approx(-0.2));
}

TEST_CASE("csv formatting is stable") {
  StatReport r;
  r.kind = "TEST";
  r.params = "n=1";
  r.estimate = 1.0 / 3.0;
  r.reference = 0.5;
  r.z = -1.25;
  r.pass = true;
  r.seed = 42;
  const std::string csv = results_csv({r});
  CHECK(csv.find("# pdflow-results-v1") == 0);
  CHECK(csv.find("TEST,n=1,0.333333333333,0,0.5,0,-1.25,-,1,42,0,0,") !=
        std::string::npos);
}

TEST_CASE("atomic write creates complete files") {
  const std::string dir = "./tmp_csv_test";
  std::filesystem::create_directories(dir);
  atomic_write(dir + "/out.csv", "hello\n");
  std::ifstream in(dir + "/out.csv");
  std::string line;
  std::getline(in, line);
  CHECK(line == "hello");
  std::filesystem::remove_all(dir);
}
