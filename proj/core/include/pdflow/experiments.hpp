#pragma once

#include <string>
#include <vector>

#include "pdflow/config.hpp"
#include "pdflow/sde.hpp"
#include "pdflow/stats.hpp"

namespace pdflow {

enum class ExperimentKind {
  CALCULUS_SUITE,
  EIGENFUNCTION_SUITE,
  BESSEL_SUITE,
  DUFRESNE,
  TWO_PARTICLE_DUFRESNE,
  BURKE_OUTPUT,
  BURKE_CONDITIONAL,
  MATSUMOTO_YOR,
  LYAPUNOV_EXPONENTS,
  GIG_CONCENTRATION,
  WHITTAKER_EIGEN,
  WHITTAKER_WMP,
  FEYNMAN_KAC_CHAIN,
  STADE,
  WHITTAKER_LAPLACE,
  WHITTAKER_MARGINAL,
  TRIANGULAR_MARGINAL,
  INTERTWINING_BURKE,
  INTERTWINING_MY,
  INTERTWINING_SYM,
  INTERTWINING_NCT,
  INTERTWINING_HG,
  WALL_STATIONARY,
  NRW_EIGEN_MATCH,
  NRW_BURKE,
  DYSON_MAX,
  TODA_CONSERVATION,
  TODA_ORDER,
  BACKLUND_FLOW,
  DRESSING,
  CASCADE_INVARIANCE,
  APPENDIX_INEQ,
  LYAPUNOV_BOUNDS,
  EIG_LAW_EQUALITY,
  GD_EXPLORATORY,
};

const char* to_string(ExperimentKind k);
ExperimentKind experiment_kind_from_string(const std::string& name);
std::vector<std::string> experiment_kind_names();

/// One seeded, tolerance-quantified check. Unset numeric fields (0 / empty)
/// fall back to the kind's pinned defaults.
struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::DUFRESNE;
  int n = 0;
  int N = 0;
  double nu = 0.0;
  double lambda = 0.0;
  Vector lambda_vec;
  long paths = 0;
  double T = 0.0;
  double h = 0.0;
  std::uint64_t seed = 0;
  PassPolicy policy;
  bool quick = false;
  bool has_nu = false;
  bool has_lambda = false;
};

std::vector<StatReport> run_experiment(const ExperimentConfig& cfg);

/// Acceptance criteria (verify-all runs 1..criterion_count()).
struct CriterionResult {
  int index = 0;
  std::string name;
  std::vector<StatReport> rows;
  bool pass = false;
};
int criterion_count();
std::string criterion_name(int index);
CriterionResult run_criterion(int index, bool quick = false,
                              std::uint64_t seed_override = 0);

/// Config-file bindings.
ExperimentConfig experiment_config_from_ini(const IniConfig& ini);
SystemSpec system_spec_from_ini(const IniConfig& ini);
StepperConfig stepper_from_ini(const IniConfig& ini);

/// The determinant formula P(M <= z) for the maximum of Dyson BM with
/// negative drift: f(ν,y) = det(e^{ν_i y_j} - e^{-ν_i y_j}) / det(e^{ν_i y_j}).
double dyson_max_cdf(const Vector& nu, const Vector& y, bool* ill_conditioned = nullptr);

/// A PD matrix with eigenvalues of order one: exp(scale * gaussian_sym).
PdMatrix random_pd(int n, RngStream& rng, double scale = 0.45);

}  // namespace pdflow
