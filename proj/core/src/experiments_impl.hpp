#pragma once

#include "pdflow/experiments.hpp"

namespace pdflow::detail {

// resolved configuration: every field concrete
struct Resolved {
  ExperimentKind kind;
  int n;
  int N;
  double nu;
  double lambda;
  Vector lambda_vec;
  long paths;
  double T;
  double h;
  std::uint64_t seed;
  PassPolicy policy;
  bool quick;
};

Resolved resolve(const ExperimentConfig& cfg);
std::vector<StatReport> dispatch_experiment(const Resolved& r);

// deterministic suites
std::vector<StatReport> run_calculus_suite(const Resolved& r);
std::vector<StatReport> run_eigenfunction_suite(const Resolved& r);
std::vector<StatReport> run_bessel_suite(const Resolved& r);
std::vector<StatReport> run_whittaker_eigen(const Resolved& r);
std::vector<StatReport> run_whittaker_wmp(const Resolved& r);
std::vector<StatReport> run_stade(const Resolved& r);
std::vector<StatReport> run_whittaker_laplace(const Resolved& r);
std::vector<StatReport> run_whittaker_marginal(const Resolved& r);
std::vector<StatReport> run_intertwining(const Resolved& r);
std::vector<StatReport> run_wall_stationary(const Resolved& r);
std::vector<StatReport> run_appendix_ineq(const Resolved& r);
std::vector<StatReport> run_lyapunov_bounds(const Resolved& r);
std::vector<StatReport> run_toda_conservation(const Resolved& r);
std::vector<StatReport> run_toda_order(const Resolved& r);
std::vector<StatReport> run_backlund_flow(const Resolved& r);
std::vector<StatReport> run_dressing(const Resolved& r);
std::vector<StatReport> run_cascade_invariance(const Resolved& r);

// Monte Carlo experiments
std::vector<StatReport> run_dufresne(const Resolved& r);
std::vector<StatReport> run_two_particle_dufresne(const Resolved& r);
std::vector<StatReport> run_burke(const Resolved& r, bool conditional_only);
std::vector<StatReport> run_matsumoto_yor(const Resolved& r);
std::vector<StatReport> run_lyapunov_exponents(const Resolved& r);
std::vector<StatReport> run_gig_concentration(const Resolved& r);
std::vector<StatReport> run_feynman_kac(const Resolved& r);
std::vector<StatReport> run_triangular_marginal(const Resolved& r);
std::vector<StatReport> run_nrw_eigen_match(const Resolved& r);
std::vector<StatReport> run_nrw_burke(const Resolved& r);
std::vector<StatReport> run_dyson_max(const Resolved& r);
std::vector<StatReport> run_eig_law_equality(const Resolved& r);
std::vector<StatReport> run_gd_exploratory(const Resolved& r);

void stamp(std::vector<StatReport>& rows, const Resolved& r);

}  // namespace pdflow::detail
