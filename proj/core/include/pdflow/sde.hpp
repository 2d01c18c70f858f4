#pragma once

#include <functional>

#include "pdflow/calculus.hpp"
#include "pdflow/rng.hpp"
#include "pdflow/types.hpp"

namespace pdflow {

enum class SystemKind {
  DOOB_BM,
  BURKE_PAIR,
  CHAIN,
  CHAIN_INV,
  BESSEL_TRIPLE,
  MY_PAIR,
  WALL_PAIR,
  TRIANGULAR,
  NRW,
  NRW_BURKE_PAIR,
};

const char* to_string(SystemKind k);
SystemKind system_kind_from_string(const std::string& name);

enum class DriftTag { DET_POWER, POWER_S, SPHERICAL_S };

/// One of the interacting-diffusion generators, with its drift parameters.
struct SystemSpec {
  SystemKind kind = SystemKind::DOOB_BM;
  int n = 1;
  int N = 1;              // chain length / triangular levels
  double nu = 0.0;
  double lambda = 0.0;
  Vector lambda_vec;      // CHAIN*, TRIANGULAR
  DriftTag phi = DriftTag::DET_POWER;
  Vector s;               // POWER_S / SPHERICAL_S exponent vector

  int particle_count() const;
  /// Parameter-domain checks; messages cite the violated hypothesis.
  void validate() const;
};

enum class Scheme { SPLIT_MULTIPLICATIVE, EULER_PROJECTED };

struct StepperConfig {
  double h = 1e-3;
  Scheme scheme = Scheme::SPLIT_MULTIPLICATIVE;
  double eig_floor = 1e-10;
  int max_substeps = 20;
  int store_every = 1;
};

using State = std::vector<Matrix>;

struct PathSample {
  std::vector<double> times;
  std::vector<State> states;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
};

enum class NoiseType { DELTA, OMEGA, NONE };
std::vector<NoiseType> noise_types(const SystemSpec& spec);

/// First-order coefficients a_i(X) of the generator written as
/// Σ_i [second-order part + tr(a_i(X) ∂_{X_i})]; each a_i is symmetric.
std::vector<Matrix> drift_field(const SystemSpec& spec, const State& state);

/// Positivity-preserving split-step simulation; stores every store_every-th
/// state (PD-validated). Throws NumericError("stiff drift; reduce h ...") when
/// the drift guard is exhausted.
PathSample simulate(const SystemSpec& spec, const State& init, double T,
                    const StepperConfig& cfg, RngStream& rng);

/// Streaming variant: visit(t, state) after every step (including t=0).
void simulate_visit(const SystemSpec& spec, const State& init, double T,
                    const StepperConfig& cfg, RngStream& rng,
                    const std::function<void(double, const State&)>& visit);

/// Right-invariant GL(n) Brownian motion with drift ν: G ← exp(Δβ)G,
/// Δβ = sqrt(h/2)·b + νh·I, emitting Y = G^t G.
struct GlPath {
  std::vector<double> times;
  std::vector<Matrix> g;
  std::vector<Matrix> y;
};
GlPath gl_bm_path(int n, double nu, double T, double h, RngStream& rng,
                  int store_every = 1, const Matrix* g0 = nullptr);

/// Same driving motion emitting X = G G^t alongside Y = G^t G (G drift ν/2).
struct NrwPath {
  std::vector<double> times;
  std::vector<Matrix> x;
  std::vector<Matrix> y;
};
NrwPath nrw_path(int n, double nu, double T, double h, RngStream& rng,
                 int store_every = 1);

enum class FunctionalKind { INT_TRACE, INT_CROSS, LOG_EIG, TERMINAL_LOGDET };

struct Functional {
  FunctionalKind kind = FunctionalKind::INT_TRACE;
  int particle = 0;   // i
  int component = 0;  // eigenvalue index for LOG_EIG
};

/// Trapezoidal path functional on the stored grid.
double path_functional(const PathSample& path, const Functional& fn);

/// Numeric application of the generator to a scalar field of the full state,
/// assembled from finite differences and drift_field.
double generator_apply_fd(const SystemSpec& spec,
                          const std::function<double(const State&)>& f,
                          const State& state, double h = 1e-4);

}  // namespace pdflow
