#include "pdflow/experiments.hpp"

#include <cmath>

#include "experiments_impl.hpp"
#include "pdflow/samplers.hpp"

namespace pdflow {

namespace {

struct KindInfo {
  ExperimentKind kind;
  const char* name;
};

const KindInfo kKinds[] = {
    {ExperimentKind::CALCULUS_SUITE, "CALCULUS_SUITE"},
    {ExperimentKind::EIGENFUNCTION_SUITE, "EIGENFUNCTION_SUITE"},
    {ExperimentKind::BESSEL_SUITE, "BESSEL_SUITE"},
    {ExperimentKind::DUFRESNE, "DUFRESNE"},
    {ExperimentKind::TWO_PARTICLE_DUFRESNE, "TWO_PARTICLE_DUFRESNE"},
    {ExperimentKind::BURKE_OUTPUT, "BURKE_OUTPUT"},
    {ExperimentKind::BURKE_CONDITIONAL, "BURKE_CONDITIONAL"},
    {ExperimentKind::MATSUMOTO_YOR, "MATSUMOTO_YOR"},
    {ExperimentKind::LYAPUNOV_EXPONENTS, "LYAPUNOV_EXPONENTS"},
    {ExperimentKind::GIG_CONCENTRATION, "GIG_CONCENTRATION"},
    {ExperimentKind::WHITTAKER_EIGEN, "WHITTAKER_EIGEN"},
    {ExperimentKind::WHITTAKER_WMP, "WHITTAKER_WMP"},
    {ExperimentKind::FEYNMAN_KAC_CHAIN, "FEYNMAN_KAC_CHAIN"},
    {ExperimentKind::STADE, "STADE"},
    {ExperimentKind::WHITTAKER_LAPLACE, "WHITTAKER_LAPLACE"},
    {ExperimentKind::WHITTAKER_MARGINAL, "WHITTAKER_MARGINAL"},
    {ExperimentKind::TRIANGULAR_MARGINAL, "TRIANGULAR_MARGINAL"},
    {ExperimentKind::INTERTWINING_BURKE, "INTERTWINING_BURKE"},
    {ExperimentKind::INTERTWINING_MY, "INTERTWINING_MY"},
    {ExperimentKind::INTERTWINING_SYM, "INTERTWINING_SYM"},
    {ExperimentKind::INTERTWINING_NCT, "INTERTWINING_NCT"},
    {ExperimentKind::INTERTWINING_HG, "INTERTWINING_HG"},
    {ExperimentKind::WALL_STATIONARY, "WALL_STATIONARY"},
    {ExperimentKind::NRW_EIGEN_MATCH, "NRW_EIGEN_MATCH"},
    {ExperimentKind::NRW_BURKE, "NRW_BURKE"},
    {ExperimentKind::DYSON_MAX, "DYSON_MAX"},
    {ExperimentKind::TODA_CONSERVATION, "TODA_CONSERVATION"},
    {ExperimentKind::TODA_ORDER, "TODA_ORDER"},
    {ExperimentKind::BACKLUND_FLOW, "BACKLUND_FLOW"},
    {ExperimentKind::DRESSING, "DRESSING"},
    {ExperimentKind::CASCADE_INVARIANCE, "CASCADE_INVARIANCE"},
    {ExperimentKind::APPENDIX_INEQ, "APPENDIX_INEQ"},
    {ExperimentKind::LYAPUNOV_BOUNDS, "LYAPUNOV_BOUNDS"},
    {ExperimentKind::EIG_LAW_EQUALITY, "EIG_LAW_EQUALITY"},
    {ExperimentKind::GD_EXPLORATORY, "GD_EXPLORATORY"},
};

}  // namespace

const char* to_string(ExperimentKind k) {
  for (const KindInfo& info : kKinds) {
    if (info.kind == k) return info.name;
  }
  return "?";
}

ExperimentKind experiment_kind_from_string(const std::string& name) {
  for (const KindInfo& info : kKinds) {
    if (name == info.name) return info.kind;
  }
  throw DomainError("unknown experiment kind '" + name + "'");
}

std::vector<std::string> experiment_kind_names() {
  std::vector<std::string> out;
  for (const KindInfo& info : kKinds) out.emplace_back(info.name);
  return out;
}

PdMatrix random_pd(int n, RngStream& rng, double scale) {
  return PdMatrix(expm_sym(scale * rng.gaussian_sym(n)));
}

double dyson_max_cdf(const Vector& nu, const Vector& y, bool* ill_conditioned) {
  const int n = static_cast<int>(nu.size());
  if (y.size() != n) throw DomainError("dyson_max_cdf: size mismatch");
  for (int i = 0; i < n; ++i) {
    if (!(nu(i) > 0.0) || !(y(i) > 0.0))
      throw DomainError("dyson_max_cdf: components must be positive");
    if (i > 0 && (nu(i) > nu(i - 1) || y(i) > y(i - 1)))
      throw DomainError("dyson_max_cdf: components must be non-increasing");
  }
  // factor e^{-nu_i y_1} out of row i of both determinants (cancels in the ratio)
  Matrix top(n, n), bottom(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double ep = std::exp(nu(i) * (y(j) - y(0)));
      const double em = std::exp(-nu(i) * (y(j) + y(0)));
      top(i, j) = ep - em;
      bottom(i, j) = ep;
    }
  }
  const double dt = top.determinant();
  const double db = bottom.determinant();
  if (ill_conditioned) {
    double scale = 1.0;
    for (int i = 0; i < n; ++i) scale *= bottom.row(i).norm();
    *ill_conditioned = std::abs(db) < 1e-10 * scale;
  }
  if (db == 0.0) throw NumericError("dyson_max_cdf: zero denominator");
  return dt / db;
}

namespace detail {

namespace {

struct Defaults {
  int n = 1;
  int N = 1;
  double nu = 0.0;
  double lambda = 0.0;
  long paths = 0;
  double T = 0.0;
  double h = 1e-3;
  std::uint64_t seed = 0;
};

Defaults kind_defaults(ExperimentKind k) {
  Defaults d;
  switch (k) {
    case ExperimentKind::CALCULUS_SUITE: d.seed = 101; break;
    case ExperimentKind::EIGENFUNCTION_SUITE: d.seed = 102; break;
    case ExperimentKind::BESSEL_SUITE: d.nu = 0.7; d.seed = 103; break;
    case ExperimentKind::DUFRESNE:
      d.n = 2; d.nu = 2.0; d.paths = 4000; d.T = 16.0; d.seed = 104;
      break;
    case ExperimentKind::TWO_PARTICLE_DUFRESNE:
      d.n = 2; d.nu = 2.4; d.paths = 1500; d.T = 18.0; d.h = 2e-3; d.seed = 105;
      break;
    case ExperimentKind::BURKE_OUTPUT:
    case ExperimentKind::BURKE_CONDITIONAL:
      d.n = 1; d.lambda = 1.0; d.nu = -1.0; d.paths = 4000; d.T = 1.0;
      d.seed = 106;
      break;
    case ExperimentKind::MATSUMOTO_YOR:
      d.n = 1; d.nu = 1.0; d.paths = 4000; d.T = 1.0; d.seed = 107;
      break;
    case ExperimentKind::LYAPUNOV_EXPONENTS:
      d.n = 2; d.nu = 1.5; d.paths = 160; d.T = 50.0; d.h = 2e-3; d.seed = 108;
      break;
    case ExperimentKind::GIG_CONCENTRATION:
      d.n = 2; d.nu = 0.5; d.paths = 4000; d.seed = 109;
      break;
    case ExperimentKind::WHITTAKER_EIGEN: d.N = 2; d.seed = 110; break;
    case ExperimentKind::WHITTAKER_WMP: d.N = 3; d.seed = 111; break;
    case ExperimentKind::FEYNMAN_KAC_CHAIN:
      d.N = 2; d.paths = 3000; d.T = 16.0; d.seed = 112;
      break;
    case ExperimentKind::STADE: d.N = 2; d.seed = 113; break;
    case ExperimentKind::WHITTAKER_LAPLACE: d.seed = 114; break;
    case ExperimentKind::WHITTAKER_MARGINAL: d.N = 2; d.seed = 115; break;
    case ExperimentKind::TRIANGULAR_MARGINAL:
      d.N = 2; d.paths = 3000; d.T = 0.5; d.seed = 116;
      break;
    case ExperimentKind::INTERTWINING_BURKE:
    case ExperimentKind::INTERTWINING_MY:
    case ExperimentKind::INTERTWINING_SYM:
    case ExperimentKind::INTERTWINING_NCT:
    case ExperimentKind::INTERTWINING_HG:
      d.seed = 117;
      break;
    case ExperimentKind::WALL_STATIONARY: d.nu = 0.8; d.seed = 118; break;
    case ExperimentKind::NRW_EIGEN_MATCH:
      d.n = 2; d.nu = 0.5; d.paths = 20; d.T = 1.0; d.seed = 119;
      break;
    case ExperimentKind::NRW_BURKE:
      d.n = 1; d.lambda = 1.0; d.paths = 4000; d.T = 1.0; d.seed = 120;
      break;
    case ExperimentKind::DYSON_MAX:
      d.n = 2; d.paths = 16000; d.T = 20.0; d.h = 2e-3; d.seed = 121;
      break;
    case ExperimentKind::TODA_CONSERVATION:
      d.n = 2; d.N = 3; d.T = 10.0; d.seed = 122;
      break;
    case ExperimentKind::TODA_ORDER: d.n = 2; d.N = 2; d.T = 1.0; d.seed = 123; break;
    case ExperimentKind::BACKLUND_FLOW:
      d.n = 2; d.N = 3; d.nu = 0.7; d.T = 1.0; d.h = 2e-4; d.seed = 124;
      break;
    case ExperimentKind::DRESSING: d.n = 2; d.N = 3; d.nu = 0.6; d.seed = 125; break;
    case ExperimentKind::CASCADE_INVARIANCE:
      d.n = 2; d.N = 3; d.T = 5.0; d.seed = 126;
      break;
    case ExperimentKind::APPENDIX_INEQ: d.paths = 10000; d.seed = 127; break;
    case ExperimentKind::LYAPUNOV_BOUNDS: d.n = 2; d.paths = 1000; d.seed = 128; break;
    case ExperimentKind::EIG_LAW_EQUALITY:
      d.n = 2; d.nu = 1.5; d.paths = 2000; d.T = 1.0; d.seed = 129;
      break;
    case ExperimentKind::GD_EXPLORATORY:
      d.n = 1; d.paths = 4000; d.T = 14.0; d.seed = 130;
      break;
  }
  return d;
}

}  // namespace

Resolved resolve(const ExperimentConfig& cfg) {
  const Defaults d = kind_defaults(cfg.kind);
  Resolved r;
  r.kind = cfg.kind;
  r.n = cfg.n > 0 ? cfg.n : d.n;
  r.N = cfg.N > 0 ? cfg.N : d.N;
  r.nu = cfg.has_nu ? cfg.nu : d.nu;
  r.lambda = cfg.has_lambda ? cfg.lambda : d.lambda;
  r.lambda_vec = cfg.lambda_vec;
  r.paths = cfg.paths > 0 ? cfg.paths : d.paths;
  r.T = cfg.T > 0.0 ? cfg.T : d.T;
  r.h = cfg.h > 0.0 ? cfg.h : d.h;
  r.seed = cfg.seed != 0 ? cfg.seed : (0x5eed0000ULL + d.seed);
  r.policy = cfg.policy;
  r.quick = cfg.quick;
  if (r.quick && r.paths > 400) r.paths = std::max<long>(400, r.paths / 8);
  return r;
}

void stamp(std::vector<StatReport>& rows, const Resolved& r) {
  for (StatReport& row : rows) {
    row.seed = r.seed;
    if (row.T == 0.0) row.T = r.T;
    if (row.h == 0.0) row.h = r.h;
  }
}

}  // namespace detail

std::vector<StatReport> run_experiment(const ExperimentConfig& cfg) {
  using namespace detail;
  const Resolved r = resolve(cfg);
  std::vector<StatReport> rows;
  try {
    rows = dispatch_experiment(r);
  } catch (const NumericError& e) {
    throw NumericError(std::string(to_string(r.kind)) + ": " + e.what());
  }
  detail::stamp(rows, r);
  return rows;
}

namespace detail {

std::vector<StatReport> dispatch_experiment(const Resolved& r) {
  std::vector<StatReport> rows;
  switch (r.kind) {
    case ExperimentKind::CALCULUS_SUITE: rows = run_calculus_suite(r); break;
    case ExperimentKind::EIGENFUNCTION_SUITE: rows = run_eigenfunction_suite(r); break;
    case ExperimentKind::BESSEL_SUITE: rows = run_bessel_suite(r); break;
    case ExperimentKind::DUFRESNE: rows = run_dufresne(r); break;
    case ExperimentKind::TWO_PARTICLE_DUFRESNE:
      rows = run_two_particle_dufresne(r);
      break;
    case ExperimentKind::BURKE_OUTPUT: rows = run_burke(r, false); break;
    case ExperimentKind::BURKE_CONDITIONAL: rows = run_burke(r, true); break;
    case ExperimentKind::MATSUMOTO_YOR: rows = run_matsumoto_yor(r); break;
    case ExperimentKind::LYAPUNOV_EXPONENTS: rows = run_lyapunov_exponents(r); break;
    case ExperimentKind::GIG_CONCENTRATION: rows = run_gig_concentration(r); break;
    case ExperimentKind::WHITTAKER_EIGEN: rows = run_whittaker_eigen(r); break;
    case ExperimentKind::WHITTAKER_WMP: rows = run_whittaker_wmp(r); break;
    case ExperimentKind::FEYNMAN_KAC_CHAIN: rows = run_feynman_kac(r); break;
    case ExperimentKind::STADE: rows = run_stade(r); break;
    case ExperimentKind::WHITTAKER_LAPLACE: rows = run_whittaker_laplace(r); break;
    case ExperimentKind::WHITTAKER_MARGINAL: rows = run_whittaker_marginal(r); break;
    case ExperimentKind::TRIANGULAR_MARGINAL: rows = run_triangular_marginal(r); break;
    case ExperimentKind::INTERTWINING_BURKE:
    case ExperimentKind::INTERTWINING_MY:
    case ExperimentKind::INTERTWINING_SYM:
    case ExperimentKind::INTERTWINING_NCT:
    case ExperimentKind::INTERTWINING_HG:
      rows = run_intertwining(r);
      break;
    case ExperimentKind::WALL_STATIONARY: rows = run_wall_stationary(r); break;
    case ExperimentKind::NRW_EIGEN_MATCH: rows = run_nrw_eigen_match(r); break;
    case ExperimentKind::NRW_BURKE: rows = run_nrw_burke(r); break;
    case ExperimentKind::DYSON_MAX: rows = run_dyson_max(r); break;
    case ExperimentKind::TODA_CONSERVATION: rows = run_toda_conservation(r); break;
    case ExperimentKind::TODA_ORDER: rows = run_toda_order(r); break;
    case ExperimentKind::BACKLUND_FLOW: rows = run_backlund_flow(r); break;
    case ExperimentKind::DRESSING: rows = run_dressing(r); break;
    case ExperimentKind::CASCADE_INVARIANCE: rows = run_cascade_invariance(r); break;
    case ExperimentKind::APPENDIX_INEQ: rows = run_appendix_ineq(r); break;
    case ExperimentKind::LYAPUNOV_BOUNDS: rows = run_lyapunov_bounds(r); break;
    case ExperimentKind::EIG_LAW_EQUALITY: rows = run_eig_law_equality(r); break;
    case ExperimentKind::GD_EXPLORATORY: rows = run_gd_exploratory(r); break;
  }
  return rows;
}

}  // namespace detail

namespace {

struct Criterion {
  const char* name;
  std::vector<ExperimentKind> kinds;
};

const std::vector<Criterion>& criteria() {
  static const std::vector<Criterion> c = {
      {"calculus identities", {ExperimentKind::CALCULUS_SUITE}},
      {"power/spherical eigenfunction", {ExperimentKind::EIGENFUNCTION_SUITE}},
      {"Bessel reductions", {ExperimentKind::BESSEL_SUITE}},
      {"Dufresne identity", {ExperimentKind::DUFRESNE}},
      {"Burke output and conditional law",
       {ExperimentKind::BURKE_OUTPUT, ExperimentKind::BURKE_CONDITIONAL}},
      {"Matsumoto-Yor transform", {ExperimentKind::MATSUMOTO_YOR}},
      {"Whittaker identities",
       {ExperimentKind::WHITTAKER_EIGEN, ExperimentKind::WHITTAKER_WMP,
        ExperimentKind::FEYNMAN_KAC_CHAIN, ExperimentKind::STADE,
        ExperimentKind::WHITTAKER_LAPLACE}},
      {"Toda lattice",
       {ExperimentKind::TODA_CONSERVATION, ExperimentKind::TODA_ORDER,
        ExperimentKind::DRESSING, ExperimentKind::BACKLUND_FLOW,
        ExperimentKind::CASCADE_INVARIANCE}},
      {"Lyapunov exponents", {ExperimentKind::LYAPUNOV_EXPONENTS}},
      {"GIG concentration", {ExperimentKind::GIG_CONCENTRATION}},
      {"Dyson maximum", {ExperimentKind::DYSON_MAX}},
      {"appendix inequalities and Lyapunov bounds",
       {ExperimentKind::APPENDIX_INEQ, ExperimentKind::LYAPUNOV_BOUNDS}},
      {"NRW eigenvalues and Omega-Burke",
       {ExperimentKind::NRW_EIGEN_MATCH, ExperimentKind::NRW_BURKE}},
  };
  return c;
}

}  // namespace

int criterion_count() { return static_cast<int>(criteria().size()); }

std::string criterion_name(int index) {
  if (index < 1 || index > criterion_count())
    throw DomainError("criterion index out of range");
  return criteria()[index - 1].name;
}

CriterionResult run_criterion(int index, bool quick, std::uint64_t seed_override) {
  if (index < 1 || index > criterion_count())
    throw DomainError("criterion index out of range");
  CriterionResult out;
  out.index = index;
  out.name = criterion_name(index);
  out.pass = true;
  for (ExperimentKind kind : criteria()[index - 1].kinds) {
    ExperimentConfig cfg;
    cfg.kind = kind;
    cfg.quick = quick;
    cfg.seed = seed_override;
    const std::vector<StatReport> rows = run_experiment(cfg);
    for (const StatReport& row : rows) out.pass = out.pass && row.pass;
    out.rows.insert(out.rows.end(), rows.begin(), rows.end());
  }
  return out;
}

ExperimentConfig experiment_config_from_ini(const IniConfig& ini) {
  ExperimentConfig cfg;
  cfg.kind = experiment_kind_from_string(ini.get_string("experiment", "kind"));
  cfg.n = static_cast<int>(ini.get_long("system", "n", 0));
  cfg.N = static_cast<int>(ini.get_long("system", "N", 0));
  if (ini.has("system", "nu")) {
    cfg.nu = ini.get_double("system", "nu");
    cfg.has_nu = true;
  }
  if (ini.has("system", "lambda")) {
    cfg.lambda = ini.get_double("system", "lambda");
    cfg.has_lambda = true;
  }
  if (ini.has("system", "lambda_vec")) {
    cfg.lambda_vec = ini.get_vector("system", "lambda_vec");
  }
  cfg.paths = ini.get_long("experiment", "paths", 0);
  cfg.T = ini.get_double("experiment", "T", 0.0);
  cfg.h = ini.get_double("stepper", "h", 0.0);
  cfg.seed = static_cast<std::uint64_t>(ini.get_long("experiment", "seed", 0));
  cfg.policy.z_max = ini.get_double("experiment", "z_max", 3.0);
  cfg.policy.ks_floor = ini.get_double("experiment", "ks_floor", 0.01);
  cfg.quick = ini.get_bool("experiment", "quick", false);

  // kind-specific domain constraints, checked before any computation
  if (cfg.kind == ExperimentKind::BURKE_OUTPUT ||
      cfg.kind == ExperimentKind::BURKE_CONDITIONAL) {
    const detail::Resolved r = detail::resolve(cfg);
    if (!(2.0 * (r.lambda - r.nu) > r.n - 1)) {
      throw ConfigError("kind=BURKE requires 2(λ−ν)>n−1 (got λ=" +
                        std::to_string(r.lambda) + ", ν=" + std::to_string(r.nu) +
                        ", n=" + std::to_string(r.n) + ")");
    }
  }
  return cfg;
}

SystemSpec system_spec_from_ini(const IniConfig& ini) {
  SystemSpec spec;
  spec.kind = system_kind_from_string(ini.get_string("system", "kind"));
  spec.n = static_cast<int>(ini.get_long("system", "n", 1));
  spec.N = static_cast<int>(ini.get_long("system", "N", 1));
  spec.nu = ini.get_double("system", "nu", 0.0);
  spec.lambda = ini.get_double("system", "lambda", 0.0);
  if (ini.has("system", "lambda_vec"))
    spec.lambda_vec = ini.get_vector("system", "lambda_vec");
  const std::string phi = ini.get_string("system", "phi", "det_power");
  if (phi == "det_power") {
    spec.phi = DriftTag::DET_POWER;
  } else if (phi == "power") {
    spec.phi = DriftTag::POWER_S;
  } else if (phi == "spherical") {
    spec.phi = DriftTag::SPHERICAL_S;
  } else {
    throw ConfigError("unknown phi tag '" + phi + "'");
  }
  if (ini.has("system", "s")) spec.s = ini.get_vector("system", "s");
  spec.validate();
  return spec;
}

StepperConfig stepper_from_ini(const IniConfig& ini) {
  StepperConfig cfg;
  cfg.h = ini.get_double("stepper", "h", 1e-3);
  const std::string scheme =
      ini.get_string("stepper", "scheme", "SPLIT_MULTIPLICATIVE");
  if (scheme == "SPLIT_MULTIPLICATIVE") {
    cfg.scheme = Scheme::SPLIT_MULTIPLICATIVE;
  } else if (scheme == "EULER_PROJECTED") {
    cfg.scheme = Scheme::EULER_PROJECTED;
  } else {
    throw ConfigError("unknown scheme '" + scheme + "'");
  }
  cfg.eig_floor = ini.get_double("stepper", "eig_floor", 1e-10);
  cfg.max_substeps = static_cast<int>(ini.get_long("stepper", "max_substeps", 20));
  cfg.store_every = static_cast<int>(ini.get_long("stepper", "store_every", 1));
  if (cfg.h <= 0.0) throw ConfigError("stepper h must be positive");
  if (cfg.eig_floor <= 0.0) throw ConfigError("eig_floor must be positive");
  return cfg;
}

}  // namespace pdflow
