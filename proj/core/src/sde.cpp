#include "pdflow/sde.hpp"

#include <cmath>

#include "pdflow/specfun.hpp"
#include "pdflow/whittaker.hpp"

namespace pdflow {

const char* to_string(SystemKind k) {
  switch (k) {
    case SystemKind::DOOB_BM: return "DOOB_BM";
    case SystemKind::BURKE_PAIR: return "BURKE_PAIR";
    case SystemKind::CHAIN: return "CHAIN";
    case SystemKind::CHAIN_INV: return "CHAIN_INV";
    case SystemKind::BESSEL_TRIPLE: return "BESSEL_TRIPLE";
    case SystemKind::MY_PAIR: return "MY_PAIR";
    case SystemKind::WALL_PAIR: return "WALL_PAIR";
    case SystemKind::TRIANGULAR: return "TRIANGULAR";
    case SystemKind::NRW: return "NRW";
    case SystemKind::NRW_BURKE_PAIR: return "NRW_BURKE_PAIR";
  }
  return "?";
}

SystemKind system_kind_from_string(const std::string& name) {
  for (SystemKind k :
       {SystemKind::DOOB_BM, SystemKind::BURKE_PAIR, SystemKind::CHAIN,
        SystemKind::CHAIN_INV, SystemKind::BESSEL_TRIPLE, SystemKind::MY_PAIR,
        SystemKind::WALL_PAIR, SystemKind::TRIANGULAR, SystemKind::NRW,
        SystemKind::NRW_BURKE_PAIR}) {
    if (name == to_string(k)) return k;
  }
  throw DomainError("unknown system kind '" + name + "'");
}

int SystemSpec::particle_count() const {
  switch (kind) {
    case SystemKind::DOOB_BM:
    case SystemKind::NRW:
      return 1;
    case SystemKind::BURKE_PAIR:
    case SystemKind::MY_PAIR:
    case SystemKind::WALL_PAIR:
    case SystemKind::NRW_BURKE_PAIR:
      return 2;
    case SystemKind::BESSEL_TRIPLE:
      return 3;
    case SystemKind::CHAIN:
    case SystemKind::CHAIN_INV:
      return N;
    case SystemKind::TRIANGULAR:
      return N * (N + 1) / 2;
  }
  return 0;
}

void SystemSpec::validate() const {
  if (n < 1) throw DomainError("n >= 1 required");
  switch (kind) {
    case SystemKind::BURKE_PAIR:
      if (!(2.0 * (lambda - nu) > n - 1)) {
        throw DomainError("kind=BURKE_PAIR requires 2(λ−ν)>n−1 (got λ=" +
                          std::to_string(lambda) + ", ν=" + std::to_string(nu) +
                          ", n=" + std::to_string(n) + ")");
      }
      break;
    case SystemKind::NRW_BURKE_PAIR:
      if (!(2.0 * lambda > n - 1)) {
        throw DomainError("kind=NRW_BURKE_PAIR requires 2λ>n−1 (got λ=" +
                          std::to_string(lambda) + ", n=" + std::to_string(n) +
                          ")");
      }
      break;
    case SystemKind::CHAIN:
    case SystemKind::CHAIN_INV:
      if (N < 1) throw DomainError("chain requires N >= 1");
      if (lambda_vec.size() != N)
        throw DomainError("chain requires a drift vector of length N");
      break;
    case SystemKind::TRIANGULAR:
      if (N < 1) throw DomainError("triangular requires N >= 1");
      if (lambda_vec.size() != N)
        throw DomainError("triangular requires λ of length N");
      break;
    case SystemKind::DOOB_BM:
      if (phi != DriftTag::DET_POWER && s.size() != n)
        throw DomainError("drift exponent vector must have length n");
      if (phi == DriftTag::SPHERICAL_S && n > 2)
        throw DomainError("spherical drift supported for n <= 2");
      break;
    default:
      break;
  }
}

std::vector<NoiseType> noise_types(const SystemSpec& spec) {
  const int p = spec.particle_count();
  std::vector<NoiseType> t(p, NoiseType::DELTA);
  switch (spec.kind) {
    case SystemKind::MY_PAIR:
      t[1] = NoiseType::NONE;
      break;
    case SystemKind::NRW:
    case SystemKind::NRW_BURKE_PAIR:
      std::fill(t.begin(), t.end(), NoiseType::OMEGA);
      break;
    default:
      break;
  }
  return t;
}

namespace {

Matrix sym_part(const Matrix& a) { return 0.5 * (a + a.transpose()); }

Matrix pd_sqrt_fast(const Matrix& x) {
  const int n = static_cast<int>(x.rows());
  Eigen::SelfAdjointEigenSolver<Matrix> es;
  if (n <= 3) {
    es.computeDirect(x);
  } else {
    es.compute(x);
  }
  Vector lam = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().transpose();
}

// drift of the Doob transform Δ^{(φ)}: a = 2 X (∂ ln φ) X
Matrix doob_drift(const SystemSpec& spec, const Matrix& x) {
  switch (spec.phi) {
    case DriftTag::DET_POWER:
      return 2.0 * spec.nu * x;
    case DriftTag::POWER_S: {
      const int n = spec.n;
      Matrix grad = Matrix::Zero(n, n);
      for (int k = 1; k <= n; ++k) {
        if (spec.s(k - 1) == 0.0) continue;
        Matrix pad = Matrix::Zero(n, n);
        pad.topLeftCorner(k, k) = x.topLeftCorner(k, k).inverse();
        grad += spec.s(k - 1) * pad;
      }
      return sym_part(2.0 * x * grad * x);
    }
    case DriftTag::SPHERICAL_S: {
      const ScalarField logh = [&](const Matrix& m) {
        return std::log(spherical_h_small(spec.s, PdMatrix(m)));
      };
      const Matrix grad = matrix_grad_fd(logh, x, 1e-6).mat();
      return sym_part(2.0 * x * grad * x);
    }
  }
  return Matrix::Zero(spec.n, spec.n);
}

}  // namespace

std::vector<Matrix> drift_field(const SystemSpec& spec, const State& state) {
  const int p = spec.particle_count();
  if (static_cast<int>(state.size()) != p) {
    throw DomainError("drift_field: state has " + std::to_string(state.size()) +
                      " particles, spec expects " + std::to_string(p));
  }
  for (const Matrix& m : state) {
    if (m.rows() != spec.n || m.cols() != spec.n)
      throw DomainError("drift_field: particle dimension mismatch");
  }
  std::vector<Matrix> a(p);
  switch (spec.kind) {
    case SystemKind::DOOB_BM:
      a[0] = doob_drift(spec, state[0]);
      break;
    case SystemKind::BURKE_PAIR: {
      const Matrix& x = state[0];
      const Matrix& y = state[1];
      a[0] = 2.0 * y + 2.0 * spec.nu * x;
      a[1] = 2.0 * spec.lambda * y;
      break;
    }
    case SystemKind::CHAIN:
      for (int i = 0; i < p; ++i) {
        a[i] = 2.0 * spec.lambda_vec(i) * state[i];
        if (i >= 1) a[i] += 2.0 * state[i - 1];
      }
      break;
    case SystemKind::CHAIN_INV:
      for (int i = 0; i < p; ++i) {
        a[i] = 2.0 * spec.lambda_vec(i) * state[i];
        if (i >= 1) {
          const Matrix prev_inv = state[i - 1].inverse();
          a[i] -= 2.0 * state[i] * prev_inv * state[i];
        }
        a[i] = sym_part(a[i]);
      }
      break;
    case SystemKind::BESSEL_TRIPLE: {
      const Matrix& y = state[0];
      const Matrix& x1 = state[1];
      const Matrix& x2 = state[2];
      a[0] = 2.0 * spec.lambda * y;
      a[1] = 2.0 * spec.nu * x1 + 2.0 * y;
      a[2] = sym_part(2.0 * spec.nu * x2 - 2.0 * x2 * y.inverse() * x2);
      break;
    }
    case SystemKind::MY_PAIR:
      a[0] = spec.nu * state[0];
      a[1] = state[0];
      break;
    case SystemKind::WALL_PAIR: {
      const Matrix& q = state[0];
      const Matrix& x = state[1];
      a[0] = spec.nu * q + Matrix::Identity(spec.n, spec.n);
      a[1] = -spec.nu * x + 2.0 * q;
      break;
    }
    case SystemKind::TRIANGULAR: {
      for (int m = 1; m <= spec.N; ++m) {
        for (int i = 1; i <= m; ++i) {
          const int idx = TriangularArray::flat_index(m, i);
          const Matrix& y = state[idx];
          Matrix d = 2.0 * spec.lambda_vec(m - 1) * y;
          if (i < m) d += 2.0 * state[TriangularArray::flat_index(m - 1, i)];
          if (i > 1) {
            const Matrix below_inv =
                state[TriangularArray::flat_index(m - 1, i - 1)].inverse();
            d -= 2.0 * y * below_inv * y;
          }
          a[idx] = sym_part(d);
        }
      }
      break;
    }
    case SystemKind::NRW:
      a[0] = spec.nu * state[0];
      break;
    case SystemKind::NRW_BURKE_PAIR: {
      const Matrix& x = state[0];
      const Matrix& y = state[1];
      const Matrix xinv = x.inverse();
      a[0] = sym_part(x * y * xinv + xinv * y * x);
      a[1] = 2.0 * spec.lambda * y;
      break;
    }
  }
  return a;
}

namespace {

bool min_eig_above(const Matrix& x, double floor) {
  const int n = static_cast<int>(x.rows());
  Eigen::LLT<Matrix> llt(x - floor * Matrix::Identity(n, n));
  return llt.info() == Eigen::Success;
}

struct Stepper {
  const SystemSpec& spec;
  const StepperConfig& cfg;
  RngStream& rng;
  std::vector<NoiseType> types;
  double eps;  // sqrt(h/2)

  Stepper(const SystemSpec& s, const StepperConfig& c, RngStream& r)
      : spec(s), cfg(c), rng(r), types(noise_types(s)), eps(std::sqrt(c.h / 2.0)) {}

  void noise_phase(State& state) {
    const int n = spec.n;
    for (size_t i = 0; i < state.size(); ++i) {
      switch (types[i]) {
        case NoiseType::DELTA: {
          const Matrix m = expm(eps * rng.gaussian_matrix(n, n));
          const Matrix root = pd_sqrt_fast(state[i]);
          state[i] = sym_part(root * m.transpose() * m * root);
          break;
        }
        case NoiseType::OMEGA: {
          const Matrix m = expm(eps * rng.gaussian_matrix(n, n));
          state[i] = sym_part(m * state[i] * m.transpose());
          break;
        }
        case NoiseType::NONE:
          break;
      }
    }
  }

  void euler_phase(State& state) {
    const int n = spec.n;
    const std::vector<Matrix> a = drift_field(spec, state);
    for (size_t i = 0; i < state.size(); ++i) {
      Matrix next = state[i] + cfg.h * sym_part(a[i]);
      switch (types[i]) {
        case NoiseType::DELTA: {
          const Matrix root = pd_sqrt_fast(state[i]);
          next += std::sqrt(cfg.h) * root * rng.gaussian_sym(n) * root +
                  cfg.h * 0.5 * (n + 1.0) * state[i];
          break;
        }
        case NoiseType::OMEGA: {
          const Matrix b = rng.gaussian_matrix(n, n);
          next += eps * (b.transpose() * state[i] + state[i] * b) +
                  cfg.h * 0.5 *
                      (state[i] + state[i].trace() * Matrix::Identity(n, n));
          break;
        }
        case NoiseType::NONE:
          break;
      }
      // projection: clamp eigenvalues at the floor
      Eigen::SelfAdjointEigenSolver<Matrix> es(sym_part(next));
      const Vector lam = es.eigenvalues().cwiseMax(cfg.eig_floor);
      state[i] =
          es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().transpose();
    }
  }

  void drift_guarded(State& state, double h, double t, int depth) {
    const std::vector<Matrix> a = drift_field(spec, state);
    State trial = state;
    int bad = -1;
    for (size_t i = 0; i < state.size(); ++i) {
      trial[i] = state[i] + h * sym_part(a[i]);
      if (types[i] != NoiseType::NONE &&
          !min_eig_above(trial[i], cfg.eig_floor)) {
        bad = static_cast<int>(i);
        break;
      }
    }
    if (bad < 0) {
      state = std::move(trial);
      return;
    }
    if (depth >= cfg.max_substeps) {
      throw NumericError("stiff drift; reduce h (t=" + std::to_string(t) +
                         ", particle=" + std::to_string(bad) + ")");
    }
    drift_guarded(state, 0.5 * h, t, depth + 1);
    drift_guarded(state, 0.5 * h, t + 0.5 * h, depth + 1);
  }

  void step(State& state, double t) {
    if (cfg.scheme == Scheme::SPLIT_MULTIPLICATIVE) {
      noise_phase(state);
      drift_guarded(state, cfg.h, t, 0);
    } else {
      euler_phase(state);
    }
  }
};

}  // namespace

void simulate_visit(const SystemSpec& spec, const State& init, double T,
                    const StepperConfig& cfg, RngStream& rng,
                    const std::function<void(double, const State&)>& visit) {
  spec.validate();
  if (static_cast<int>(init.size()) != spec.particle_count()) {
    throw DomainError("simulate: initial state size mismatch");
  }
  if (T < 0.0 || cfg.h <= 0.0) throw DomainError("simulate: T >= 0, h > 0");
  Stepper stepper(spec, cfg, rng);
  State state = init;
  visit(0.0, state);
  const long steps = std::lround(T / cfg.h);
  for (long k = 0; k < steps; ++k) {
    const double t = k * cfg.h;
    stepper.step(state, t);
    visit((k + 1) * cfg.h, state);
  }
}

PathSample simulate(const SystemSpec& spec, const State& init, double T,
                    const StepperConfig& cfg, RngStream& rng) {
  PathSample path;
  path.seed = rng.seed();
  path.stream = rng.stream_id();
  long counter = 0;
  const long every = std::max(1, cfg.store_every);
  const long steps = std::lround(T / cfg.h);
  simulate_visit(spec, init, T, cfg, rng, [&](double t, const State& s) {
    if (counter % every == 0 || counter == steps) {
      for (const Matrix& m : s) PdMatrix{m};  // stored states stay in the cone
      path.times.push_back(t);
      path.states.push_back(s);
    }
    ++counter;
  });
  return path;
}

GlPath gl_bm_path(int n, double nu, double T, double h, RngStream& rng,
                  int store_every, const Matrix* g0) {
  if (T < 0.0 || h <= 0.0) throw DomainError("gl_bm_path: T >= 0, h > 0");
  GlPath path;
  const double eps = std::sqrt(h / 2.0);
  Matrix g = g0 ? *g0 : Matrix::Identity(n, n);
  const long steps = std::lround(T / h);
  const double drift_factor = std::exp(nu * h);
  for (long k = 0; k <= steps; ++k) {
    if (k > 0) g = drift_factor * (expm(eps * rng.gaussian_matrix(n, n)) * g);
    if (k % store_every == 0 || k == steps) {
      path.times.push_back(k * h);
      path.g.push_back(g);
      path.y.push_back(g.transpose() * g);
    }
  }
  return path;
}

NrwPath nrw_path(int n, double nu, double T, double h, RngStream& rng,
                 int store_every) {
  NrwPath path;
  const double eps = std::sqrt(h / 2.0);
  Matrix g = Matrix::Identity(n, n);
  const long steps = std::lround(T / h);
  const double drift_factor = std::exp(0.5 * nu * h);
  for (long k = 0; k <= steps; ++k) {
    if (k > 0) g = drift_factor * (expm(eps * rng.gaussian_matrix(n, n)) * g);
    if (k % store_every == 0 || k == steps) {
      path.times.push_back(k * h);
      path.x.push_back(g * g.transpose());
      path.y.push_back(g.transpose() * g);
    }
  }
  return path;
}

double path_functional(const PathSample& path, const Functional& fn) {
  const size_t m = path.times.size();
  if (m == 0) throw DomainError("path_functional: empty path");
  const int i = fn.particle;
  auto integrand = [&](size_t k) {
    switch (fn.kind) {
      case FunctionalKind::INT_TRACE:
        return path.states[k][i].trace();
      case FunctionalKind::INT_CROSS:
        return (path.states[k][i].inverse() * path.states[k][i + 1]).trace();
      default:
        return 0.0;
    }
  };
  switch (fn.kind) {
    case FunctionalKind::INT_TRACE:
    case FunctionalKind::INT_CROSS: {
      double acc = 0.0;
      double prev = integrand(0);
      for (size_t k = 1; k < m; ++k) {
        const double cur = integrand(k);
        acc += 0.5 * (prev + cur) * (path.times[k] - path.times[k - 1]);
        prev = cur;
      }
      if (!std::isfinite(acc)) throw NumericError("path_functional: non-finite");
      return acc;
    }
    case FunctionalKind::LOG_EIG: {
      const EigDecomp e0 = eig_sym(path.states.front()[i]);
      const EigDecomp eT = eig_sym(path.states.back()[i]);
      const double dt = path.times.back() - path.times.front();
      return (std::log(eT.eigenvalues(fn.component)) -
              std::log(e0.eigenvalues(fn.component))) /
             dt;
    }
    case FunctionalKind::TERMINAL_LOGDET:
      return PdMatrix(path.states.back()[i]).log_det();
  }
  throw DomainError("path_functional: bad kind");
}

double generator_apply_fd(const SystemSpec& spec,
                          const std::function<double(const State&)>& f,
                          const State& state, double h) {
  const std::vector<Matrix> a = drift_field(spec, state);
  const std::vector<NoiseType> types = noise_types(spec);
  double out = 0.0;
  for (size_t i = 0; i < state.size(); ++i) {
    State work = state;
    const ScalarField fi = [&](const Matrix& m) {
      work[i] = m;
      const double v = f(work);
      work[i] = state[i];
      return v;
    };
    const PdMatrix xi(state[i]);
    switch (types[i]) {
      case NoiseType::DELTA:
        out += laplacian_fd(fi, xi.mat(), h);
        break;
      case NoiseType::OMEGA:
        out += omega_fd(fi, xi.mat(), h);
        break;
      case NoiseType::NONE:
        break;
    }
    const Matrix grad = matrix_grad_fd(fi, xi.mat(), 0.1 * h).mat();
    out += (a[i] * grad).trace();
  }
  return out;
}

}  // namespace pdflow
