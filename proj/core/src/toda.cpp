#include "pdflow/toda.hpp"

#include <cmath>

namespace pdflow {

void TodaState::validate() const {
  if (static_cast<int>(x.size()) != N || static_cast<int>(p.size()) != N)
    throw DomainError("TodaState: expected N positions and momenta");
  for (const Matrix& m : x) PdMatrix{m};
  for (const Matrix& m : p) SymMatrix{m};
}

LaxPair lax_pair(const TodaState& s) {
  const int N = s.N, n = s.n;
  LaxPair lp;
  lp.blocks = N;
  lp.n = n;
  lp.l = Matrix::Zero(N * n, N * n);
  lp.m = Matrix::Zero(N * n, N * n);
  for (int i = 0; i < N; ++i) {
    const Matrix b = s.p[i] * s.x[i].inverse();
    lp.l.block(i * n, i * n, n, n) = b;
    if (i + 1 < N) {
      const Matrix a = s.x[i + 1] * s.x[i].inverse();
      lp.l.block(i * n, (i + 1) * n, n, n) = -Matrix::Identity(n, n);
      lp.l.block((i + 1) * n, i * n, n, n) = a;
      lp.m.block((i + 1) * n, i * n, n, n) = a;
    }
  }
  return lp;
}

TodaState toda_rhs(const TodaState& s) {
  TodaState d;
  d.N = s.N;
  d.n = s.n;
  d.x.resize(s.N);
  d.p.resize(s.N);
  for (int i = 0; i < s.N; ++i) {
    d.x[i] = s.p[i];
    Matrix f = s.p[i] * s.x[i].inverse() * s.p[i];
    if (i > 0) f += s.x[i] * s.x[i - 1].inverse() * s.x[i];
    if (i + 1 < s.N) f -= s.x[i + 1];
    d.p[i] = 0.5 * (f + f.transpose());
  }
  return d;
}

std::vector<Matrix> constants_from_lax(const Matrix& l, int blocks, int n,
                                       int kmax) {
  std::vector<Matrix> out;
  Matrix power = l;
  for (int k = 1; k <= kmax; ++k) {
    Matrix c = Matrix::Zero(n, n);
    for (int i = 0; i < blocks; ++i) c += power.block(i * n, i * n, n, n);
    out.push_back(c);
    if (k < kmax) power = power * l;
  }
  return out;
}

std::vector<Matrix> constants_of_motion(const TodaState& s, int kmax) {
  if (kmax < 1) throw DomainError("constants_of_motion: kmax >= 1");
  const LaxPair lp = lax_pair(s);
  return constants_from_lax(lp.l, lp.blocks, lp.n, kmax);
}

namespace {

VecState axpy(const VecState& a, double c, const VecState& b) {
  VecState out(a.size());
  for (size_t i = 0; i < a.size(); ++i) out[i] = a[i] + c * b[i];
  return out;
}

}  // namespace

Rk4Result integrate_rk4(const RhsFn& rhs, const VecState& y0, double T,
                        double h, int store_every,
                        const std::vector<int>& pd_indices) {
  if (h <= 0.0 || T < 0.0) throw DomainError("integrate_rk4: T >= 0, h > 0");
  Rk4Result out;
  VecState y = y0;
  const long steps = std::lround(T / h);
  out.times.push_back(0.0);
  out.states.push_back(y);
  for (long step = 0; step < steps; ++step) {
    const VecState k1 = rhs(y);
    const VecState k2 = rhs(axpy(y, 0.5 * h, k1));
    const VecState k3 = rhs(axpy(y, 0.5 * h, k2));
    const VecState k4 = rhs(axpy(y, h, k3));
    for (size_t i = 0; i < y.size(); ++i) {
      y[i] += (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    const double t = (step + 1) * h;
    for (int idx : pd_indices) {
      Eigen::LLT<Matrix> llt(0.5 * (y[idx] + y[idx].transpose()));
      if (llt.info() != Eigen::Success || !is_finite(y[idx])) {
        throw ConeEscape(t, "state left the cone at t=" + std::to_string(t) +
                                " (component " + std::to_string(idx) + ")");
      }
    }
    if ((step + 1) % store_every == 0 || step + 1 == steps) {
      out.times.push_back(t);
      out.states.push_back(y);
    }
  }
  return out;
}

std::vector<Matrix> backlund_b(const BacklundState& s) {
  const int N = static_cast<int>(s.x.size());
  const int n = static_cast<int>(s.x[0].rows());
  std::vector<Matrix> b(N);
  for (int i = 0; i < N; ++i) {
    Matrix v = s.nu * Matrix::Identity(n, n);
    if (i < N - 1) v += s.y[i] * s.x[i].inverse();
    if (i > 0) v -= s.x[i] * s.y[i - 1].inverse();
    b[i] = v;
  }
  return b;
}

std::vector<Matrix> backlund_b_prime(const BacklundState& s) {
  const int N = static_cast<int>(s.x.size());
  const int n = static_cast<int>(s.x[0].rows());
  std::vector<Matrix> b(N - 1);
  for (int i = 0; i < N - 1; ++i) {
    b[i] = s.nu * Matrix::Identity(n, n) + s.y[i] * s.x[i].inverse() -
           s.x[i + 1] * s.y[i].inverse();
  }
  return b;
}

BacklundRhs backlund_rhs(const BacklundState& s) {
  BacklundRhs d;
  const std::vector<Matrix> b = backlund_b(s);
  const std::vector<Matrix> bp = backlund_b_prime(s);
  d.xdot.resize(s.x.size());
  d.ydot.resize(s.y.size());
  for (size_t i = 0; i < s.x.size(); ++i) {
    const Matrix v = b[i] * s.x[i];
    d.xdot[i] = 0.5 * (v + v.transpose());
  }
  for (size_t i = 0; i < s.y.size(); ++i) {
    const Matrix v = bp[i] * s.y[i];
    d.ydot[i] = 0.5 * (v + v.transpose());
  }
  return d;
}

double dressing_residual(const BacklundState& s) {
  const int N = static_cast<int>(s.x.size());
  const int n = static_cast<int>(s.x[0].rows());
  if (N < 2) throw DomainError("dressing_residual: N >= 2");
  const std::vector<Matrix> b = backlund_b(s);
  const std::vector<Matrix> bp = backlund_b_prime(s);

  Matrix l = Matrix::Zero(N * n, N * n);
  for (int i = 0; i < N; ++i) {
    l.block(i * n, i * n, n, n) = b[i];
    if (i + 1 < N) {
      l.block(i * n, (i + 1) * n, n, n) = -Matrix::Identity(n, n);
      l.block((i + 1) * n, i * n, n, n) = s.x[i + 1] * s.x[i].inverse();
    }
  }
  Matrix d = Matrix::Identity(N * n, N * n);
  for (int i = 0; i + 1 < N; ++i) {
    d.block((i + 1) * n, i * n, n, n) = s.x[i + 1] * s.y[i].inverse();
  }
  Matrix lhat = Matrix::Zero(N * n, N * n);
  for (int i = 0; i < N - 1; ++i) {
    lhat.block(i * n, i * n, n, n) = bp[i];
    if (i + 1 < N - 1) {
      lhat.block(i * n, (i + 1) * n, n, n) = -Matrix::Identity(n, n);
      lhat.block((i + 1) * n, i * n, n, n) = s.y[i + 1] * s.y[i].inverse();
    }
  }
  lhat.block((N - 2) * n, (N - 1) * n, n, n) = -Matrix::Identity(n, n);
  lhat.block((N - 1) * n, (N - 1) * n, n, n) = s.nu * Matrix::Identity(n, n);

  const Matrix lhs = l * d;
  const Matrix rhs = d * lhat;
  return (lhs - rhs).norm() / std::max({lhs.norm(), rhs.norm(), 1e-300});
}

// ---------------------------------------------------------------------------
// Critical points of F_λ on the anchored triangular domain

namespace {

// symmetric gradient ∂_{Y^m_i} F_λ  (free particles m < N)
Matrix cp_gradient(const TriangularArray& y, const Vector& lambda, int m, int i) {
  const Matrix& z = y.y(m, i);
  const Matrix zinv = PdMatrix(z).inverse();
  Matrix g = PdMatrix(y.y(m + 1, i)).inverse();
  g -= zinv * y.y(m + 1, i + 1) * zinv;
  if (i < m) g -= zinv * y.y(m - 1, i) * zinv;
  if (i > 1) g += PdMatrix(y.y(m - 1, i - 1)).inverse();
  g -= (lambda(m - 1) - lambda(m)) * zinv;
  return 0.5 * (g + g.transpose());
}

struct PairCoords {
  // flatten the free particles' symmetric matrices into pair coordinates
  static int free_count(int N) { return (N - 1) * N / 2; }

  static std::vector<double> gather(const TriangularArray& y, const Vector& lambda) {
    std::vector<double> r;
    const int n = y.n();
    for (int m = 1; m < y.levels(); ++m) {
      for (int i = 1; i <= m; ++i) {
        const Matrix g = cp_gradient(y, lambda, m, i);
        for (int a = 0; a < n; ++a)
          for (int b = a; b < n; ++b) r.push_back(g(a, b));
      }
    }
    return r;
  }

  static void perturb(TriangularArray& y, int var, double delta) {
    const int n = y.n();
    const int per = n * (n + 1) / 2;
    int particle = var / per;
    int rem = var % per;
    for (int m = 1; m < y.levels(); ++m) {
      for (int i = 1; i <= m; ++i) {
        if (particle-- > 0) continue;
        for (int a = 0; a < n; ++a) {
          for (int b = a; b < n; ++b) {
            if (rem-- == 0) {
              y.y(m, i)(a, b) += delta;
              if (a != b) y.y(m, i)(b, a) += delta;
              return;
            }
          }
        }
      }
    }
    throw DomainError("perturb: variable index out of range");
  }
};

}  // namespace

double cpe_residual(const TriangularArray& y, const Vector& lambda) {
  double worst = 0.0;
  for (int m = 1; m < y.levels(); ++m) {
    for (int i = 1; i <= m; ++i) {
      const Matrix theta = y.y(m, i) * cp_gradient(y, lambda, m, i);
      worst = std::max(worst, theta.norm());
    }
  }
  return worst;
}

TriangularArray critical_point(const Vector& lambda,
                               const std::vector<PdMatrix>& x, double tol,
                               int max_iter) {
  const int N = static_cast<int>(x.size());
  const int n = x[0].dim();
  if (lambda.size() != N) throw DomainError("critical_point: |λ| != N");
  TriangularArray y = TriangularArray::anchored(x);
  if (N == 1) return y;

  // geometric interpolation of the anchoring row
  std::vector<Matrix> logs(N);
  for (int j = 0; j < N; ++j) logs[j] = logm_pd(x[j]);
  for (int m = 1; m < N; ++m) {
    for (int i = 1; i <= m; ++i) {
      Matrix acc = Matrix::Zero(n, n);
      for (int j = i; j <= i + N - m; ++j) acc += logs[j - 1];
      y.y(m, i) = expm_sym(acc / (N - m + 1));
    }
  }

  const int nvars = PairCoords::free_count(N) * n * (n + 1) / 2;
  std::vector<double> r = PairCoords::gather(y, lambda);
  auto norm2 = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double e : v) s += e * e;
    return s;
  };

  for (int iter = 0; iter < max_iter; ++iter) {
    if (cpe_residual(y, lambda) <= tol) return y;
    // Jacobian by forward differences
    Matrix jac(nvars, nvars);
    const double delta = 1e-7;
    for (int c = 0; c < nvars; ++c) {
      TriangularArray yp = y;
      PairCoords::perturb(yp, c, delta);
      const std::vector<double> rp = PairCoords::gather(yp, lambda);
      for (int rr = 0; rr < nvars; ++rr) jac(rr, c) = (rp[rr] - r[rr]) / delta;
    }
    Vector rhs(nvars);
    for (int k = 0; k < nvars; ++k) rhs(k) = -r[k];
    const Vector step = jac.fullPivLu().solve(rhs);

    const double base = norm2(r);
    double scale = 1.0;
    bool moved = false;
    for (int bt = 0; bt < 40; ++bt) {
      TriangularArray trial = y;
      for (int c = 0; c < nvars; ++c)
        PairCoords::perturb(trial, c, scale * step(c));
      bool pd = true;
      try {
        trial.check_pd();
      } catch (const DomainError&) {
        pd = false;
      }
      if (pd) {
        const std::vector<double> rt = PairCoords::gather(trial, lambda);
        if (norm2(rt) < base) {
          y = trial;
          r = rt;
          moved = true;
          break;
        }
      }
      scale *= 0.5;
    }
    if (!moved) {
      throw NumericError("critical_point: stalled, residual " +
                         std::to_string(cpe_residual(y, lambda)));
    }
  }
  if (cpe_residual(y, lambda) <= tol) return y;
  throw NumericError("critical_point: iteration cap, residual " +
                     std::to_string(cpe_residual(y, lambda)));
}

std::vector<Matrix> cascade_rhs(const TriangularArray& y, const Vector& lambda) {
  const int N = y.levels();
  if (lambda.size() != N) throw DomainError("cascade_rhs: |λ| != N");
  std::vector<Matrix> d(y.particle_count());
  for (int m = 1; m <= N; ++m) {
    for (int i = 1; i <= m; ++i) {
      Matrix v = lambda(m - 1) * y.y(m, i);
      if (i < m) v += y.y(m - 1, i);  // Y^{m-1}_m = 0 convention
      if (i > 1) {
        const Matrix below_inv = PdMatrix(y.y(m - 1, i - 1)).inverse();
        v -= y.y(m, i) * below_inv * y.y(m, i);
      }
      d[TriangularArray::flat_index(m, i)] = 0.5 * (v + v.transpose());
    }
  }
  return d;
}

TodaState toda_from_cascade(const TriangularArray& y, const Vector& lambda) {
  const int N = y.levels();
  TodaState s;
  s.N = N;
  s.n = y.n();
  const std::vector<Matrix> d = cascade_rhs(y, lambda);
  for (int i = 1; i <= N; ++i) {
    s.x.push_back(y.y(N, i));
    s.p.push_back(d[TriangularArray::flat_index(N, i)]);
  }
  return s;
}

}  // namespace pdflow
