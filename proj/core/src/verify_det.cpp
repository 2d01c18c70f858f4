#include <cmath>

#include "experiments_impl.hpp"
#include "pdflow/calculus.hpp"
#include "pdflow/csvio.hpp"
#include "pdflow/quad.hpp"
#include "pdflow/samplers.hpp"
#include "pdflow/toda.hpp"
#include "pdflow/whittaker.hpp"

namespace pdflow::detail {

namespace {

constexpr double kH1 = 1e-5;
constexpr double kH2 = 1e-4;

double scalar(const Matrix& m) { return m(0, 0); }

Matrix m1(double v) {
  Matrix m(1, 1);
  m(0, 0) = v;
  return m;
}

// scalar (n=1) cone operators through the matrix machinery
double lap1(const std::function<double(double)>& f, double x, double h = kH2) {
  return laplacian_fd([&](const Matrix& m) { return f(scalar(m)); }, m1(x), h);
}

double dx1(const std::function<double(double)>& f, double x, double h = kH1) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

struct MaxErr {
  double value = 0.0;
  void track(double e) { value = std::max(value, e); }
};

}  // namespace

// ---------------------------------------------------------------------------
// Criterion 1: calculus identity suite

std::vector<StatReport> run_calculus_suite(const Resolved& r) {
  RngStream rng(r.seed, 1);
  const double nu = 0.7;
  MaxErr dax, de, d2ax, d2etr, d2e, power, power2, dk, d2k, pr, gl, inv;

  for (int n = 1; n <= 3; ++n) {
    for (int pt = 0; pt < 20; ++pt) {
      const PdMatrix x = random_pd(n, rng, 0.3);
      const PdMatrix a = random_pd(n, rng, 0.35);
      const PdMatrix y = random_pd(n, rng, 0.3);
      const Matrix xinv = x.inverse();

      const ScalarField tr_ax = [&](const Matrix& m) {
        return (a.mat() * m).trace();
      };
      const ScalarField tr_axinv = [&](const Matrix& m) {
        return (a.mat() * PdMatrix(m).inverse()).trace();
      };
      const ScalarField det_nu = [&](const Matrix& m) {
        return std::exp(nu * PdMatrix(m).log_det());
      };

      // first-order identities
      dax.track(rel_diff(theta_fd(tr_ax, x.mat(), kH1), Matrix(x.mat() * a.mat())));
      dax.track(rel_diff(theta_fd(tr_axinv, x.mat(), kH1),
                         Matrix(-a.mat() * xinv)));
      de.track(rel_diff(theta_fd(det_nu, x.mat(), kH1),
                        Matrix(nu * det_nu(x.mat()) *
                               Matrix::Identity(n, n))));

      // second-order closed forms
      d2ax.track(rel_diff(laplacian_fd(tr_ax, x.mat(), kH2),
                          0.5 * (n + 1.0) * tr_ax(x.mat())));
      d2ax.track(rel_diff(laplacian_fd(tr_axinv, x.mat(), kH2),
                          0.5 * (n + 1.0) * tr_axinv(x.mat())));
      {
        const Matrix as = 0.4 * a.mat();
        const ScalarField etr_ax = [&](const Matrix& m) {
          return std::exp((as * m).trace());
        };
        const double tr1 = (as * x.mat()).trace();
        const double tr2 = (as * x.mat() * as * x.mat()).trace();
        const double expect = (0.5 * (n + 1.0) * tr1 + tr2) * std::exp(tr1);
        d2etr.track(rel_diff(laplacian_fd(etr_ax, x.mat(), kH2), expect));
      }
      d2e.track(rel_diff(laplacian_fd(det_nu, x.mat(), kH2),
                         n * nu * nu * det_nu(x.mat())));
      {
        const ScalarField logdet_nu = [&](const Matrix& m) {
          return nu * PdMatrix(m).log_det();
        };
        d2e.track(std::abs(laplacian_fd(logdet_nu, x.mat(), kH2)));
      }
      for (int k = 2; k <= 3; ++k) {
        const ScalarField trk = [&](const Matrix& m) {
          Matrix p = m;
          for (int i = 1; i < k; ++i) p = p * m;
          return p.trace();
        };
        double expect = 0.5 * k * k * trk(x.mat());
        for (int j = 1; j <= k; ++j) {
          const double tj = PdMatrix(x.mat()).power(j).trace();
          const double tkj =
              (k - j == 0) ? n : PdMatrix(x.mat()).power(k - j).trace();
          expect += 0.5 * k * tj * tkj;
        }
        power.track(rel_diff(laplacian_fd(trk, x.mat(), kH2), expect));
      }
      for (int k = 1; k <= 2; ++k) {
        const ScalarField trmk = [&](const Matrix& m) {
          return PdMatrix(m).power(-k).trace();
        };
        double expect = 0.5 * k * k * x.power(-k).trace();
        for (int j = 1; j <= k; ++j) {
          const double tj = x.power(-j).trace();
          const double tkj = (j - k == 0) ? n : x.power(j - k).trace();
          expect += 0.5 * k * tj * tkj;
        }
        power2.track(rel_diff(laplacian_fd(trmk, x.mat(), kH2), expect));
      }

      // kernel k(X,Y) = etr(-Y X^{-1}); Y normalized so tr(YX^{-1}) is O(1),
      // keeping the exponential's higher derivatives inside fd resolution
      {
        const Matrix yraw = y.mat() * xinv;
        const Matrix ym = y.mat() * (1.2 / yraw.trace());
        const Matrix yxinv = ym * xinv;
        const ScalarField logk_x = [&](const Matrix& m) {
          return -(ym * PdMatrix(m).inverse()).trace();
        };
        const ScalarField logk_y = [&](const Matrix& m) {
          return -(m * xinv).trace();
        };
        dk.track(rel_diff(theta_fd(logk_x, x.mat(), kH1), yxinv));
        dk.track(rel_diff(theta_fd(logk_y, ym, kH1), Matrix(-yxinv)));
        const double kval = std::exp(-yxinv.trace());
        const double expect =
            (-0.5 * (n + 1.0) * yxinv.trace() + (yxinv * yxinv).trace()) * kval;
        const ScalarField k_x = [&](const Matrix& m) {
          return std::exp(-(ym * PdMatrix(m).inverse()).trace());
        };
        const ScalarField k_y = [&](const Matrix& m) {
          return std::exp(-(m * xinv).trace());
        };
        d2k.track(rel_diff(laplacian_fd(k_x, x.mat(), kH2), expect));
        d2k.track(rel_diff(laplacian_fd(k_y, ym, kH2), expect));
      }

      // product rule
      {
        const ScalarField f = tr_ax;
        const ScalarField g = [&](const Matrix& m) { return (m * m).trace(); };
        const ScalarField fg = [&](const Matrix& m) { return f(m) * g(m); };
        const double rhs = laplacian_fd(f, x.mat(), kH2) * g(x.mat()) +
                           f(x.mat()) * laplacian_fd(g, x.mat(), kH2) +
                           2.0 * (theta_fd(f, x.mat(), kH1) *
                                  theta_fd(g, x.mat(), kH1))
                                     .trace();
        pr.track(rel_diff(laplacian_fd(fg, x.mat(), kH2), rhs));
      }

      // GL-invariance: (Δf)(X[a]) = Δ(f ∘ congruence_a)(X), bump test function
      if (pt < 5) {
        Matrix ga = rng.gaussian_matrix(n, n);
        ga += 0.2 * Matrix::Identity(n, n);
        const PdMatrix xa = congruence(x, ga);
        Matrix dir = rng.gaussian_sym(n);
        dir /= dir.norm();
        const double rad = 1.0 + 0.5 * xa.mat().norm();
        const Matrix center = xa.mat() + 0.35 * rad * dir;
        const ScalarField f = [&](const Matrix& m) {
          const double t = (m - center).squaredNorm() / (rad * rad);
          return bump(t);
        };
        const double lhs = laplacian_fd(f, xa.mat(), kH2);
        const ScalarField fa = [&](const Matrix& m) {
          return f(ga.transpose() * m * ga);
        };
        const double rhs = laplacian_fd(fa, x.mat(), kH2);
        gl.track(rel_diff(lhs, rhs, 1e-6));
      }

      // inversion invariance
      if (pt < 5) {
        const ScalarField g = [&](const Matrix& m) {
          return (a.mat() * m).trace() + (m * m).trace();
        };
        const double lhs = laplacian_fd(g, xinv, kH2);
        const ScalarField ginv = [&](const Matrix& m) {
          return g(PdMatrix(m).inverse());
        };
        inv.track(rel_diff(lhs, laplacian_fd(ginv, x.mat(), kH2)));
      }
    }
  }

  std::vector<StatReport> rows;
  rows.push_back(residual_report("CALCULUS_DAX", dax.value, 1e-6, r.policy));
  rows.push_back(residual_report("CALCULUS_DE", de.value, 1e-6, r.policy));
  rows.push_back(residual_report("CALCULUS_D2AX", d2ax.value, 1e-5, r.policy));
  rows.push_back(residual_report("CALCULUS_D2ETR", d2etr.value, 1e-5, r.policy));
  rows.push_back(residual_report("CALCULUS_D2E", d2e.value, 1e-5, r.policy));
  rows.push_back(residual_report("CALCULUS_POWER", power.value, 1e-5, r.policy));
  rows.push_back(residual_report("CALCULUS_POWER2", power2.value, 1e-5, r.policy));
  rows.push_back(residual_report("CALCULUS_DK", dk.value, 1e-5, r.policy));
  rows.push_back(residual_report("CALCULUS_D2K", d2k.value, 1e-5, r.policy));
  rows.push_back(residual_report("CALCULUS_PRODUCT_RULE", pr.value, 1e-5, r.policy));
  rows.push_back(residual_report("CALCULUS_GL_INVARIANCE", gl.value, 1e-4, r.policy));
  rows.push_back(residual_report("CALCULUS_INVERSION", inv.value, 1e-4, r.policy));
  return rows;
}

// ---------------------------------------------------------------------------
// Criterion 2: eigenfunction property of p_s (and p_{s,k})

std::vector<StatReport> run_eigenfunction_suite(const Resolved& r) {
  RngStream rng(r.seed, 2);
  std::vector<StatReport> rows;
  for (int n = 1; n <= 3; ++n) {
    MaxErr err;
    for (int pt = 0; pt < 7; ++pt) {
      Vector s(n);
      for (int i = 0; i < n; ++i) s(i) = 1.2 * (rng.uniform() - 0.5);
      const PdMatrix x = random_pd(n, rng, 0.3);
      const double lam = lambda2(s);
      const ScalarField ps = [&](const Matrix& m) { return power_fn(s, m); };
      const double fd = laplacian_fd(ps, x.mat(), kH2);
      const double f0 = ps(x.mat());
      err.track(std::abs(fd - lam * f0) / (std::abs(f0) * (1.0 + std::abs(lam))));
      if (pt < 3) {
        const Matrix k = sample_haar_orthogonal(n, rng);
        const ScalarField psk = [&](const Matrix& m) {
          return power_fn(s, k.transpose() * m * k);
        };
        const double fdk = laplacian_fd(psk, x.mat(), kH2);
        const double f0k = psk(x.mat());
        err.track(std::abs(fdk - lam * f0k) /
                  (std::abs(f0k) * (1.0 + std::abs(lam))));
      }
    }
    StatReport row = residual_report("EIGENFUNCTION_N" + std::to_string(n),
                                     err.value, 1e-4, r.policy);
    row.params = "n=" + std::to_string(n);
    rows.push_back(row);
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Criterion 3: Bessel reductions

std::vector<StatReport> run_bessel_suite(const Resolved& r) {
  std::vector<StatReport> rows;
  RngStream rng(r.seed, 3);

  // n=1 against the Macdonald-function oracle
  {
    MaxErr err;
    for (double nu : {0.0, 0.7, 1.5}) {
      for (int i = 0; i < 20; ++i) {
        const double xv = 0.1 * std::pow(100.0, i / 19.0);  // 0.1 .. 10
        const IntegralResult impl = bessel_B(nu, PdMatrix(m1(xv)));
        const double oracle =
            2.0 * std::pow(xv, -0.5 * nu) * macdonald_k(nu, 2.0 * std::sqrt(xv));
        err.track(rel_diff(impl.value, oracle));
      }
    }
    StatReport row = residual_report("BESSEL_N1_MACDONALD", err.value, 1e-6,
                                     r.policy);
    row.params = "nu=0,0.7,1.5;grid=20";
    rows.push_back(row);
  }

  BesselConfig cfg;
  cfg.haar_samples = r.quick ? 96 : 288;
  cfg.seed = r.seed;

  // symmetry e_ν(V) K(ν|V,W) = e_ν(W) K(-ν|V,W) at n=2
  {
    const PdMatrix v = random_pd(2, rng);
    const PdMatrix w = random_pd(2, rng);
    const double nu = r.nu;
    const IntegralResult kp = bessel_K_nu(nu, v, w, cfg);
    const IntegralResult km = bessel_K_nu(-nu, v, w, cfg);
    const double ev = std::exp(nu * v.log_det());
    const double ew = std::exp(nu * w.log_det());
    StatReport row;
    row.kind = "BESSEL_SYMMETRY";
    row.params = "n=2;nu=" + format_double(nu);
    row.estimate = ev * kp.value;
    row.stderr_ = ev * kp.error;
    row.reference = ew * km.value;
    row.reference_error = ew * km.error;
    finalize_report(row, r.policy);
    rows.push_back(row);
  }

  // reduction K(s|V,W) = p_s(W) K(s|gVg^t, I), W = g^t g
  {
    const PdMatrix v = random_pd(2, rng);
    const PdMatrix w = random_pd(2, rng);
    Vector s(2);
    s << 0.3, 0.9;
    const IntegralResult lhs = bessel_K(s, v, w, cfg);
    const Matrix g = upper_cholesky_factor(w);
    const PdMatrix v2(g * v.mat() * g.transpose());
    const IntegralResult rhs = bessel_K(s, v2, PdMatrix::identity(2), cfg);
    const double pw = power_fn(s, w.mat());
    StatReport row;
    row.kind = "BESSEL_REDUCTION";
    row.params = "n=2;s=0.3,0.9";
    row.estimate = lhs.value;
    row.stderr_ = lhs.error;
    row.reference = pw * rhs.value;
    row.reference_error = pw * rhs.error;
    finalize_report(row, r.policy);
    rows.push_back(row);
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Criterion 7: Whittaker identities

std::vector<StatReport> run_whittaker_eigen(const Resolved& r) {
  RngStream rng(r.seed, 7);
  Vector lambda(2);
  lambda << 0.8, 0.3;
  MaxErr err;
  PsiConfig pcfg;
  pcfg.rel_tol = 1e-11;
  for (int pt = 0; pt < 3; ++pt) {
    const double x1 = 0.6 + rng.uniform();
    const double x2 = 0.6 + rng.uniform();
    const auto psi = [&](double a, double b) {
      return whittaker_psi(lambda, {PdMatrix(m1(a)), PdMatrix(m1(b))}, pcfg)
          .value;
    };
    const double l1 = lap1([&](double a) { return psi(a, x2); }, x1, 2e-3);
    const double l2 = lap1([&](double b) { return psi(x1, b); }, x2, 2e-3);
    const double p0 = psi(x1, x2);
    const double pot = 2.0 * (x2 / x1) * p0;
    const double lamterm = (lambda(0) * lambda(0) + lambda(1) * lambda(1)) * p0;
    const double resid = l1 + l2 - pot - lamterm;
    const double scale =
        std::abs(l1) + std::abs(l2) + std::abs(pot) + std::abs(lamterm);
    err.track(std::abs(resid) / scale);
  }
  StatReport row = residual_report("WHITTAKER_EIGEN", err.value, 1e-4, r.policy);
  row.params = "n=1;N=2;lambda=0.8,0.3";
  return {row};
}

std::vector<StatReport> run_whittaker_wmp(const Resolved& r) {
  RngStream rng(r.seed, 8);
  std::vector<StatReport> rows;
  PsiConfig pcfg;
  pcfg.rel_tol = 1e-10;

  Vector lambda(3);
  lambda << 0.7, 0.2, -0.3;
  std::vector<PdMatrix> x;
  for (int i = 0; i < 3; ++i) x.push_back(PdMatrix(m1(0.5 + rng.uniform())));

  // drift shift ψ_{λ+ν1}(X) = e_ν(X) ψ_λ(X)
  {
    const double nu = 0.4;
    const IntegralResult base = whittaker_psi(lambda, x, pcfg);
    const IntegralResult shifted =
        whittaker_psi(lambda.array() + nu, x, pcfg);
    double log_e = 0.0;
    for (const PdMatrix& xi : x) log_e += nu * xi.log_det();
    StatReport row;
    row.kind = "WMP_SHIFT";
    row.params = "n=1;N=3";
    row.estimate = shifted.value;
    row.stderr_ = shifted.error;
    row.reference = std::exp(log_e) * base.value;
    row.reference_error = std::exp(log_e) * base.error;
    finalize_report(row, r.policy);
    rows.push_back(row);
  }

  // inversion ψ_λ(X) = ψ_{-λ}(X'), X' = (X_N^{-1},...,X_1^{-1})
  {
    const IntegralResult base = whittaker_psi(lambda, x, pcfg);
    std::vector<PdMatrix> xr;
    for (int i = 2; i >= 0; --i) xr.push_back(x[i].pd_inverse());
    const IntegralResult flipped = whittaker_psi(-lambda, xr, pcfg);
    StatReport row;
    row.kind = "WMP_INVERSION";
    row.params = "n=1;N=3";
    row.estimate = flipped.value;
    row.stderr_ = flipped.error;
    row.reference = base.value;
    row.reference_error = base.error;
    finalize_report(row, r.policy);
    rows.push_back(row);
  }

  // GL-covariance at n=2, N=2 through the Bessel reduction
  {
    Vector l2(2);
    l2 << 0.6, 0.1;
    PsiConfig pc2;
    pc2.bessel.haar_samples = r.quick ? 96 : 288;
    pc2.bessel.seed = r.seed;
    std::vector<PdMatrix> x2{random_pd(2, rng), random_pd(2, rng)};
    Matrix a = rng.gaussian_matrix(2, 2) + 0.3 * Matrix::Identity(2, 2);
    const IntegralResult base = whittaker_psi(l2, x2, pc2);
    std::vector<PdMatrix> xa{congruence(x2[0], a), congruence(x2[1], a)};
    const IntegralResult moved = whittaker_psi(l2, xa, pc2);
    const double det_ata = std::pow((a.transpose() * a).determinant(),
                                    l2.sum());
    StatReport row;
    row.kind = "WMP_COVARIANCE";
    row.params = "n=2;N=2";
    row.estimate = moved.value;
    row.stderr_ = moved.error;
    row.reference = det_ata * base.value;
    row.reference_error = std::abs(det_ata) * base.error;
    finalize_report(row, r.policy);
    rows.push_back(row);
  }
  return rows;
}

std::vector<StatReport> run_stade(const Resolved& r) {
  Vector lambda(2), nu(2);
  lambda << 1.2, 0.7;
  nu << 1.0, 0.6;
  const double s = 0.8, a_scale = 1.3;
  const IntegralResult lhs = stade_lhs_n1_2(s, a_scale, lambda, nu, 1e-7);
  const double rhs = stade_rhs_n1_2(s, a_scale, lambda, nu);
  StatReport row = residual_report("STADE", rel_diff(lhs.value, rhs), 1e-3,
                                   r.policy);
  row.params = "n=1;N=2;s=0.8;A=1.3";
  row.note += " quad_error=" + format_double(lhs.error / rhs);
  return {row};
}

std::vector<StatReport> run_whittaker_laplace(const Resolved& r) {
  // N=1, n=1: ∫ etr(-B X^{-1}) W_{λ,ν}(dX) = |I+B|^{-a}
  Vector lambda(1), nu(1);
  lambda << 0.9;
  nu << 0.7;
  const double a = lambda(0) + nu(0);
  MaxErr err;
  for (double b : {0.3, 1.0, 2.5}) {
    const Fn1 log_g = [&](double xv) {
      return -b / xv - 1.0 / xv - a * std::log(xv) - std::lgamma(a);
    };
    const QuadResult q = integrate_cone_1d_log(log_g, 1.0, 1e-11);
    err.track(rel_diff(q.value, std::pow(1.0 + b, -a)));
  }
  StatReport row = residual_report("WHITTAKER_LAPLACE", err.value, 1e-6,
                                   r.policy);
  row.params = "n=1;N=1;a=" + format_double(a);
  return {row};
}

std::vector<StatReport> run_whittaker_marginal(const Resolved& r) {
  // n=1, N=2: the X_2 marginal of W_{λ,ν} is inverse gamma(shape a, scale 1)
  Vector lambda(2), nu(2);
  lambda << 1.1, 0.6;
  nu << 0.9, 0.5;
  const double a = lambda.sum() + nu.sum();
  PsiConfig pcfg;
  pcfg.rel_tol = 1e-9;
  const auto dens = [&](double x1, double x2) {
    return whittaker_density(lambda, nu,
                             {PdMatrix(m1(x1)), PdMatrix(m1(x2))}, pcfg)
        .value;
  };
  // moments of x2 under the joint density, by iterated quadrature
  const auto moment = [&](double power) {
    const auto logf = [&](double u1, double u2) {
      const double v = dens(std::exp(u1), std::exp(u2));
      return v > 0.0 ? power * u2 + std::log(v) : -1e308;
    };
    return integrate_exp_plane(logf, 0.0, 0.0, 1e-6);
  };
  const QuadResult m0 = moment(0.0);
  const QuadResult mm1 = moment(-1.0);
  const QuadResult m1v = moment(1.0);
  std::vector<StatReport> rows;
  StatReport norm_row = residual_report("WHITTAKER_MARGINAL_NORM",
                                        rel_diff(m0.value, 1.0), 2e-3, r.policy);
  rows.push_back(norm_row);
  StatReport inv_row = residual_report(
      "WHITTAKER_MARGINAL_INV_MOMENT",
      rel_diff(mm1.value / m0.value, a), 2e-3, r.policy);
  rows.push_back(inv_row);
  StatReport mean_row = residual_report(
      "WHITTAKER_MARGINAL_MEAN",
      rel_diff(m1v.value / m0.value, 1.0 / (a - 1.0)), 2e-3, r.policy);
  rows.push_back(mean_row);
  for (StatReport& row : rows) row.params = "n=1;N=2;a=" + format_double(a);
  return rows;
}

// ---------------------------------------------------------------------------
// Intertwining relations, numeric (n=1; quadrature + finite differences)

namespace {

struct Bump2 {
  double cu, cv, w;
  double operator()(double u, double v) const {
    return bump((u - cu) / w) * bump((v - cv) / w);
  }
};

}  // namespace

std::vector<StatReport> run_intertwining(const Resolved& r) {
  RngStream rng(r.seed, 11);
  MaxErr err;
  const double w = 1.1;
  const int n_points = 5, n_funcs = 3;

  for (int ip = 0; ip < n_points; ++ip) {
    const double x = 0.6 + 1.2 * rng.uniform();
    const double u0 = std::log(x);
    for (int jf = 0; jf < n_funcs; ++jf) {
      const double cy = 0.8 * (rng.uniform() - 0.5);
      const Bump2 fb{u0 + 0.3, cy, w};
      const double ylo = std::exp(cy - w), yhi = std::exp(cy + w);

      switch (r.kind) {
        case ExperimentKind::INTERTWINING_BURKE: {
          // Δ ∘ K = K ∘ T, k = exp(-y/x), T = Δ_y + Δ_x + 2 y ∂_x
          const auto f = [&](double xv, double yv) {
            return fb(std::log(xv), std::log(yv));
          };
          const auto kf = [&](double xv) {
            return integrate_gk(
                       [&](double yv) {
                         return std::exp(-yv / xv) * f(xv, yv) / yv;
                       },
                       ylo, yhi, 0.0, 1e-11)
                .value;
          };
          const double lhs = lap1(kf, x, 2e-3 * x);
          const auto tf = [&](double xv, double yv) {
            const double dyy = lap1([&](double t) { return f(xv, t); }, yv,
                                    1e-3 * yv);
            const double dxx = lap1([&](double t) { return f(t, yv); }, xv,
                                    1e-3 * xv);
            const double dx = dx1([&](double t) { return f(t, yv); }, xv,
                                  1e-4 * xv);
            return dyy + dxx + 2.0 * yv * dx;
          };
          const double rhs =
              integrate_gk(
                  [&](double yv) {
                    return std::exp(-yv / x) * tf(x, yv) / yv;
                  },
                  ylo, yhi, 0.0, 1e-11)
                  .value;
          err.track(rel_diff(lhs, rhs, 1e-4));
          break;
        }
        case ExperimentKind::INTERTWINING_MY: {
          // J ∘ P = P ∘ M, J = Δ_x - x, p = exp(-a x - 1/a)
          const auto f = [&](double xv, double av) {
            return fb(std::log(xv), std::log(av));
          };
          const double alo = ylo, ahi = yhi;
          const auto pf = [&](double xv) {
            return integrate_gk(
                       [&](double av) {
                         return std::exp(-av * xv - 1.0 / av) * f(xv, av) / av;
                       },
                       alo, ahi, 0.0, 1e-11)
                .value;
          };
          const double lhs = lap1(pf, x, 2e-3 * x) - x * pf(x);
          const auto mf = [&](double xv, double av) {
            const double dxx = lap1([&](double t) { return f(t, av); }, xv,
                                    1e-3 * xv);
            const double dx = dx1([&](double t) { return f(t, av); }, xv,
                                  1e-4 * xv);
            const double da = dx1([&](double t) { return f(xv, t); }, av,
                                  1e-4 * av);
            return dxx - 2.0 * av * xv * xv * dx + av * av * xv * da;
          };
          const double rhs =
              integrate_gk(
                  [&](double av) {
                    return std::exp(-av * x - 1.0 / av) * mf(x, av) / av;
                  },
                  alo, ahi, 0.0, 1e-11)
                  .value;
          err.track(rel_diff(lhs, rhs, 1e-4));
          break;
        }
        case ExperimentKind::INTERTWINING_SYM:
        case ExperimentKind::INTERTWINING_NCT:
        case ExperimentKind::INTERTWINING_HG: {
          // operators on (x1, x2) with an auxiliary y-integral
          const double x2 = 0.6 + 1.2 * rng.uniform();
          const double nu = 0.4;
          Vector lam(2);
          lam << 0.5, -0.3;
          const bool y_only = r.kind == ExperimentKind::INTERTWINING_NCT;
          const auto f3 = [&](double x1v, double x2v, double yv) {
            const double fy = bump((std::log(yv) - cy) / w);
            if (y_only) return fy;
            return bump((std::log(x1v) - (u0 + 0.3)) / w) * fy *
                   bump((std::log(x2v) - (std::log(x2) - 0.25)) / w);
          };
          // kernel weight per kind
          const auto logker = [&](double x1v, double x2v, double yv) {
            const double base = -yv / x1v - x2v / yv;
            if (r.kind == ExperimentKind::INTERTWINING_SYM) return base;
            if (r.kind == ExperimentKind::INTERTWINING_NCT)
              return nu * std::log(x1v * x2v) - nu * std::log(yv) + base;
            return (lam(0) - lam(1)) * std::log(yv) +
                   lam(1) * std::log(x1v * x2v) + base;
          };
          const auto integral = [&](const std::function<double(double, double,
                                                               double)>& g,
                                    double x1v, double x2v) {
            return integrate_gk(
                       [&](double yv) {
                         return std::exp(logker(x1v, x2v, yv)) *
                                g(x1v, x2v, yv) / yv;
                       },
                       ylo, yhi, 0.0, 1e-11)
                .value;
          };
          const auto qf = [&](double x1v, double x2v) {
            return integral(f3, x1v, x2v);
          };
          // LHS: H-type operator on the integral
          const double l11 = lap1([&](double t) { return qf(t, x2); }, x,
                                  2e-3 * x);
          const double l22 = lap1([&](double t) { return qf(x, t); }, x2,
                                  2e-3 * x2);
          double lhs = l11 + l22 - 2.0 * (x2 / x) * qf(x, x2);
          if (r.kind == ExperimentKind::INTERTWINING_NCT)
            lhs -= nu * nu * qf(x, x2);
          if (r.kind == ExperimentKind::INTERTWINING_HG)
            lhs -= (lam(0) * lam(0) + lam(1) * lam(1)) * qf(x, x2);

          // RHS: integrated generator on the test function
          const auto gen = [&](double x1v, double x2v, double yv) {
            const double dyy = lap1(
                [&](double t) { return f3(x1v, x2v, t); }, yv, 1e-3 * yv);
            const double dy = dx1([&](double t) { return f3(x1v, x2v, t); },
                                  yv, 1e-4 * yv);
            const double d11 = lap1(
                [&](double t) { return f3(t, x2v, yv); }, x1v, 1e-3 * x1v);
            const double d1 = dx1([&](double t) { return f3(t, x2v, yv); },
                                  x1v, 1e-4 * x1v);
            const double d22 = lap1(
                [&](double t) { return f3(x1v, t, yv); }, x2v, 1e-3 * x2v);
            const double d2 = dx1([&](double t) { return f3(x1v, t, yv); },
                                  x2v, 1e-4 * x2v);
            if (r.kind == ExperimentKind::INTERTWINING_SYM) {
              return dyy + d11 + 2.0 * yv * d1 + d22 -
                     2.0 * (x2v * x2v / yv) * d2;
            }
            if (r.kind == ExperimentKind::INTERTWINING_NCT) {
              return dyy;  // plain Laplacian in y
            }
            // HG: level-indexed Doob drifts
            return dyy + 2.0 * lam(0) * yv * dy + d11 +
                   2.0 * lam(1) * x1v * d1 + 2.0 * yv * d1 + d22 +
                   2.0 * lam(1) * x2v * d2 - 2.0 * (x2v * x2v / yv) * d2;
          };
          const double rhs = integral(gen, x, x2);
          err.track(rel_diff(lhs, rhs, 1e-4));
          break;
        }
        default:
          throw DomainError("run_intertwining: bad kind");
      }
    }
  }
  StatReport row =
      residual_report(std::string(to_string(r.kind)), err.value, 1e-3, r.policy);
  row.params = "n=1";
  return {row};
}

// ---------------------------------------------------------------------------
// Wall process: R self-adjoint with respect to |Q|^ν etr(-Q^{-1}) μ(dQ)

std::vector<StatReport> run_wall_stationary(const Resolved& r) {
  RngStream rng(r.seed, 12);
  const double nu = r.nu;
  MaxErr err;
  for (int trial = 0; trial < 4; ++trial) {
    const double c1 = 0.6 * (rng.uniform() - 0.5);
    const double c2 = 0.6 * (rng.uniform() - 0.5);
    const double w = 1.3;
    const auto f = [&](double q) { return bump((std::log(q) - c1) / w); };
    const auto g = [&](double q) { return bump((std::log(q) - c2) / w); };
    const auto rop = [&](const std::function<double(double)>& fn, double q) {
      // R = Δ^{(ν/2)} + tr ∂ = (q∂)^2 + (1+νq)∂-type, assembled from scalars
      return lap1(fn, q, 1e-3 * q) + nu * q * dx1(fn, q, 1e-4 * q) +
             dx1(fn, q, 1e-4 * q);
    };
    const double lo = std::exp(std::min(c1, c2) - w);
    const double hi = std::exp(std::max(c1, c2) + w);
    const auto measure = [&](double q) {
      return std::pow(q, nu) * std::exp(-1.0 / q) / q;
    };
    const double lhs = integrate_gk(
                           [&](double q) { return rop(f, q) * g(q) * measure(q); },
                           lo, hi, 0.0, 1e-11)
                           .value;
    const double rhs = integrate_gk(
                           [&](double q) { return f(q) * rop(g, q) * measure(q); },
                           lo, hi, 0.0, 1e-11)
                           .value;
    err.track(rel_diff(lhs, rhs, 1e-5));
  }
  StatReport row = residual_report("WALL_STATIONARY", err.value, 1e-5, r.policy);
  row.params = "n=1;nu=" + format_double(nu);
  return {row};
}

// ---------------------------------------------------------------------------
// Criterion 12: appendix inequalities and Lyapunov bounds

std::vector<StatReport> run_appendix_ineq(const Resolved& r) {
  RngStream rng(r.seed, 13);
  long mi_violations = 0;
  const long triples = r.quick ? 2000 : r.paths;
  for (long t = 0; t < triples; ++t) {
    const int n = 1 + static_cast<int>(rng.uniform() * 3.0);
    const PdMatrix a = random_pd(n, rng, 0.7);
    const PdMatrix b = random_pd(n, rng, 0.7);
    const PdMatrix c = random_pd(n, rng, 0.7);
    const double lhs = (a.mat() * a.mat() * b.mat()).trace() +
                       (c.mat() * c.mat() * b.inverse()).trace();
    const double rhs = 2.0 * (a.mat() * c.mat()).trace();
    if (lhs - rhs < -1e-10 * (std::abs(lhs) + std::abs(rhs))) ++mi_violations;
  }

  long a2_violations = 0;
  const long tuples = r.quick ? 500 : 2000;
  for (int m = 2; m <= 5; ++m) {
    double cc, alpha, dd;
    const int n = 2;
    if (m == 2) {
      cc = 1.0; alpha = 1.0; dd = 0.0;
    } else if (m % 2 == 1) {
      cc = std::pow(2.0, (m - 1) / 2); alpha = 1.0 / cc; dd = 0.0;
    } else {
      cc = std::pow(2.0, m / 2); alpha = 1.0 / cc;
      dd = n * (std::pow(2.0, (m - 2) / 2) - 1.0);
    }
    for (long t = 0; t < tuples; ++t) {
      std::vector<PdMatrix> as;
      for (int i = 0; i < m; ++i) as.push_back(random_pd(n, rng, 0.7));
      double lhs = 0.0;
      for (int i = 0; i + 1 < m; ++i)
        lhs += (as[i].mat() * as[i + 1].inverse()).trace();
      const double rhs =
          cc * (as[0].power(alpha) * as[m - 1].power(-alpha)).trace() - dd;
      if (lhs - rhs < -1e-10 * (std::abs(lhs) + std::abs(rhs) + 1.0))
        ++a2_violations;
    }
  }

  std::vector<StatReport> rows;
  StatReport mi_row = residual_report("APPENDIX_MI",
                                      static_cast<double>(mi_violations), 0.5,
                                      r.policy);
  mi_row.params = "triples=" + std::to_string(triples);
  mi_row.note = "violations of tr A^2 B + tr C^2 B^{-1} >= 2 tr AC";
  rows.push_back(mi_row);
  StatReport a2_row = residual_report("APPENDIX_A2",
                                      static_cast<double>(a2_violations), 0.5,
                                      r.policy);
  a2_row.params = "m<=5";
  a2_row.note = "violations of the chain bound with constructive constants";
  rows.push_back(a2_row);
  return rows;
}

std::vector<StatReport> run_lyapunov_bounds(const Resolved& r) {
  RngStream rng(r.seed, 14);
  const long pts = r.quick ? 100 : r.paths;
  const int n = r.n;
  std::vector<StatReport> rows;

  // Example 1: ΔC = (n+1)/2 C exactly; drifted bounds for C and D
  {
    MaxErr exact_err;
    long viol = 0;
    const double nu = 1.0;
    for (long t = 0; t < pts; ++t) {
      const PdMatrix x = random_pd(n, rng, 0.25);
      const ScalarField cf = [](const Matrix& m) {
        return m.trace() + PdMatrix(m).inverse().trace();
      };
      const ScalarField df = [](const Matrix& m) {
        const PdMatrix p(m);
        return m.trace() - p.log_det();
      };
      const double c0 = cf(x.mat());
      const double lap_c = laplacian_fd(cf, x.mat(), kH2);
      exact_err.track(rel_diff(lap_c, 0.5 * (n + 1.0) * c0));
      const double d0 = df(x.mat());
      const double lap_d = laplacian_fd(df, x.mat(), kH2);
      if (lap_d > (n + 1.0) * d0 + 1e-8 * std::abs(d0)) ++viol;
      // drifted: Δ^{(ν)} = Δ + 2ν tr θ
      const double drift_c =
          lap_c + 2.0 * nu * (x.mat() * matrix_grad_fd(cf, x.mat(), kH1).mat())
                               .trace();
      if (drift_c > (0.5 * (n + 1.0) + 2.0 * std::abs(nu)) * c0 + 1e-8 * c0)
        ++viol;
      const double drift_d =
          lap_d + 2.0 * nu * (x.mat() * matrix_grad_fd(df, x.mat(), kH1).mat())
                               .trace();
      if (drift_d > (n + 1.0 + 4.0 * std::max(nu, 0.0)) * d0 +
                        2.0 * std::max(-nu, 0.0) * n + 1e-8 * std::abs(d0))
        ++viol;
    }
    StatReport exact_row = residual_report("LYAPUNOV_EX1_EXACT",
                                           exact_err.value, 1e-5, r.policy);
    rows.push_back(exact_row);
    StatReport bound_row = residual_report("LYAPUNOV_EX1_BOUNDS",
                                           static_cast<double>(viol), 0.5,
                                           r.policy);
    bound_row.note = "violations over " + std::to_string(pts) + " points";
    rows.push_back(bound_row);
  }

  // Example 2: TV closed form; TV <= 2(n+3)V; TU <= 2(n+3)U; drifted T'
  {
    SystemSpec spec;
    spec.kind = SystemKind::BURKE_PAIR;
    spec.n = n;
    spec.lambda = 0.0;
    spec.nu = 0.0;
    MaxErr tv_err;
    long viol = 0;
    const auto vfun = [&](const State& s) {
      const Matrix q = s[1] * PdMatrix(s[0]).inverse();
      return q.trace() - std::log(q.determinant());
    };
    const auto ufun = [&](const State& s) {
      return vfun(s) + s[1].trace() + PdMatrix(s[1]).inverse().trace();
    };
    for (long t = 0; t < pts / 4; ++t) {
      const PdMatrix x = random_pd(n, rng, 0.25);
      const PdMatrix y = random_pd(n, rng, 0.25);
      const State state{x.mat(), y.mat()};
      const Matrix q = y.mat() * x.inverse();
      const double tv = generator_apply_fd(spec, vfun, state, kH2);
      const double closed =
          (n + 3.0) * q.trace() - 2.0 * (q * q).trace();
      tv_err.track(rel_diff(tv, closed));
      if (tv > 2.0 * (n + 3.0) * vfun(state) + 1e-6) ++viol;
      const double tu = generator_apply_fd(spec, ufun, state, kH2);
      if (tu > 2.0 * (n + 3.0) * ufun(state) + 1e-6) ++viol;
      // with drifts λ=1, ν=-1: T'U <= cU + d
      SystemSpec drifted = spec;
      drifted.lambda = 1.0;
      drifted.nu = -1.0;
      const double tpu = generator_apply_fd(drifted, ufun, state, kH2);
      const double c = 2.0 * (n + 3.0) + 4.0 * (1.0 + 1.0);
      const double d = 2.0 * std::max(drifted.nu - drifted.lambda, 0.0) * n;
      if (tpu > c * ufun(state) + d + 1e-6) ++viol;
    }
    StatReport tv_row = residual_report("LYAPUNOV_EX2_TV", tv_err.value, 1e-4,
                                        r.policy);
    rows.push_back(tv_row);
    StatReport bound_row = residual_report("LYAPUNOV_EX2_BOUNDS",
                                           static_cast<double>(viol), 0.5,
                                           r.policy);
    rows.push_back(bound_row);
  }

  // Example 5: M_ν U <= c U with U = tr Y + tr Y^{-1} + tr A + tr A^{-1}
  {
    SystemSpec spec;
    spec.kind = SystemKind::MY_PAIR;
    spec.n = n;
    spec.nu = 1.0;
    long viol = 0;
    const auto ufun = [&](const State& s) {
      return s[0].trace() + PdMatrix(s[0]).inverse().trace() + s[1].trace() +
             PdMatrix(s[1]).inverse().trace();
    };
    const double c = 0.5 * (n + std::abs(spec.nu) + 3.0);
    for (long t = 0; t < pts / 4; ++t) {
      const State state{random_pd(n, rng, 0.6).mat(),
                        random_pd(n, rng, 0.6).mat()};
      const double mu = generator_apply_fd(spec, ufun, state, kH2);
      if (mu > c * ufun(state) + 1e-6) ++viol;
    }
    StatReport row = residual_report("LYAPUNOV_EX5_BOUNDS",
                                     static_cast<double>(viol), 0.5, r.policy);
    rows.push_back(row);
  }

  // Example 6: G_λ U <= c' U + d on the triangular array
  {
    const int levels = 3;
    SystemSpec spec;
    spec.kind = SystemKind::TRIANGULAR;
    spec.n = n;
    spec.N = levels;
    Vector lam(levels);
    lam << 0.6, 0.1, -0.4;
    spec.lambda_vec = lam;

    // directed reachability over vertices (i,m)
    struct Vertex { int i, m; };
    std::vector<Vertex> verts;
    for (int m = 1; m <= levels; ++m)
      for (int i = 1; i <= m; ++i) verts.push_back({i, m});
    const int nv = static_cast<int>(verts.size());
    std::vector<std::vector<bool>> reach(nv, std::vector<bool>(nv, false));
    const auto vid = [&](int i, int m) {
      return TriangularArray::flat_index(m, i);
    };
    for (int v = 0; v < nv; ++v) reach[v][v] = true;
    bool changed = true;
    while (changed) {
      changed = false;
      for (const Vertex& a : verts) {
        const int va = vid(a.i, a.m);
        std::vector<int> nexts;
        if (a.m < levels && a.i <= a.m) nexts.push_back(vid(a.i, a.m + 1));
        if (a.i > 1 && a.m > 1) nexts.push_back(vid(a.i - 1, a.m - 1));
        for (int nb : nexts) {
          for (int w2 = 0; w2 < nv; ++w2) {
            if (reach[nb][w2] && !reach[va][w2]) {
              reach[va][w2] = true;
              changed = true;
            }
          }
        }
      }
    }
    const auto level_of = [&](int v) { return verts[v].m; };
    double max_gap = 0.0, d_const = 0.0;
    for (int a = 0; a < nv; ++a) {
      for (int b = 0; b < nv; ++b) {
        if (a != b && reach[a][b]) {
          const double ga = lam(level_of(a) - 1) - lam(level_of(b) - 1);
          max_gap = std::max(max_gap, std::max(ga, 0.0));
          d_const += 2.0 * n * std::max(-ga, 0.0);
        }
      }
    }
    const double c =
        2.0 * (n + 1.0) + 2.0 * std::abs(lam(0)) + 4.0 * max_gap;
    const double cprime = c + 2.0 * (levels + 2.0) * (levels - 1.0);

    const auto ufun = [&](const State& s) {
      double u = s[vid(1, 1)].trace() + PdMatrix(s[vid(1, 1)]).inverse().trace();
      for (int a = 0; a < nv; ++a) {
        for (int b = 0; b < nv; ++b) {
          if (a == b || !reach[a][b]) continue;
          const Matrix q = s[a] * PdMatrix(s[b]).inverse();
          u += q.trace() - std::log(q.determinant());
        }
      }
      return u;
    };

    long viol = 0;
    const long pts6 = std::max<long>(pts / 10, 20);
    for (long t = 0; t < pts6; ++t) {
      State state;
      for (int v = 0; v < nv; ++v) state.push_back(random_pd(n, rng, 0.5).mat());
      const double gu = generator_apply_fd(spec, ufun, state, kH2);
      if (gu > cprime * ufun(state) + d_const + 1e-5) ++viol;
    }
    StatReport row = residual_report("LYAPUNOV_EX6_BOUNDS",
                                     static_cast<double>(viol), 0.5, r.policy);
    row.params = "N=3;n=" + std::to_string(n);
    rows.push_back(row);
  }
  return rows;
}

// ---------------------------------------------------------------------------
// Criterion 8: classical Toda lattice

namespace {

TodaState random_toda(int levels, int n, RngStream& rng, double pscale) {
  TodaState s;
  s.N = levels;
  s.n = n;
  for (int i = 0; i < levels; ++i) {
    s.x.push_back(random_pd(n, rng, 0.3).mat());
    s.p.push_back(pscale * rng.gaussian_sym(n));
  }
  return s;
}

VecState toda_pack(const TodaState& s) {
  VecState v = s.x;
  v.insert(v.end(), s.p.begin(), s.p.end());
  return v;
}

TodaState toda_unpack(const VecState& v, int levels, int n) {
  TodaState s;
  s.N = levels;
  s.n = n;
  s.x.assign(v.begin(), v.begin() + levels);
  s.p.assign(v.begin() + levels, v.end());
  return s;
}

RhsFn toda_rhs_fn(int levels, int n) {
  return [levels, n](const VecState& v) {
    return toda_pack(toda_rhs(toda_unpack(v, levels, n)));
  };
}

}  // namespace

namespace {

// global-in-time lattice data: positions and momenta induced by a cascade
// critical point (the indefinite lattice blows up from generic data)
TodaState cascade_toda_data(int levels, int n, RngStream& rng) {
  Vector lam(levels);
  for (int i = 0; i < levels; ++i) lam(i) = 0.55 - 0.45 * i;
  std::vector<PdMatrix> x;
  for (int i = 0; i < levels; ++i) x.push_back(random_pd(n, rng, 0.3));
  const TriangularArray start = critical_point(lam, x, 1e-11, 300);
  return toda_from_cascade(start, lam);
}

}  // namespace

std::vector<StatReport> run_toda_conservation(const Resolved& r) {
  RngStream rng(r.seed, 15);
  std::vector<int> pd_idx;
  for (int i = 0; i < r.N; ++i) pd_idx.push_back(i);

  // the Lax equation conserves C_1 as a matrix and the full traces tr L^k at
  // any N; the matrix-valued C_k for k >= 2 are invariant only at N=2
  const TodaState s0 = cascade_toda_data(r.N, r.n, rng);
  const Rk4Result traj = integrate_rk4(toda_rhs_fn(r.N, r.n), toda_pack(s0),
                                       r.T, r.h, 200, pd_idx);
  const std::vector<Matrix> c0 = constants_of_motion(s0, 3);
  MaxErr c1_drift, tr_drift;
  for (size_t k = 1; k < traj.states.size(); ++k) {
    const TodaState st = toda_unpack(traj.states[k], r.N, r.n);
    const std::vector<Matrix> ck = constants_of_motion(st, 3);
    c1_drift.track((ck[0] - c0[0]).norm() / std::max(c0[0].norm(), 1e-12));
    for (int j = 0; j < 3; ++j) {
      tr_drift.track(std::abs(ck[j].trace() - c0[j].trace()) /
                     std::max(std::abs(c0[j].trace()), 1.0));
    }
  }

  // N=2 trajectory: the full matrix constants are invariants there
  MaxErr m2_drift;
  {
    RngStream rng2(r.seed, 25);
    const TodaState t0 = cascade_toda_data(2, r.n, rng2);
    const std::vector<int> pd2{0, 1};
    const Rk4Result traj2 = integrate_rk4(toda_rhs_fn(2, r.n), toda_pack(t0),
                                          r.T, r.h, 200, pd2);
    const std::vector<Matrix> d0 = constants_of_motion(t0, 3);
    for (size_t k = 1; k < traj2.states.size(); ++k) {
      const TodaState st = toda_unpack(traj2.states[k], 2, r.n);
      const std::vector<Matrix> ck = constants_of_motion(st, 3);
      for (int j = 0; j < 3; ++j) {
        m2_drift.track((ck[j] - d0[j]).norm() / std::max(d0[j].norm(), 1.0));
      }
    }
  }

  // generic data: horizon capped below the recorded cone-escape time
  MaxErr gen_c1, gen_tr;
  double escape_time = -1.0;
  {
    RngStream rng3(r.seed, 35);
    const TodaState g0 = random_toda(r.N, r.n, rng3, 0.25);
    double horizon = r.T;
    Rk4Result gtraj;
    for (int attempt = 0; attempt < 6; ++attempt) {
      try {
        gtraj = integrate_rk4(toda_rhs_fn(r.N, r.n), toda_pack(g0), horizon,
                              r.h, 100, pd_idx);
        break;
      } catch (const ConeEscape& esc) {
        escape_time = esc.time;
        horizon = 0.6 * esc.time;
      }
    }
    const std::vector<Matrix> g0c = constants_of_motion(g0, 3);
    for (size_t k = 1; k < gtraj.states.size(); ++k) {
      const TodaState st = toda_unpack(gtraj.states[k], r.N, r.n);
      const std::vector<Matrix> ck = constants_of_motion(st, 3);
      gen_c1.track((ck[0] - g0c[0]).norm() / std::max(g0c[0].norm(), 1e-12));
      for (int j = 0; j < 3; ++j) {
        gen_tr.track(std::abs(ck[j].trace() - g0c[j].trace()) /
                     std::max(std::abs(g0c[j].trace()), 1.0));
      }
    }
  }

  std::vector<StatReport> rows;
  StatReport c1_row = residual_report("TODA_CONSERVATION_C1", c1_drift.value,
                                      1e-6, r.policy);
  c1_row.params = "N=" + std::to_string(r.N) + ";n=" + std::to_string(r.n) +
                  ";T=" + format_double(r.T);
  rows.push_back(c1_row);
  StatReport tr_row = residual_report("TODA_CONSERVATION_TRACES",
                                      tr_drift.value, 1e-6, r.policy);
  tr_row.params = c1_row.params;
  tr_row.note = "tr L^k, k <= 3";
  rows.push_back(tr_row);
  StatReport m2_row = residual_report("TODA_CONSERVATION_N2_MATRIX",
                                      m2_drift.value, 1e-6, r.policy);
  m2_row.params = "N=2;n=" + std::to_string(r.n) + ";T=" + format_double(r.T);
  m2_row.note = "matrix C_k, k <= 3";
  rows.push_back(m2_row);
  StatReport gen_row = residual_report("TODA_CONSERVATION_GENERIC",
                                       std::max(gen_c1.value, gen_tr.value),
                                       1e-6, r.policy);
  gen_row.note = escape_time > 0.0
                     ? "cone escape recorded at t=" + format_double(escape_time)
                     : "no cone escape before T";
  rows.push_back(gen_row);
  return rows;
}

std::vector<StatReport> run_toda_order(const Resolved& r) {
  RngStream rng(r.seed, 16);
  const TodaState s0 = cascade_toda_data(r.N, r.n, rng);
  const RhsFn rhs = toda_rhs_fn(r.N, r.n);
  const auto terminal = [&](double h) {
    const Rk4Result traj =
        integrate_rk4(rhs, toda_pack(s0), r.T, h, 1 << 30, {});
    return traj.states.back();
  };
  const VecState ref = terminal(2.5e-4);
  std::vector<double> hs = {1e-2, 5e-3, 2.5e-3};
  std::vector<double> errs;
  for (double h : hs) {
    const VecState at = terminal(h);
    double e = 0.0;
    for (size_t i = 0; i < at.size(); ++i) e += (at[i] - ref[i]).squaredNorm();
    errs.push_back(std::sqrt(e));
  }
  double slope_sum = 0.0;
  for (size_t i = 0; i + 1 < errs.size(); ++i) {
    slope_sum += std::log(errs[i] / errs[i + 1]) / std::log(2.0);
  }
  const double slope = slope_sum / (errs.size() - 1);
  StatReport row;
  row.kind = "TODA_ORDER";
  row.params = "N=" + std::to_string(r.N) + ";n=" + std::to_string(r.n);
  row.estimate = slope;
  row.reference = 4.0;
  row.z = r.policy.z_max * (slope - 4.0) / 0.3;
  row.pass = std::abs(slope - 4.0) <= 0.3;
  row.note = "observed RK4 order";
  return {row};
}

std::vector<StatReport> run_dressing(const Resolved& r) {
  RngStream rng(r.seed, 17);
  MaxErr err32, err21;
  for (int t = 0; t < 10; ++t) {
    BacklundState s;
    s.nu = r.nu;
    for (int i = 0; i < 3; ++i) s.x.push_back(random_pd(2, rng, 0.5).mat());
    for (int i = 0; i < 2; ++i) s.y.push_back(random_pd(2, rng, 0.5).mat());
    err32.track(dressing_residual(s));
    BacklundState s1;
    s1.nu = r.nu;
    for (int i = 0; i < 2; ++i) s1.x.push_back(random_pd(1, rng, 0.5).mat());
    s1.y.push_back(random_pd(1, rng, 0.5).mat());
    err21.track(dressing_residual(s1));
  }
  std::vector<StatReport> rows;
  StatReport r32 = residual_report("DRESSING_N3", err32.value, 1e-12, r.policy);
  r32.params = "N=3;n=2";
  rows.push_back(r32);
  StatReport r21 = residual_report("DRESSING_N2", err21.value, 1e-14, r.policy);
  r21.params = "N=2;n=1";
  rows.push_back(r21);
  return rows;
}

std::vector<StatReport> run_backlund_flow(const Resolved& r) {
  // initial pair from two adjacent rows of a cascade critical point with
  // ν = λ_N so the coupled flow stays in the cone for the whole horizon
  RngStream rng(r.seed, 18);
  Vector lam(r.N);
  for (int i = 0; i < r.N; ++i) lam(i) = 0.5 - 0.4 * i;
  lam(r.N - 1) = r.nu;
  std::vector<PdMatrix> xtop;
  for (int i = 0; i < r.N; ++i) xtop.push_back(random_pd(r.n, rng, 0.3));
  const TriangularArray crit = critical_point(lam, xtop, 1e-11, 300);
  BacklundState s0;
  s0.nu = r.nu;
  for (int i = 1; i <= r.N; ++i) s0.x.push_back(crit.y(r.N, i));
  for (int i = 1; i <= r.N - 1; ++i) s0.y.push_back(crit.y(r.N - 1, i));

  const int nx = r.N, ny = r.N - 1;
  const RhsFn rhs = [&](const VecState& v) {
    BacklundState s;
    s.nu = s0.nu;
    s.x.assign(v.begin(), v.begin() + nx);
    s.y.assign(v.begin() + nx, v.end());
    const BacklundRhs d = backlund_rhs(s);
    VecState out = d.xdot;
    out.insert(out.end(), d.ydot.begin(), d.ydot.end());
    return out;
  };
  VecState v0 = s0.x;
  v0.insert(v0.end(), s0.y.begin(), s0.y.end());
  std::vector<int> pd_idx;
  for (int i = 0; i < nx + ny; ++i) pd_idx.push_back(i);
  const Rk4Result traj = integrate_rk4(rhs, v0, r.T, r.h, 1, pd_idx);

  MaxErr shift_err, back_err;
  std::vector<std::vector<Matrix>> b_series;
  for (size_t k = 0; k < traj.states.size(); ++k) {
    BacklundState s;
    s.nu = s0.nu;
    s.x.assign(traj.states[k].begin(), traj.states[k].begin() + nx);
    s.y.assign(traj.states[k].begin() + nx, traj.states[k].end());
    // constants shift via the two Lax matrices
    const std::vector<Matrix> b = backlund_b(s);
    const std::vector<Matrix> bp = backlund_b_prime(s);
    Matrix l = Matrix::Zero(nx * r.n, nx * r.n);
    for (int i = 0; i < nx; ++i) {
      l.block(i * r.n, i * r.n, r.n, r.n) = b[i];
      if (i + 1 < nx) {
        l.block(i * r.n, (i + 1) * r.n, r.n, r.n) = -Matrix::Identity(r.n, r.n);
        l.block((i + 1) * r.n, i * r.n, r.n, r.n) =
            s.x[i + 1] * PdMatrix(s.x[i]).inverse();
      }
    }
    Matrix lp = Matrix::Zero(ny * r.n, ny * r.n);
    for (int i = 0; i < ny; ++i) {
      lp.block(i * r.n, i * r.n, r.n, r.n) = bp[i];
      if (i + 1 < ny) {
        lp.block(i * r.n, (i + 1) * r.n, r.n, r.n) = -Matrix::Identity(r.n, r.n);
        lp.block((i + 1) * r.n, i * r.n, r.n, r.n) =
            s.y[i + 1] * PdMatrix(s.y[i]).inverse();
      }
    }
    const std::vector<Matrix> cn = constants_from_lax(l, nx, r.n, 3);
    const std::vector<Matrix> cn1 = constants_from_lax(lp, ny, r.n, 3);
    // matrix C_1 shift is exact; for k >= 2 the exact identity is at trace
    // level, tr C^{(N)}_k = tr C^{(N-1)}_k + n ν^k (L-hat is block triangular)
    {
      const Matrix expect1 = cn1[0] + s0.nu * Matrix::Identity(r.n, r.n);
      shift_err.track((cn[0] - expect1).norm() / std::max(cn[0].norm(), 1.0));
    }
    for (int kk = 2; kk <= 3; ++kk) {
      const double expect =
          cn1[kk - 1].trace() + r.n * std::pow(s0.nu, kk);
      shift_err.track(std::abs(cn[kk - 1].trace() - expect) /
                      std::max(std::abs(cn[kk - 1].trace()), 1.0));
    }
    b_series.push_back(b);
  }
  // finite-difference check of (back): dB_i/dt = A_{i-1} - A_i
  for (size_t k = 1; k + 1 < traj.states.size(); ++k) {
    const double dt = traj.times[k + 1] - traj.times[k - 1];
    BacklundState s;
    s.nu = s0.nu;
    s.x.assign(traj.states[k].begin(), traj.states[k].begin() + nx);
    s.y.assign(traj.states[k].begin() + nx, traj.states[k].end());
    for (int i = 0; i < nx; ++i) {
      const Matrix fd = (b_series[k + 1][i] - b_series[k - 1][i]) / dt;
      Matrix expect = Matrix::Zero(r.n, r.n);
      if (i > 0) expect += s.x[i] * PdMatrix(s.x[i - 1]).inverse();
      if (i + 1 < nx) expect -= s.x[i + 1] * PdMatrix(s.x[i]).inverse();
      back_err.track((fd - expect).norm() / std::max(1.0, expect.norm()));
    }
  }
  std::vector<StatReport> rows;
  StatReport shift_row = residual_report("BACKLUND_SHIFT", shift_err.value,
                                         1e-8, r.policy);
  shift_row.params = "N=3;n=2;nu=" + format_double(r.nu);
  rows.push_back(shift_row);
  StatReport back_row = residual_report("BACKLUND_BACK", back_err.value, 1e-6,
                                        r.policy);
  rows.push_back(back_row);
  return rows;
}

std::vector<StatReport> run_cascade_invariance(const Resolved& r) {
  RngStream rng(r.seed, 19);
  Vector lam(r.N);
  if (r.N == 3) {
    lam << 0.6, 0.1, -0.5;
  } else {
    for (int i = 0; i < r.N; ++i) lam(i) = 0.5 - i * 0.4;
  }
  std::vector<PdMatrix> x;
  for (int i = 0; i < r.N; ++i) x.push_back(random_pd(r.n, rng, 0.3));

  const TriangularArray start = critical_point(lam, x, 1e-10, 300);
  const double res0 = cpe_residual(start, lam);

  // integrate the cascade
  const int count = start.particle_count();
  VecState v0;
  for (int m = 1; m <= r.N; ++m)
    for (int i = 1; i <= m; ++i) v0.push_back(start.y(m, i));
  const RhsFn rhs = [&](const VecState& v) {
    TriangularArray arr(r.N, r.n);
    int idx = 0;
    for (int m = 1; m <= r.N; ++m)
      for (int i = 1; i <= m; ++i) arr.y(m, i) = v[idx++];
    return cascade_rhs(arr, lam);
  };
  std::vector<int> pd_idx;
  for (int i = 0; i < count; ++i) pd_idx.push_back(i);
  const Rk4Result traj = integrate_rk4(rhs, v0, r.T, r.h, 500, pd_idx);

  MaxErr invariance, toprow;
  for (size_t k = 0; k < traj.states.size(); ++k) {
    TriangularArray arr(r.N, r.n);
    int idx = 0;
    for (int m = 1; m <= r.N; ++m)
      for (int i = 1; i <= m; ++i) arr.y(m, i) = traj.states[k][idx++];
    invariance.track(cpe_residual(arr, lam));
    const TodaState ts = toda_from_cascade(arr, lam);
    const std::vector<Matrix> ck = constants_of_motion(ts, 3);
    for (int kk = 1; kk <= 3; ++kk) {
      double target = 0.0;
      for (int i = 0; i < r.N; ++i) target += std::pow(lam(i), kk);
      if (kk == 1) {
        // matrix identity; for k >= 2 and N >= 3 only the trace version holds
        const Matrix expect = target * Matrix::Identity(r.n, r.n);
        toprow.track((ck[0] - expect).norm() / std::max(1.0, expect.norm()));
      }
      toprow.track(std::abs(ck[kk - 1].trace() - r.n * target) /
                   std::max(1.0, std::abs(r.n * target)));
    }
  }

  // N=2 cascade: the full matrix identity C_k = Σ λ_i^k I holds
  MaxErr toprow2;
  {
    RngStream rng2(r.seed, 29);
    Vector lam2(2);
    lam2 << 0.5, -0.3;
    std::vector<PdMatrix> x2{random_pd(r.n, rng2, 0.3),
                             random_pd(r.n, rng2, 0.3)};
    const TriangularArray c2 = critical_point(lam2, x2, 1e-11, 300);
    const TodaState ts2 = toda_from_cascade(c2, lam2);
    const std::vector<Matrix> ck2 = constants_of_motion(ts2, 3);
    for (int kk = 1; kk <= 3; ++kk) {
      const double target = std::pow(lam2(0), kk) + std::pow(lam2(1), kk);
      toprow2.track((ck2[kk - 1] - target * Matrix::Identity(r.n, r.n)).norm() /
                    std::max(1.0, std::abs(target)));
    }
  }

  std::vector<StatReport> rows;
  StatReport solve_row = residual_report("CASCADE_SOLVE", res0, 1e-8, r.policy);
  solve_row.params = "N=" + std::to_string(r.N) + ";n=" + std::to_string(r.n);
  rows.push_back(solve_row);
  StatReport inv_row = residual_report("CASCADE_INVARIANCE", invariance.value,
                                       1e-6, r.policy);
  inv_row.params = solve_row.params + ";T=" + format_double(r.T);
  rows.push_back(inv_row);
  StatReport top_row = residual_report("CASCADE_TOPROW_TODA", toprow.value,
                                       1e-6, r.policy);
  top_row.note = "matrix C_1 and traces of C_2, C_3";
  rows.push_back(top_row);
  StatReport top2_row = residual_report("CASCADE_TOPROW_N2_MATRIX",
                                        toprow2.value, 1e-6, r.policy);
  top2_row.params = "N=2;n=" + std::to_string(r.n);
  top2_row.note = "full matrix C_k, k <= 3";
  rows.push_back(top2_row);
  return rows;
}

}  // namespace pdflow::detail
