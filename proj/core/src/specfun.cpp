#include "pdflow/specfun.hpp"

#include <cmath>
#include <mutex>

#include "pdflow/samplers.hpp"

namespace pdflow {

namespace {

double corner_log_det(const Matrix& x, int k) {
  Eigen::LLT<Matrix> llt(x.topLeftCorner(k, k));
  if (llt.info() != Eigen::Success) throw NumericError("corner not PD");
  const Matrix l = llt.matrixL();
  double s = 0.0;
  for (int i = 0; i < k; ++i) s += std::log(l(i, i));
  return 2.0 * s;
}

double log_cosh(double t) {
  const double a = std::abs(t);
  return a + std::log1p(std::exp(-2.0 * a)) - std::log(2.0);
}

}  // namespace

double log_power_fn(const Vector& s, const Matrix& x) {
  const int n = static_cast<int>(x.rows());
  if (s.size() != n) throw DomainError("power_fn: |s| must equal n");
  double out = 0.0;
  for (int k = 1; k <= n; ++k) {
    const double sk = s(k - 1);
    if (sk != 0.0) out += sk * corner_log_det(x, k);
  }
  return out;
}

double power_fn(const Vector& s, const Matrix& x) {
  return std::exp(log_power_fn(s, x));
}

bool gamma_condition(const Vector& s) {
  const int n = static_cast<int>(s.size());
  double tail = 0.0;
  for (int k = n; k >= 1; --k) {
    tail += s(k - 1);
    if (!(2.0 * tail > k - 1)) return false;
  }
  return true;
}

double log_gamma_n(const Vector& s) {
  const int n = static_cast<int>(s.size());
  if (!gamma_condition(s)) {
    throw DomainError("gamma_n: condition 2(s_k+...+s_n) > k-1 violated");
  }
  double out = 0.25 * n * (n - 1) * std::log(M_PI);
  double tail = 0.0;
  for (int k = n; k >= 1; --k) {
    tail += s(k - 1);
    out += std::lgamma(tail - 0.5 * (k - 1));
  }
  return out;
}

double gamma_n(const Vector& s) { return std::exp(log_gamma_n(s)); }

double log_gamma_n_nu(int n, double nu) {
  Vector s = Vector::Zero(n);
  s(n - 1) = nu;
  return log_gamma_n(s);
}

double gamma_n_nu(int n, double nu) { return std::exp(log_gamma_n_nu(n, nu)); }

double lambda2(const Vector& s) {
  const int n = static_cast<int>(s.size());
  double out = (n - std::pow(double(n), 3)) / 48.0;
  double tail = 0.0;
  for (int i = n; i >= 1; --i) {
    tail += s(i - 1);
    const double r = tail + 0.25 * (n + 1 - 2 * i);
    out += r * r;
  }
  return out;
}

McResult spherical_h(const Vector& s, const PdMatrix& x, int mc_samples,
                     RngStream& rng) {
  if (mc_samples < 1) throw DomainError("spherical_h: mc_samples >= 1");
  double sum = 0.0, sumsq = 0.0;
  for (int i = 0; i < mc_samples; ++i) {
    const Matrix k = sample_haar_orthogonal(x.dim(), rng);
    const double v = power_fn(s, k.transpose() * x.mat() * k);
    sum += v;
    sumsq += v * v;
  }
  McResult r;
  r.value = sum / mc_samples;
  const double var =
      mc_samples > 1 ? (sumsq - sum * sum / mc_samples) / (mc_samples - 1) : 0.0;
  r.stderr_ = std::sqrt(std::max(var, 0.0) / mc_samples);
  return r;
}

double spherical_h_small(const Vector& s, const PdMatrix& x) {
  const int n = x.dim();
  if (n == 1) return std::pow(x(0, 0), s(0));
  if (n != 2) throw DomainError("spherical_h_small: n <= 2 only");
  const double logdet = x.log_det();
  const Fn1 f = [&](double th) {
    const double c = std::cos(th), sn = std::sin(th);
    const double corner =
        c * c * x(0, 0) + 2.0 * c * sn * x(0, 1) + sn * sn * x(1, 1);
    return std::exp(s(0) * std::log(corner) + s(1) * logdet);
  };
  const QuadResult q = integrate_gk(f, 0.0, M_PI, 0.0, 1e-12);
  return q.value / M_PI;
}

// ---------------------------------------------------------------------------
// Macdonald function

double macdonald_k_scaled(double nu, double z) {
  if (!(z > 0.0)) throw DomainError("macdonald_k: z > 0 required");
  const double anu = std::abs(nu);
  double tmax = 1.0;
  while (tmax < 80.0 && z * (std::cosh(tmax) - 1.0) - log_cosh(anu * tmax) < 760.0)
    tmax += 1.0;
  const Fn1 f = [&](double t) {
    const double e = -z * (std::cosh(t) - 1.0) + log_cosh(anu * t);
    return e > -745.0 ? std::exp(e) : 0.0;
  };
  return integrate_gk(f, 0.0, tmax, 0.0, 1e-13).value;
}

double macdonald_k(double nu, double z) {
  return std::exp(-z) * macdonald_k_scaled(nu, z);
}

double macdonald_dlog(double nu, double z) {
  const double k0 = macdonald_k_scaled(nu, z);
  const double km = macdonald_k_scaled(nu - 1.0, z);
  const double kp = macdonald_k_scaled(nu + 1.0, z);
  return -0.5 * (km + kp) / k0;
}

// ---------------------------------------------------------------------------
// Eigenvalue-coordinate constant (calibrated against Γ_n closed forms)

double eigen_coord_constant(int n) {
  if (n == 1) return 1.0;
  if (n != 2) throw DomainError("eigen_coord_constant: n <= 2 supported");
  static double c2 = 0.0;
  static std::once_flag flag;
  std::call_once(flag, [&]() {
    const double nu = 2.0;
    const auto logf = [&](double u1, double u2) {
      const double a1 = std::exp(u1), a2 = std::exp(u2);
      const double gap = std::abs(a1 - a2);
      if (gap == 0.0) return -1e308;
      return nu * (u1 + u2) - a1 - a2 + std::log(gap) - 0.5 * (u1 + u2);
    };
    const QuadResult q = integrate_exp_plane(logf, 0.3, -0.3, 1e-11);
    c2 = gamma_n_nu(2, nu) / q.value;
  });
  return c2;
}

// ---------------------------------------------------------------------------
// Matrix K-Bessel

namespace {

IntegralResult bessel_quad_1d(const Vector& s, double v, double w,
                              const BesselConfig& cfg) {
  const Fn1 log_g = [&](double y) { return s(0) * std::log(y) - v * y - w / y; };
  const QuadResult q =
      integrate_cone_1d_log(log_g, std::sqrt(w / v), cfg.rel_tol);
  return {q.value, q.error};
}

IntegralResult bessel_eig_haar(const Vector& s, const PdMatrix& v,
                               const PdMatrix& w, const BesselConfig& cfg) {
  const double c2 = eigen_coord_constant(2);
  RngStream rng(cfg.seed, 0x2b3);
  const double u_guess =
      0.5 * std::log((w.mat().trace() / 2.0) / (v.mat().trace() / 2.0));
  double sum = 0.0, sumsq = 0.0, err_sum = 0.0;
  for (int i = 0; i < cfg.haar_samples; ++i) {
    const Matrix k = sample_haar_orthogonal(2, rng);
    const auto logf = [&](double u1, double u2) {
      const double a1 = std::exp(u1), a2 = std::exp(u2);
      const double gap = std::abs(a1 - a2);
      if (gap == 0.0) return -1e308;
      Matrix y(2, 2);
      Vector diag(2);
      diag << a1, a2;
      y = k.transpose() * diag.asDiagonal() * k;
      Matrix yinv = k.transpose() * diag.cwiseInverse().asDiagonal() * k;
      return log_power_fn(s, y) - (v.mat() * y).trace() -
             (w.mat() * yinv).trace() + std::log(gap) - 0.5 * (u1 + u2);
    };
    const QuadResult q =
        integrate_exp_plane(logf, u_guess + 0.2, u_guess - 0.2, cfg.plane_tol);
    sum += q.value;
    sumsq += q.value * q.value;
    err_sum += q.error;
  }
  const int m = cfg.haar_samples;
  const double mean = sum / m;
  const double var = m > 1 ? (sumsq - sum * sum / m) / (m - 1) : 0.0;
  IntegralResult r;
  r.value = c2 * mean;
  r.error = c2 * (std::sqrt(std::max(var, 0.0) / m) + err_sum / m);
  return r;
}

IntegralResult bessel_importance_mc(const Vector& s, const PdMatrix& v,
                                    const PdMatrix& w, const BesselConfig& cfg) {
  const int n = v.dim();
  double splus = 0.0, sminus = 0.0;
  for (int k = 1; k <= n; ++k) {
    splus += k * std::max(s(k - 1), 0.0);
    sminus += k * std::max(-s(k - 1), 0.0);
  }
  const double p1 = n + 1 + 2.0 * splus;
  const double p2 = n + 1 + 2.0 * sminus;
  const WishartParams comp1{PdMatrix(0.5 * v.inverse()), p1};
  const WishartParams comp2{PdMatrix(0.5 * w.inverse()), p2};
  const double logdet_v = -comp1.sigma.log_det() - n * std::log(2.0);
  const double logdet_w = -comp2.sigma.log_det() - n * std::log(2.0);
  const double lg1 = log_gamma_n_nu(n, 0.5 * p1);
  const double lg2 = log_gamma_n_nu(n, 0.5 * p2);

  RngStream rng(cfg.seed, 0x15a);
  std::vector<double> logw(cfg.is_samples);
  for (int i = 0; i < cfg.is_samples; ++i) {
    const bool first = rng.uniform() < 0.5;
    const PdMatrix y = first ? sample_wishart(comp1, rng)
                             : sample_inverse_wishart(comp2, rng);
    const double ld = y.log_det();
    const double trv = (v.mat() * y.mat()).trace();
    const double trw = (w.mat() * y.inverse()).trace();
    const double lw1 = -lg1 + 0.5 * p1 * (logdet_v + ld) - trv;
    const double lw2 = -lg2 + 0.5 * p2 * (logdet_w - ld) - trw;
    const double lq =
        std::max(lw1, lw2) +
        std::log(0.5 * std::exp(lw1 - std::max(lw1, lw2)) +
                 0.5 * std::exp(lw2 - std::max(lw1, lw2)));
    logw[i] = log_power_fn(s, y.mat()) - trv - trw - lq;
  }
  double m = logw[0];
  for (double lw : logw) m = std::max(m, lw);
  double sum = 0.0, sumsq = 0.0;
  for (double lw : logw) {
    const double e = std::exp(lw - m);
    sum += e;
    sumsq += e * e;
  }
  const int cnt = cfg.is_samples;
  const double mean = sum / cnt;
  const double var = cnt > 1 ? (sumsq - sum * sum / cnt) / (cnt - 1) : 0.0;
  IntegralResult r;
  r.value = std::exp(m) * mean;
  r.error = std::exp(m) * std::sqrt(std::max(var, 0.0) / cnt);
  return r;
}

}  // namespace

IntegralResult bessel_K(const Vector& s, const PdMatrix& v, const PdMatrix& w,
                        const BesselConfig& cfg) {
  const int n = v.dim();
  if (w.dim() != n || s.size() != n) throw DomainError("bessel_K: dim mismatch");
  BesselMethod method = cfg.method;
  if (method == BesselMethod::AUTO) {
    method = n == 1   ? BesselMethod::QUAD_1D
             : n == 2 ? BesselMethod::EIG_QUAD_HAAR
                      : BesselMethod::IMPORTANCE_MC;
  }
  IntegralResult out;
  switch (method) {
    case BesselMethod::QUAD_1D:
      if (n != 1) throw DomainError("bessel_K: QUAD_1D is n=1 only");
      out = bessel_quad_1d(s, v(0, 0), w(0, 0), cfg);
      break;
    case BesselMethod::EIG_QUAD_HAAR:
      if (n != 2) throw DomainError("bessel_K: EIG_QUAD_HAAR is n=2 only");
      out = bessel_eig_haar(s, v, w, cfg);
      break;
    case BesselMethod::IMPORTANCE_MC:
      out = bessel_importance_mc(s, v, w, cfg);
      break;
    default:
      throw DomainError("bessel_K: bad method");
  }
  if (!std::isfinite(out.value) ||
      (out.value != 0.0 && out.error > 0.5 * std::abs(out.value))) {
    throw NumericError("bessel_K: quadrature did not converge (value=" +
                       std::to_string(out.value) +
                       ", error=" + std::to_string(out.error) + ")");
  }
  return out;
}

IntegralResult bessel_K_nu(double nu, const PdMatrix& v, const PdMatrix& w,
                           const BesselConfig& cfg) {
  Vector s = Vector::Zero(v.dim());
  s(v.dim() - 1) = nu;
  return bessel_K(s, v, w, cfg);
}

IntegralResult bessel_B(double nu, const PdMatrix& x, const BesselConfig& cfg) {
  return bessel_K_nu(nu, x, PdMatrix::identity(x.dim()), cfg);
}

// ---------------------------------------------------------------------------
// The constant c_s

double log_beta_fn(double a, double b) {
  return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

namespace {

Vector mu_exponents(const Vector& s) {
  const int n = static_cast<int>(s.size());
  Vector mu(n);
  double tail = 0.0;
  for (int i = n; i >= 1; --i) {
    tail += s(i - 1);
    mu(i - 1) = -(tail + 0.25 * (n + 1 - 2 * i));
  }
  return mu;
}

}  // namespace

double c_s_formula(const Vector& s) {
  const Vector mu = mu_exponents(s);
  const int n = static_cast<int>(mu.size());
  for (int i = 0; i < n; ++i) {
    if (!(mu(i) > 0.0))
      throw DomainError("c_s diverges: requires r_i < 0 for all i");
  }
  double lg = 0.0;
  for (int i = 0; i < n; ++i) lg += std::lgamma(2.0 * mu(i));
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) lg += log_beta_fn(0.5, mu(i) + mu(j));
  return std::exp(lg);
}

IntegralResult c_s_quadrature(const Vector& s) {
  const int n = static_cast<int>(s.size());
  const Vector mu = mu_exponents(s);
  for (int i = 0; i < n; ++i) {
    if (!(mu(i) > 0.0))
      throw DomainError("c_s diverges: requires r_i < 0 for all i");
  }
  if (n == 1) {
    const Fn1 log_g = [&](double a) { return 2.0 * s(0) * std::log(a) - 1.0 / a; };
    const QuadResult q = integrate_cone_1d_log(log_g, 0.5, 1e-11);
    return {q.value, q.error};
  }
  if (n != 2) throw DomainError("c_s_quadrature: n <= 2 only");
  const double c2 = eigen_coord_constant(2);
  const auto logf = [&](double u1, double u2) {
    const double a1 = std::exp(u1), a2 = std::exp(u2);
    const double gap = std::abs(a1 - a2);
    if (gap == 0.0) return -1e308;
    Vector d2(2);
    d2 << a1 * a1, a2 * a2;
    Matrix asq = Matrix::Zero(2, 2);
    asq.diagonal() = d2;
    const double h = spherical_h_small(s, PdMatrix(asq));
    return std::log(h) - 1.0 / a1 - 1.0 / a2 + std::log(gap) - 0.5 * (u1 + u2);
  };
  const QuadResult q = integrate_exp_plane(logf, 0.4, -0.4, 1e-8);
  return {c2 * q.value, c2 * q.error};
}

}  // namespace pdflow
