#include "pdflow/whittaker.hpp"

#include <cmath>

#include "pdflow/quad.hpp"

namespace pdflow {

TriangularArray::TriangularArray(int levels, int n) : N_(levels), n_(n) {
  if (levels < 1 || n < 1) throw DomainError("TriangularArray: bad shape");
  ys_.assign(particle_count(), Matrix::Identity(n, n));
}

TriangularArray TriangularArray::anchored(const std::vector<PdMatrix>& top) {
  const int levels = static_cast<int>(top.size());
  TriangularArray t(levels, top[0].dim());
  for (int i = 1; i <= levels; ++i) t.y(levels, i) = top[i - 1].mat();
  return t;
}

Matrix& TriangularArray::y(int m, int i) {
  if (m < 1 || m > N_ || i < 1 || i > m) throw DomainError("TriangularArray: index");
  return ys_[flat_index(m, i)];
}

const Matrix& TriangularArray::y(int m, int i) const {
  return const_cast<TriangularArray*>(this)->y(m, i);
}

void TriangularArray::check_pd() const {
  for (const Matrix& m : ys_) PdMatrix{m};
}

double whittaker_energy(const TriangularArray& y) {
  double f = 0.0;
  for (int m = 1; m < y.levels(); ++m) {
    for (int i = 1; i <= m; ++i) {
      const PdMatrix upper_i(y.y(m + 1, i));
      const PdMatrix lower(y.y(m, i));
      f += (y.y(m, i) * upper_i.inverse()).trace();
      f += (y.y(m + 1, i + 1) * lower.inverse()).trace();
    }
  }
  return f;
}

double log_e_lambda(const TriangularArray& y, const Vector& lambda) {
  if (lambda.size() != y.levels()) throw DomainError("log_e_lambda: |λ| != N");
  double out = 0.0;
  for (int m = 1; m <= y.levels(); ++m) {
    double logdet_m = 0.0;
    for (int i = 1; i <= m; ++i) logdet_m += PdMatrix(y.y(m, i)).log_det();
    out += lambda(m - 1) * logdet_m;
    if (m >= 2) {
      double logdet_prev = 0.0;
      for (int i = 1; i <= m - 1; ++i)
        logdet_prev += PdMatrix(y.y(m - 1, i)).log_det();
      out -= lambda(m - 1) * logdet_prev;
    }
  }
  return out;
}

double whittaker_energy_lambda(const TriangularArray& y, const Vector& lambda) {
  return whittaker_energy(y) - log_e_lambda(y, lambda);
}

double log_q_kernel(double nu, const std::vector<PdMatrix>& x,
                    const std::vector<PdMatrix>& y) {
  const int bign = static_cast<int>(x.size());
  if (static_cast<int>(y.size()) != bign - 1) throw DomainError("log_q_kernel: sizes");
  double out = 0.0;
  for (const PdMatrix& xi : x) out += nu * xi.log_det();
  for (const PdMatrix& yi : y) out -= nu * yi.log_det();
  for (int i = 0; i < bign - 1; ++i) {
    out -= (y[i].mat() * x[i].inverse()).trace();
    out -= (x[i + 1].mat() * y[i].inverse()).trace();
  }
  return out;
}

namespace {

IntegralResult psi_n1(const Vector& lambda, const std::vector<double>& x,
                      double rel_tol) {
  const int bign = static_cast<int>(x.size());
  if (bign == 1) return {std::pow(x[0], lambda(0)), 0.0};
  if (bign == 2) {
    const double l1 = lambda(0), l2 = lambda(1);
    const Fn1 log_g = [&](double y) {
      return (l1 - l2) * std::log(y) - y / x[0] - x[1] / y;
    };
    const QuadResult q =
        integrate_cone_1d_log(log_g, std::sqrt(x[0] * x[1]), rel_tol);
    const double pref = std::pow(x[0] * x[1], l2);
    return {pref * q.value, pref * q.error};
  }
  if (bign == 3) {
    const Vector sub = lambda.head(2);
    const double l3 = lambda(2);
    const double pref = std::pow(x[0] * x[1] * x[2], l3);
    double inner_err = 0.0;
    const auto logf = [&](double u1, double u2) {
      const double y1 = std::exp(u1), y2 = std::exp(u2);
      const IntegralResult inner = psi_n1(sub, {y1, y2}, rel_tol);
      inner_err = std::max(inner_err, inner.error / std::max(inner.value, 1e-300));
      return -l3 * (u1 + u2) - y1 / x[0] - x[1] / y1 - y2 / x[1] - x[2] / y2 +
             std::log(inner.value);
    };
    const QuadResult q = integrate_exp_plane(
        logf, std::log(std::sqrt(x[0] * x[1])), std::log(std::sqrt(x[1] * x[2])),
        std::max(rel_tol, 1e-8));
    return {pref * q.value, pref * (q.error + inner_err * q.value)};
  }
  throw DomainError("whittaker_psi: n=1 supports N <= 3");
}

}  // namespace

namespace {

IntegralResult psi_dispatch(const Vector& lambda,
                            const std::vector<PdMatrix>& x,
                            const PsiConfig& cfg);

}  // namespace

IntegralResult whittaker_psi(const Vector& lambda,
                             const std::vector<PdMatrix>& x,
                             const PsiConfig& cfg) {
  const IntegralResult out = psi_dispatch(lambda, x, cfg);
  if (!std::isfinite(out.value) ||
      (out.value != 0.0 && out.error > 0.25 * std::abs(out.value))) {
    throw NumericError("whittaker_psi: integration budget exceeded, achieved "
                       "relative tolerance " +
                       std::to_string(out.error / std::abs(out.value)));
  }
  return out;
}

namespace {

IntegralResult psi_dispatch(const Vector& lambda,
                            const std::vector<PdMatrix>& x,
                            const PsiConfig& cfg) {
  const int bign = static_cast<int>(x.size());
  if (lambda.size() != bign) throw DomainError("whittaker_psi: |λ| != N");
  const int n = x[0].dim();
  if (n == 1) {
    std::vector<double> xs(bign);
    for (int i = 0; i < bign; ++i) xs[i] = x[i](0, 0);
    return psi_n1(lambda, xs, cfg.rel_tol);
  }
  if (bign == 1) {
    return {std::exp(lambda(0) * x[0].log_det()), 0.0};
  }
  if (bign == 2) {
    // ψ_λ(X) = e_{λ2}(X) K_n(λ1-λ2 | X1^{-1}, X2)
    const double pref =
        std::exp(lambda(1) * (x[0].log_det() + x[1].log_det()));
    const IntegralResult k = bessel_K_nu(lambda(0) - lambda(1),
                                         x[0].pd_inverse(), x[1], cfg.bessel);
    return {pref * k.value, pref * k.error};
  }
  throw DomainError("whittaker_psi: n=2 supports N <= 2");
}

}  // namespace

double log_whittaker_psi_n1_2(const Vector& lambda, double x1, double x2) {
  const double alpha = lambda(0) - lambda(1);
  const double z = 2.0 * std::sqrt(x2 / x1);
  return std::log(2.0) + (lambda(1) + 0.5 * alpha) * std::log(x1 * x2) - z +
         std::log(macdonald_k_scaled(alpha, z));
}

IntegralResult whittaker_density(const Vector& lambda, const Vector& nu,
                                 const std::vector<PdMatrix>& x,
                                 const PsiConfig& cfg) {
  const int bign = static_cast<int>(x.size());
  const int n = x[0].dim();
  double log_norm = 0.0;
  for (int i = 0; i < bign; ++i) {
    for (int j = 0; j < bign; ++j) {
      const double a = lambda(i) + nu(j);
      if (!(a > 0.5 * (n - 1))) {
        throw DomainError("whittaker_density: requires λ_i + ν_j > (n-1)/2");
      }
      log_norm -= log_gamma_n_nu(n, a);
    }
  }
  const IntegralResult pl = whittaker_psi(-lambda, x, cfg);
  const IntegralResult pn = whittaker_psi(-nu, x, cfg);
  const double etr = std::exp(-(x[bign - 1].inverse()).trace());
  IntegralResult r;
  r.value = std::exp(log_norm) * etr * pl.value * pn.value;
  r.error = std::exp(log_norm) * etr *
            (pl.error * pn.value + pn.error * pl.value);
  return r;
}

IntegralResult stade_lhs_n1_2(double s, double a_scale, const Vector& lambda,
                              const Vector& nu, double rel_tol) {
  const auto logf = [&](double u1, double u2) {
    const double x1 = std::exp(u1), x2 = std::exp(u2);
    return s * u1 - x1 / a_scale + log_whittaker_psi_n1_2(lambda, x1, x2) +
           log_whittaker_psi_n1_2(nu, x1, x2);
  };
  const QuadResult q = integrate_exp_plane(logf, 0.0, 0.0, rel_tol);
  return {q.value, q.error};
}

double stade_rhs_n1_2(double s, double a_scale, const Vector& lambda,
                      const Vector& nu) {
  const double a = lambda.sum() + nu.sum();
  double lg = std::lgamma(s + a) - std::lgamma(a) + (s + a) * std::log(a_scale);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) lg += std::lgamma(lambda(i) + nu(j));
  return std::exp(lg);
}

}  // namespace pdflow
