#include "pdflow/stats.hpp"

#include "pdflow/types.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>

namespace pdflow {

Moments moments(std::span<const double> xs) {
  Moments m;
  m.count = static_cast<long>(xs.size());
  if (m.count == 0) return m;
  double sum = 0.0;
  for (double x : xs) sum += x;
  m.mean = sum / m.count;
  double ss = 0.0;
  for (double x : xs) ss += (x - m.mean) * (x - m.mean);
  m.var = m.count > 1 ? ss / (m.count - 1) : 0.0;
  m.stderr_ = m.count > 0 ? std::sqrt(m.var / m.count) : 0.0;
  return m;
}

double welch_z(const Moments& a, const Moments& b) {
  const double se = std::sqrt(a.stderr_ * a.stderr_ + b.stderr_ * b.stderr_);
  if (se == 0.0) return a.mean == b.mean ? 0.0 : INFINITY;
  return (a.mean - b.mean) / se;
}

double ks_statistic(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const std::size_t m = a.size(), n = b.size();
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < m && j < n) {
    const double x = std::min(a[i], b[j]);
    while (i < m && a[i] <= x) ++i;
    while (j < n && b[j] <= x) ++j;
    d = std::max(d, std::abs(double(i) / m - double(j) / n));
  }
  return d;
}

double ks_p_value(double d, std::size_t m, std::size_t n) {
  if (m == 0 || n == 0) return 1.0;
  const double ne = static_cast<double>(m) * n / (m + n);
  const double sq = std::sqrt(ne);
  const double lam = (sq + 0.12 + 0.11 / sq) * d;
  if (lam < 1e-3) return 1.0;
  double p = 0.0;
  double sign = 1.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lam * lam);
    p += sign * term;
    sign = -sign;
    if (term < 1e-12) break;
  }
  return std::min(1.0, std::max(0.0, 2.0 * p));
}

void finalize_report(StatReport& r, const PassPolicy& policy) {
  const double se =
      std::sqrt(r.stderr_ * r.stderr_ + r.reference_error * r.reference_error);
  if (se > 0.0) {
    r.z = (r.estimate - r.reference) / se;
  } else {
    r.z = r.estimate == r.reference ? 0.0 : INFINITY;
  }
  r.pass = std::abs(r.z) <= policy.z_max &&
           (!r.ks_p.has_value() || *r.ks_p >= policy.ks_floor);
}

StatReport residual_report(const std::string& kind, double residual, double tol,
                           const PassPolicy& policy) {
  StatReport r;
  r.kind = kind;
  r.estimate = residual;
  r.reference = 0.0;
  r.z = policy.z_max * residual / tol;
  r.pass = std::abs(r.z) <= policy.z_max;
  r.note = "residual tol " + std::to_string(tol);
  return r;
}

StatReport two_sample_report(const std::string& kind,
                             const std::vector<double>& a,
                             const std::vector<double>& b,
                             const PassPolicy& policy) {
  if (a.size() < 30 || b.size() < 30) {
    throw DomainError("two_sample_report: at least 30 samples per side");
  }
  StatReport r;
  r.kind = kind;
  const Moments ma = moments(a), mb = moments(b);
  r.estimate = ma.mean;
  r.stderr_ = ma.stderr_;
  r.reference = mb.mean;
  r.reference_error = mb.stderr_;
  if (ma.var == 0.0 && mb.var == 0.0) {
    r.z = ma.mean == mb.mean ? 0.0 : INFINITY;
    r.pass = ma.mean == mb.mean;
    r.note = "degenerate variance, exact-equality check";
    return r;
  }
  r.z = welch_z(ma, mb);
  r.ks_p = ks_p_value(ks_statistic(a, b), a.size(), b.size());
  r.pass = std::abs(r.z) <= policy.z_max && *r.ks_p >= policy.ks_floor;
  return r;
}

}  // namespace pdflow
