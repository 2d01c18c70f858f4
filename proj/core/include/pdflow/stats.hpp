#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace pdflow {

struct Moments {
  double mean = 0.0;
  double var = 0.0;      // unbiased
  double stderr_ = 0.0;  // of the mean
  long count = 0;
};

Moments moments(std::span<const double> xs);

/// Welch z statistic for the difference of means.
double welch_z(const Moments& a, const Moments& b);

/// Two-sample Kolmogorov-Smirnov statistic and asymptotic p-value.
double ks_statistic(std::vector<double> a, std::vector<double> b);
double ks_p_value(double d, std::size_t m, std::size_t n);

/// One experiment check. pass ⇔ |z| <= z_max and (no ks_p or ks_p >= ks_floor).
/// Deterministic residual checks are encoded with z = z_max * residual / tol so
/// the same rule applies.
struct StatReport {
  std::string kind;
  std::string params;
  double estimate = 0.0;
  double stderr_ = 0.0;
  double reference = 0.0;
  double reference_error = 0.0;
  double z = 0.0;
  std::optional<double> ks_p;
  bool pass = false;
  std::uint64_t seed = 0;
  double T = 0.0;
  double h = 0.0;
  std::string note;
};

struct PassPolicy {
  double z_max = 3.0;
  double ks_floor = 0.01;
};

/// Fills z (from estimate/reference and errors) and the pass flag.
void finalize_report(StatReport& r, const PassPolicy& policy);

/// Deterministic residual row: pass ⇔ residual <= tol.
StatReport residual_report(const std::string& kind, double residual, double tol,
                           const PassPolicy& policy = {});

/// Welch z on means plus two-sample KS; degenerate variances fall back to an
/// exact-equality check.
StatReport two_sample_report(const std::string& kind,
                             const std::vector<double>& a,
                             const std::vector<double>& b,
                             const PassPolicy& policy = {});

}  // namespace pdflow
