#include "pdflow/samplers.hpp"

#include <cmath>

namespace pdflow {

void WishartParams::validate() const {
  if (!(dof > sigma.dim() - 1)) {
    throw DomainError("Wishart requires p > n-1 (got p = " + std::to_string(dof) +
                      ", n = " + std::to_string(sigma.dim()) + ")");
  }
}

Matrix sample_haar_orthogonal(int n, RngStream& rng) {
  if (n < 1) throw DomainError("sample_haar_orthogonal: n >= 1 required");
  const Matrix g = rng.gaussian_matrix(n, n);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < n; ++i) {
    if (r(i, i) < 0.0) q.col(i) = -q.col(i);
  }
  return q;
}

PdMatrix sample_wishart(const WishartParams& params, RngStream& rng) {
  params.validate();
  const int n = params.sigma.dim();
  const double p = params.dof;
  const Matrix root = params.sigma.sqrt();
  const bool integral = std::abs(p - std::round(p)) < 1e-12 && p >= n;
  Matrix core(n, n);
  if (integral) {
    const int pi = static_cast<int>(std::round(p));
    const Matrix a = rng.gaussian_matrix(pi, n);
    core = a.transpose() * a;
  } else {
    Matrix l = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i) {
      l(i, i) = std::sqrt(rng.chi_square(p - i));
      for (int j = 0; j < i; ++j) l(i, j) = rng.normal();
    }
    core = l * l.transpose();
  }
  return PdMatrix(root * core * root);
}

PdMatrix sample_inverse_wishart(const WishartParams& params, RngStream& rng) {
  return sample_wishart(params, rng).pd_inverse();
}

double sample_gig_1d(double lambda, double chi, double psi, RngStream& rng) {
  if (!(chi > 0.0) || !(psi > 0.0)) {
    throw DomainError("sample_gig_1d: chi, psi must be positive");
  }
  // log density up to a constant
  const auto logf = [&](double x) {
    return (lambda - 1.0) * std::log(x) - 0.5 * (chi / x + psi * x);
  };
  const auto mode = [&](double lm) {
    return ((lm - 1.0) + std::sqrt((lm - 1.0) * (lm - 1.0) + chi * psi)) / psi;
  };
  const double xm = mode(lambda);
  const double lf0 = logf(xm);
  // bound of x*sqrt(f): maximizes logf + 2 log x, i.e. lambda -> lambda + 2
  const double xv = mode(lambda + 2.0);
  const double vmax = xv * std::exp(0.5 * (logf(xv) - lf0));
  for (;;) {
    const double u = rng.uniform_open();
    const double v = rng.uniform() * vmax;
    const double x = v / u;
    if (2.0 * std::log(u) <= logf(x) - lf0) return x;
  }
}

MatrixGigChain::MatrixGigChain(const MatrixGigParams& params,
                               const McmcConfig& config, RngStream rng)
    : params_(params), config_(config), rng_(rng), scale_(config.initial_scale) {
  const int n = params_.a.dim();
  if (params_.b.dim() != n) throw DomainError("matrix GIG: dim mismatch");
  // start at the scalar-matched mode of the diagonal problem
  const double a0 = params_.a.mat().trace() / n;
  const double b0 = params_.b.mat().trace() / n;
  const double x0 = (params_.nu + std::sqrt(params_.nu * params_.nu + 4.0 * a0 * b0)) /
                    (2.0 * a0);
  s_ = Matrix::Identity(n, n) * std::log(std::max(x0, 1e-12));
  logp_ = log_target(s_, eig_sym(s_));
  // burn-in with scale adaptation
  for (int i = 0; i < config_.burn_in; ++i) {
    const double before = static_cast<double>(accepted_);
    step();
    const double acc = static_cast<double>(accepted_) - before;
    scale_ *= std::exp((acc - config_.target_accept) * 0.05);
    scale_ = std::min(std::max(scale_, 1e-4), 10.0);
  }
  accepted_ = 0;
  proposed_ = 0;
  trace_.clear();
}

double MatrixGigChain::log_target(const Matrix& s, const EigDecomp& eig) const {
  // X = exp(S); target density on S-space (Lebesgue) is
  // |X|^{nu - (n+1)/2} etr(-A X - B X^{-1}) * det(d exp | S).
  const int n = static_cast<int>(s.rows());
  const Vector& kap = eig.eigenvalues;
  Matrix x = Matrix::Zero(n, n);
  Matrix xinv = Matrix::Zero(n, n);
  {
    const Vector el = kap.array().exp();
    const Vector eli = (-kap.array()).exp();
    x = eig.frame * el.asDiagonal() * eig.frame.transpose();
    xinv = eig.frame * eli.asDiagonal() * eig.frame.transpose();
  }
  const double trs = s.trace();
  double logjac = 0.0;  // det of d exp on symmetric matrices
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      const double d = kap(i) - kap(j);
      if (std::abs(d) < 1e-9) {
        logjac += 0.5 * (kap(i) + kap(j));
      } else {
        logjac += std::log(std::abs(std::exp(kap(i)) - std::exp(kap(j))) /
                           std::abs(d));
      }
    }
  }
  const double lp = (params_.nu - 0.5 * (n + 1.0)) * trs -
                    (params_.a.mat() * x).trace() -
                    (params_.b.mat() * xinv).trace() + logjac;
  if (!std::isfinite(lp)) throw NumericError("matrix GIG: non-finite density");
  return lp;
}

void MatrixGigChain::step() {
  const int n = static_cast<int>(s_.rows());
  const Matrix prop = s_ + scale_ * rng_.gaussian_sym(n);
  const EigDecomp eig = eig_sym(prop);
  const double lp = log_target(prop, eig);
  ++proposed_;
  if (std::log(rng_.uniform_open()) < lp - logp_) {
    s_ = prop;
    logp_ = lp;
    ++accepted_;
  }
}

PdMatrix MatrixGigChain::next() {
  for (int i = 0; i < config_.thin; ++i) step();
  PdMatrix x(expm_sym(s_));
  trace_.push_back(x.mat().trace());
  return x;
}

void MatrixGigChain::update_diagnostics() {
  diag_.acceptance_rate =
      proposed_ > 0 ? static_cast<double>(accepted_) / proposed_ : 0.0;
  diag_.acceptance_warning =
      diag_.acceptance_rate < 0.1 || diag_.acceptance_rate > 0.7;
  // ESS of tr X via initial positive autocorrelation sum
  const size_t m = trace_.size();
  diag_.ess = static_cast<double>(m);
  if (m >= 10) {
    double mean = 0.0;
    for (double v : trace_) mean += v;
    mean /= m;
    double var = 0.0;
    for (double v : trace_) var += (v - mean) * (v - mean);
    var /= m;
    if (var > 0.0) {
      double tau = 1.0;
      for (size_t lag = 1; lag < m / 2; ++lag) {
        double c = 0.0;
        for (size_t i = 0; i + lag < m; ++i)
          c += (trace_[i] - mean) * (trace_[i + lag] - mean);
        c /= (m - lag) * var;
        if (c < 0.02) break;
        tau += 2.0 * c;
      }
      diag_.ess = m / tau;
    }
  }
}

PdMatrix sample_matrix_gig(const MatrixGigParams& params, RngStream& rng,
                           const McmcConfig& config, McmcDiagnostics* diag) {
  MatrixGigChain chain(params, config, rng.sub_stream(0xa11ce));
  PdMatrix x = chain.next();
  if (diag) {
    chain.update_diagnostics();
    *diag = chain.diagnostics();
  }
  return x;
}

PdMatrix sample_kernel_pi(double a, const PdMatrix& x, RngStream& rng) {
  const int n = x.dim();
  if (!(2.0 * a > n - 1)) {
    throw DomainError("kernel Pi_a requires 2a > n-1 (got a = " +
                      std::to_string(a) + ", n = " + std::to_string(n) + ")");
  }
  const WishartParams wp{PdMatrix(Matrix::Identity(n, n) * 0.5), 2.0 * a};
  const PdMatrix w = sample_wishart(wp, rng);
  const Matrix root = x.sqrt();
  return PdMatrix(root * w.mat() * root);
}

}  // namespace pdflow
