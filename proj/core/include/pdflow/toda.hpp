#pragma once

#include "pdflow/types.hpp"
#include "pdflow/whittaker.hpp"

namespace pdflow {

/// Matrix Toda lattice state: positions X_i in P, momenta P_i symmetric.
struct TodaState {
  int N = 1;
  int n = 1;
  std::vector<Matrix> x;
  std::vector<Matrix> p;
  void validate() const;
};

/// Lax variables A_i = X_{i+1} X_i^{-1}, B_i = P_i X_i^{-1} and the block
/// matrices L (tridiagonal: B_i / -I / A_i) and M (subdiagonal A_i).
struct LaxPair {
  Matrix l;
  Matrix m;
  int blocks = 0;
  int n = 0;
};
LaxPair lax_pair(const TodaState& s);

/// Equations of motion: Ẋ_i = P_i, Ṗ_i = P_i X_i^{-1} P_i + X_i X_{i-1}^{-1} X_i - X_{i+1}
/// with X_0^{-1} = 0 and X_{N+1} = 0.
TodaState toda_rhs(const TodaState& s);

/// Matrix constants of motion C_k = Σ_i (L^k)_{ii}, ordered block products.
std::vector<Matrix> constants_of_motion(const TodaState& s, int kmax);
std::vector<Matrix> constants_from_lax(const Matrix& l, int blocks, int n, int kmax);

/// Generic fixed-step RK4 over lists of matrices.
using VecState = std::vector<Matrix>;
using RhsFn = std::function<VecState(const VecState&)>;

class ConeEscape : public NumericError {
 public:
  ConeEscape(double t, const std::string& what)
      : NumericError(what), time(t) {}
  double time;
};

struct Rk4Result {
  std::vector<double> times;
  std::vector<VecState> states;
};

/// Integrates to T with step h; pd_indices are components that must stay in
/// the cone (ConeEscape with the timestamp otherwise).
Rk4Result integrate_rk4(const RhsFn& rhs, const VecState& y0, double T,
                        double h, int store_every = 1,
                        const std::vector<int>& pd_indices = {});

/// Coupled Bäcklund flow between the N- and (N-1)-particle systems.
struct BacklundState {
  double nu = 0.0;
  std::vector<Matrix> x;  // N
  std::vector<Matrix> y;  // N-1
};

/// Velocity fields B_i = ν + Y_i X_i^{-1} - X_i Y_{i-1}^{-1},
/// B'_i = ν + Y_i X_i^{-1} - X_{i+1} Y_i^{-1} (conventions X_{N+1}=Y_N=Y_0^{-1}=0).
struct BacklundRhs {
  std::vector<Matrix> xdot;
  std::vector<Matrix> ydot;
};
BacklundRhs backlund_rhs(const BacklundState& s);

std::vector<Matrix> backlund_b(const BacklundState& s);        // B_i, i=1..N
std::vector<Matrix> backlund_b_prime(const BacklundState& s);  // B'_i, i=1..N-1

/// Relative Frobenius residual of L^{(N)}(A,B) D(X,Y) - D(X,Y) L̂^{(N-1)}(A',B',ν);
/// an exact algebraic identity at any state.
double dressing_residual(const BacklundState& s);

/// Critical point of F_λ(Y) = F(Y) - ln e_λ(Y) on the anchored domain
/// (damped Newton on the gradient system; initial iterate interpolates log X).
TriangularArray critical_point(const Vector& lambda,
                               const std::vector<PdMatrix>& x, double tol = 1e-10,
                               int max_iter = 200);

/// Max Frobenius norm of θ_{Y^m_i} F_λ over the free particles (m < N).
double cpe_residual(const TriangularArray& y, const Vector& lambda);

/// Deterministic cascade: Ẏ^m_i = B^m_i Y^m_i with
/// B^m_i = λ_m + Y^{m-1}_i (Y^m_i)^{-1} - Y^m_i (Y^{m-1}_{i-1})^{-1}, all levels.
std::vector<Matrix> cascade_rhs(const TriangularArray& y, const Vector& lambda);

/// Toda state induced by the top two rows of a triangular array
/// (positions = top row, momenta from the cascade velocity).
TodaState toda_from_cascade(const TriangularArray& y, const Vector& lambda);

}  // namespace pdflow
