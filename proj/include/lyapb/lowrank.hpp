#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "lyapb/banded.hpp"
#include "lyapb/factor.hpp"

namespace lyapb {

/// X_L = left * diag(sig) * right^T; an empty `right` means right == left.
struct LowRankFactor {
  Eigen::MatrixXd left;
  Eigen::MatrixXd right;
  Eigen::VectorXd sig;

  [[nodiscard]] index_t rank() const { return left.cols(); }
  [[nodiscard]] bool symmetric() const { return right.size() == 0; }
  [[nodiscard]] const Eigen::MatrixXd& right_or_left() const { return right.size() == 0 ? left : right; }
  [[nodiscard]] Eigen::MatrixXd dense() const;
};

/// Orthonormal basis of the inverse Krylov space K_m(A^{-1}, v) together with
/// the projections of A, D and the banded residual R_B.
class KrylovState {
 public:
  /// R_B may be empty (order 0) when only the basis and projections are needed.
  KrylovState(const RealBanded& A, const CholFactor& chol, const RealBanded& D, const RealBanded& RB,
              const Eigen::VectorXd& v0);

  /// Append one vector; returns false on breakdown (invariant subspace).
  bool expand();

  /// Number of basis vectors held, including the newest one.
  [[nodiscard]] index_t size() const { return m_; }
  [[nodiscard]] bool broke_down() const { return breakdown_; }

  [[nodiscard]] auto V(index_t m) const { return V_.leftCols(m); }
  [[nodiscard]] auto K(index_t m) const { return K_.topLeftCorner(m, m); }
  [[nodiscard]] auto Dm(index_t m) const { return Dm_.topLeftCorner(m, m); }
  [[nodiscard]] auto H(index_t m) const { return H_.topLeftCorner(m + 1, m); }
  /// (m+1) x (m+1) projection of R_B onto [V_m, v_hat].
  [[nodiscard]] Eigen::MatrixXd W_RB_W(index_t m, const Eigen::VectorXd& vhat) const;
  /// A v_{m+1} for the basis vector with 0-based index m.
  [[nodiscard]] Eigen::VectorXd A_times(index_t col) const;

 private:
  void grow();
  void absorb(index_t col);

  const RealBanded& A_;
  const CholFactor& chol_;
  const RealBanded& D_;
  const RealBanded& RB_;
  index_t n_ = 0;
  index_t m_ = 0;
  bool breakdown_ = false;
  Eigen::MatrixXd V_, H_, K_, Dm_, RBV_, VtRBV_;
};

struct ProjectedSolution {
  Eigen::MatrixXd Pi;
  Eigen::VectorXd Psi;
  Eigen::MatrixXd Zhat;
};

/// K = Pi diag(Psi) Pi^T, Zhat_ij = (Pi^T Dm Pi)_ij / (psi_i + psi_j).
ProjectedSolution projected_solve(const Eigen::MatrixXd& K, const Eigen::MatrixXd& Dm);

struct AssembledFactor {
  LowRankFactor factor;
  Eigen::MatrixXd Delta;  // factor.left = V * Delta
};

AssembledFactor assemble_S(const Eigen::Ref<const Eigen::MatrixXd>& V, const ProjectedSolution& ps, double tau,
                           double drop_tol = 1e-12);

struct ArnoldiG {
  Eigen::VectorXd vhat;
  Eigen::MatrixXd G;  // (m+1) x m with A V_m = [V_m, vhat] G
  double eta = 0.0;
};

ArnoldiG arnoldi_G(const KrylovState& st, index_t m);

struct CheapResidual {
  double value = 0.0;
  bool cancellation = false;
};

/// ||A(X_B + X_L) + (X_B + X_L)A - D||_F from projected quantities only.
CheapResidual cheap_residual(double gamma, const ArnoldiG& g, const Eigen::MatrixXd& Delta,
                             const Eigen::VectorXd& sig, const Eigen::MatrixXd& WtRBW);

enum class StopReason { converged, stagnated, breakdown, max_iterations, trivial };
const char* to_string(StopReason r) noexcept;

struct LowRankOptions {
  double eps_res = 1e-3;
  double eps_it = 1e-5;
  int m_max = 2000;
  int check_period = 10;
  double drop_tol = 1e-12;
  std::uint64_t seed = 42;
};

struct LowRankReport {
  int iterations = 0;
  double final_relres = 0.0;
  double gamma = 0.0;
  StopReason stop = StopReason::trivial;
  bool cancellation = false;
  std::vector<std::pair<int, double>> residual_history;
};

struct LowRankResult {
  LowRankFactor factor;
  LowRankReport report;
};

/// Unit start vector drawn from a seeded normal distribution.
Eigen::VectorXd random_unit_vector(index_t n, std::uint64_t seed);

/// Low-rank approximation of exp(-tau A) X exp(-tau A) for A X + X A = D, given X_B.
LowRankResult lowrank_iterate(const RealBanded& A, const CholFactor& chol, const RealBanded& D,
                              const RealBanded& XB, double tau, const LowRankOptions& opts = {});

/// Two-space analogue for A X + X B = D.
LowRankResult lowrank_iterate_sylvester(const RealBanded& A, const CholFactor& cholA, const RealBanded& B,
                                        const CholFactor& cholB, const RealBanded& D, const RealBanded& XB,
                                        double tau, const LowRankOptions& opts = {});

/// ||R_B + A L diag(sig) Rt^T + L diag(sig) Rt^T B||_F for banded R_B and a low-rank
/// factor, without forming n x n matrices.
double lowrank_residual_norm(const RealBanded& RB, const RealBanded& A, const RealBanded& B,
                             const LowRankFactor& F);

/// X * M for banded X and dense M.
Eigen::MatrixXd band_times_dense(const RealBanded& X, const Eigen::MatrixXd& M);

}  // namespace lyapb
