#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "lyapb/banded.hpp"

namespace lyapb {

struct CholFactor {
  RealBanded L;  // lower
};

struct LdltFactor {
  ComplexBanded L;  // lower, unit diagonal stored explicitly
  std::vector<cplx> d;
};

struct EigPair {
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  bool converged = true;
  int iterations = 0;
};

struct SymEig {
  Eigen::VectorXd values;   // ascending
  Eigen::MatrixXd vectors;  // columns
};

/// Banded Cholesky A = L L^T. Throws not_spd on a non-positive pivot.
CholFactor banded_cholesky(const RealBanded& A);
std::vector<double> chol_solve(const CholFactor& F, std::span<const double> b);

/// Unpivoted M = L diag(d) L^T for complex symmetric banded M.
LdltFactor complex_ldlt(const ComplexBanded& M);

/// Entries q..p_hat (0-based, inclusive) of column q of M^{-1}, using only
/// rows q..p_hat of the triangular sweeps.
std::vector<cplx> partial_inverse_column(const LdltFactor& F, index_t q, index_t p_hat);

/// Extreme eigenvalues of an SPD banded matrix by Lanczos with full
/// reorthogonalization; the smallest one via inverse applications.
EigPair lanczos_extreme_eigs(const RealBanded& A, double tol = 1e-4, int maxit = 300, std::uint64_t seed = 1);

SymEig sym_eig_dense(const Eigen::MatrixXd& M);

Eigen::MatrixXd to_dense(const RealBanded& X);
Eigen::MatrixXcd to_dense(const ComplexBanded& X);
RealBanded from_dense(const Eigen::MatrixXd& M, index_t beta, Structure s = Structure::general);

}  // namespace lyapb
