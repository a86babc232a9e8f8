#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

#include <Eigen/Dense>

#include "lyapb/banded.hpp"
#include "lyapb/driver.hpp"

namespace lyapb {

/// Spectral solution of A X + X A = D (A symmetric positive definite, n <= 2000).
Eigen::MatrixXd dense_lyap_oracle(const Eigen::MatrixXd& A, const Eigen::MatrixXd& D);
/// Integral over [0, tau] of exp(-tA) D exp(-tA).
Eigen::MatrixXd dense_finite_horizon_oracle(const Eigen::MatrixXd& A, const Eigen::MatrixXd& D, double tau);
Eigen::MatrixXd dense_sylvester_oracle(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B, const Eigen::MatrixXd& D);
/// exp(-tA) for symmetric A.
Eigen::MatrixXd dense_expm_sym(const Eigen::MatrixXd& A, double t);

struct ProblemData {
  std::string generator;
  index_t n = 0;
  double gamma = 0.0;
  std::uint64_t seed = 0;
  RealBanded A;
  std::optional<RealBanded> B;
  RealBanded D;
};

/// Kronecker-sum operator of order 6*n_blocks with a block right-hand side.
ProblemData gen_kron_example(index_t n_blocks);
/// Finite differences of -(1/gamma)(e^x u')' + gamma u on (0,1), diagonal random D.
ProblemData gen_1d_operator(index_t n, double gamma, std::uint64_t seed = 1);
/// Fourth-order second-difference stencil plus gamma*diag(log(10(x+1))), tridiagonal D with unit norm.
ProblemData gen_pentadiag_operator(index_t n, double gamma, std::uint64_t seed = 1);
/// Diagonally dominant symmetric M-matrix with random off-diagonals in [-1, 0)
/// and diagonal shift uniform in [delta, 2 delta].
RealBanded random_spd_banded(index_t n, index_t beta, double delta, std::uint64_t seed);
/// Random symmetric banded matrix with entries in [-1, 1].
RealBanded random_sym_banded(index_t n, index_t beta, std::uint64_t seed);

ProblemData generate(const std::string& id, index_t n, double gamma, std::uint64_t seed);

struct RunRecord {
  std::string generator;
  index_t n = 0;
  double gamma = 0.0;
  std::string method;
  int iterations = 0;
  index_t beta = 0;
  index_t rank = 0;
  double tau = 0.0;
  double seconds = 0.0;
  double relres = 0.0;
  std::size_t bytes = 0;
  double kappa = 0.0;
  std::string stop_reason;
};

RunRecord run_experiment(const ProblemData& p, const SolverConfig& cfg);
void write_record_header(std::ostream& out);
void write_record(std::ostream& out, const RunRecord& r);

/// CSV columns i, abs_x, bound_thm21, bound_thm22 for column j (1-based in the output).
void emit_decay_profile(std::ostream& out, const RealBanded& D, const SpectralInterval& spec,
                        const Eigen::MatrixXd& X, index_t j, index_t stride = 1);

}  // namespace lyapb
