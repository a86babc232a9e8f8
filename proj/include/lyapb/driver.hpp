#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lyapb/banded.hpp"
#include "lyapb/cg_solver.hpp"
#include "lyapb/decay_bounds.hpp"
#include "lyapb/exp_banded.hpp"
#include "lyapb/lowrank.hpp"

namespace lyapb {

enum class Method { automatic, cg, split };
Method parse_method(const std::string& s);
const char* to_string(Method m) noexcept;

struct SolverConfig {
  double eps_res = 1e-3;
  int m_max = 2000;
  double eps_tau = 1e-5;
  index_t beta_max = 500;
  int nu = 6;
  double eps_B = 1e-5;
  double eps_quad = 1e-5;
  int check_period = 10;
  std::uint64_t seed = 42;

  std::optional<double> eps_it;  // defaults to eps_quad
  std::optional<double> tau;     // overrides the automatic choice
  bool nu_from_eps_quad = false;
  double drop_tol = 1e-12;
  double kappa_threshold = 1e4;
  double eig_tol = 1e-4;
  Method method = Method::automatic;
};

struct MemoryReport {
  std::size_t bytes_banded = 0;
  std::size_t bytes_lowrank = 0;
  std::size_t bytes_dense = 0;
  [[nodiscard]] std::size_t total() const { return bytes_banded + bytes_lowrank; }
};

struct SolveReport {
  Method method = Method::cg;
  int iterations = 0;
  double relres = 0.0;
  bool converged = false;
  std::string stop_reason;
  double tau = 0.0;
  index_t beta_xb = 0;
  index_t rank = 0;
  double seconds = 0.0;
  double lambda_min = 0.0;
  double lambda_max = 0.0;
  index_t max_beta_exp = 0;
  int quadrature_evaluations = 0;
  std::vector<std::pair<int, double>> residual_history;
};

/// X = XB + low_rank (the low-rank part is empty for CG solutions).
struct SplitSolution {
  RealBanded XB;
  LowRankFactor low_rank;
  double scale_applied = 1.0;
  double tau = 0.0;
  SolveReport report;

  [[nodiscard]] index_t order() const { return XB.order(); }
  [[nodiscard]] double entry(index_t i, index_t j) const;
  [[nodiscard]] std::vector<double> apply(std::span<const double> v) const;
  /// ||A X + X A - D||_F
  [[nodiscard]] double residual_norm(const RealBanded& A, const RealBanded& D) const;
  /// ||A X + X B - D||_F
  [[nodiscard]] double residual_norm(const RealBanded& A, const RealBanded& B, const RealBanded& D) const;
  [[nodiscard]] MemoryReport memory_report() const;
  [[nodiscard]] Eigen::MatrixXd dense() const;
};

/// Extreme eigenvalue estimates, widened by the estimate tolerance.
SpectralInterval estimate_spectrum(const RealBanded& A, double tol, std::uint64_t seed = 1);

Method method_select(double kappa, const SolverConfig& cfg);

SplitSolution solve_lyapunov(const RealBanded& A, const RealBanded& D, const SolverConfig& cfg = {});
SplitSolution solve_sylvester(const RealBanded& A, const RealBanded& B, const RealBanded& D,
                              const SolverConfig& cfg = {});

}  // namespace lyapb
