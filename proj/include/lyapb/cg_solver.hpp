#pragma once

#include <optional>
#include <vector>

#include "lyapb/banded.hpp"

namespace lyapb {

struct CgIterate {
  int iter = 0;
  double relres = 0.0;
  index_t beta_W = 0;
  index_t beta_X = 0;
  index_t beta_R = 0;
  index_t beta_P = 0;
};

struct CgReport {
  int iterations = 0;
  double final_relres = 0.0;
  index_t beta_X = 0;
  bool converged = false;
  std::vector<CgIterate> residual_history;
};

struct CgOptions {
  double eps_res = 1e-3;
  int max_it = 2000;
  int recompute_period = 50;
};

struct CgResult {
  RealBanded X;
  CgReport report;
};

/// A X + X A for symmetric X, stored symmetric.
RealBanded lyap_apply(const RealBanded& A, const RealBanded& X);
/// A X + X B, stored general.
RealBanded sylv_apply(const RealBanded& A, const RealBanded& B, const RealBanded& X);
/// Symmetric storage of a matrix that is symmetric up to 1e-14 relative; throws otherwise.
RealBanded as_symmetric(const RealBanded& X);

/// Matrix-oriented CG for A X + X A = D with symmetric banded iterates.
CgResult lyap_cg(const RealBanded& A, const RealBanded& D, const CgOptions& opts = {},
                 std::optional<RealBanded> X0 = std::nullopt);

/// Matrix-oriented CG for A X + X B = D with general banded iterates.
CgResult sylv_cg(const RealBanded& A, const RealBanded& B, const RealBanded& D, const CgOptions& opts = {},
                 std::optional<RealBanded> X0 = std::nullopt);

}  // namespace lyapb
