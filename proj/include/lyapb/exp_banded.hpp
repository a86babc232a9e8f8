#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "lyapb/banded.hpp"
#include "lyapb/decay_bounds.hpp"

namespace lyapb {

/// r(x) = offset + sum_j weights[j] / (x - poles[j]), close to exp(-x) on [0, inf).
struct RationalChebTable {
  int nu = 0;
  double offset = 0.0;
  std::vector<cplx> poles;
  std::vector<cplx> weights;
  std::optional<std::size_t> real_pole_index;

  [[nodiscard]] double operator()(double x) const;
};

/// Degree nu table, 4 <= nu <= 14.
const RationalChebTable& cheb_table(int nu);

/// Degree suggested by the eps_quad rule: floor(log10(1/eps_quad)) - 1, clamped to [4, 14].
int nu_from_eps_quad(double eps_quad);

/// Banded approximation of (tA - xi I)^{-1}, stored symmetric (complex, no conjugation).
ComplexBanded banded_resolvent(const RealBanded& A, const SpectralInterval& spec, double t, cplx xi, double eps_B);

/// Truncated rational approximation of exp(-tA).
RealBanded rational_exp(const RealBanded& A, const SpectralInterval& spec, double t, const RationalChebTable& table,
                        double eps_B, double eps_quad);

struct QuadNode {
  double t = 0.0;
  double w = 0.0;
};

struct QuadratureStats {
  int evaluations = 0;
  int intervals = 0;
  int max_depth_reached = 0;
};

/// Adaptive Gauss-Lobatto integration of a banded-matrix valued function.
/// Intervals are accepted when the Frobenius norm of the coarse/fine
/// difference is at most eps times the first-pass integral estimate.
RealBanded adaptive_lobatto(const std::function<RealBanded(double)>& f, double a, double b, double eps,
                            int max_depth = 30, QuadratureStats* stats = nullptr);

struct ExpOptions {
  int nu = 6;
  double eps_B = 1e-5;
  double eps_quad = 1e-5;
  int max_depth = 30;
};

struct XbResult {
  RealBanded XB;
  index_t max_beta_exp = 0;  // widest truncated exponential over the nodes
  QuadratureStats stats;
};

/// Banded part of the splitting: integral over [0, tau] of exp(-tA) D exp(-tA).
XbResult compute_XB(const RealBanded& A, const SpectralInterval& spec, const RealBanded& D, double tau,
                    const ExpOptions& opts = {});

/// Integral over [0, tau] of exp(-tA) D exp(-tB).
XbResult compute_XB_sylvester(const RealBanded& A, const SpectralInterval& specA, const RealBanded& B,
                              const SpectralInterval& specB, const RealBanded& D, double tau,
                              const ExpOptions& opts = {});

}  // namespace lyapb
