#pragma once

#include <limits>
#include <map>
#include <utility>

#include "lyapb/banded.hpp"

namespace lyapb {

struct SpectralInterval {
  double lambda_min = 1.0;
  double lambda_max = 1.0;
  index_t beta_A = 1;

  [[nodiscard]] double kappa() const { return lambda_max / lambda_min; }
};

struct TauChoice {
  double tau = 0.0;
  index_t xi_bar = 0;
  double rho = 0.0;
  double eps_tau = 0.0;
  index_t beta_max = 0;
};

/// Entry bound for the Lyapunov solution through the Kronecker system with
/// bandwidth n*beta_A. Indices are 0-based.
double haber_solution_bound(const SpectralInterval& spec, const RealBanded& D, index_t i, index_t j);

/// Bound built from the Kronecker-sum structure; the scalar weights depend
/// only on the index distance and are cached per evaluator.
class KronBound {
 public:
  explicit KronBound(SpectralInterval spec) : spec_(spec) {}

  double operator()(const RealBanded& D, index_t i, index_t j);

  /// Weight for index distance d = |k-i| + |l-j|; both_off is true when k != i and l != j.
  double theta(index_t d, bool both_off);

 private:
  SpectralInterval spec_;
  std::map<std::pair<index_t, bool>, double> cache_;
};

double kron_solution_bound(const SpectralInterval& spec, const RealBanded& D, index_t i, index_t j);

/// Decay estimate for (tA - xi I)^{-1} as prefactor * R^{-|p-q|/beta_A}.
struct FreundEstimate {
  double prefactor = 0.0;
  double R = 1.0;
  index_t beta_A = 1;

  [[nodiscard]] double at_offset(index_t d) const;
};

FreundEstimate freund_estimate(double t, cplx xi, const SpectralInterval& spec);
double freund_resolvent_bound(double t, cplx xi, const SpectralInterval& spec, index_t p, index_t q);

/// Smallest offset pbar >= 2 with bound below eps_B (independent of q).
index_t cutoff_offset(const FreundEstimate& f, double eps_B);
/// Last row p_hat = min(n-1, q + pbar) of the truncated column q (0-based).
index_t cutoff_bar_p(double t, cplx xi, const SpectralInterval& spec, index_t n, index_t q, double eps_B);

/// Entry bound for exp(-tM), M with spectrum in [0, 4 rho] and bandwidth
/// beta_M. Returns +infinity outside the two covered regimes.
double benzi_exp_bound(double rho, double t, index_t beta_M, index_t k, index_t l);

/// f_i(t) used by the tau rule, with 1-based row index i.
double tau_profile(const SpectralInterval& spec, double t, index_t i);

TauChoice select_tau(const SpectralInterval& spec, index_t beta_max, double eps_tau);

int predicted_cg_iterations(double kappa, double eps_res);

}  // namespace lyapb
