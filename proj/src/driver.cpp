#include "lyapb/driver.hpp"

#include <chrono>
#include <cmath>

#include "lyapb/factor.hpp"

namespace lyapb {

Method parse_method(const std::string& s) {
  if (s == "auto") return Method::automatic;
  if (s == "cg") return Method::cg;
  if (s == "split") return Method::split;
  throw Error(ErrorCode::invalid_argument, "unknown method '" + s + "' (auto, cg, split)");
}

const char* to_string(Method m) noexcept {
  switch (m) {
    case Method::automatic: return "auto";
    case Method::cg: return "cg";
    case Method::split: return "split";
  }
  return "unknown";
}

double SplitSolution::entry(index_t i, index_t j) const {
  double v = XB(i, j);
  if (low_rank.rank() > 0) {
    const auto& R = low_rank.right_or_left();
    v += (low_rank.left.row(i).array() * low_rank.sig.transpose().array() * R.row(j).array()).sum();
  }
  return v;
}

std::vector<double> SplitSolution::apply(std::span<const double> v) const {
  auto y = matvec(XB, v);
  if (low_rank.rank() > 0) {
    const Eigen::Map<const Eigen::VectorXd> x(v.data(), static_cast<index_t>(v.size()));
    const Eigen::VectorXd c = low_rank.sig.cwiseProduct(low_rank.right_or_left().transpose() * x);
    const Eigen::VectorXd l = low_rank.left * c;
    for (std::size_t i = 0; i < y.size(); ++i) y[i] += l(static_cast<index_t>(i));
  }
  return y;
}

double SplitSolution::residual_norm(const RealBanded& A, const RealBanded& D) const {
  return residual_norm(A, A, D);
}

double SplitSolution::residual_norm(const RealBanded& A, const RealBanded& B, const RealBanded& D) const {
  RealBanded RB;
  if (XB.symmetric() && B.order() == A.order() && &A == &B && D.symmetric())
    RB = band_add(lyap_apply(A, XB), D, -1.0);
  else
    RB = band_add(sylv_apply(A, B, XB.as_general()), D.as_general(), -1.0);
  return lowrank_residual_norm(RB, A, B, low_rank);
}

MemoryReport SplitSolution::memory_report() const {
  MemoryReport m;
  const auto n = static_cast<std::size_t>(order());
  m.bytes_banded = XB.stored_entries() * sizeof(double);
  m.bytes_lowrank = static_cast<std::size_t>(low_rank.left.size() + low_rank.right.size()) * sizeof(double);
  m.bytes_dense = n * n * sizeof(double);
  return m;
}

Eigen::MatrixXd SplitSolution::dense() const {
  Eigen::MatrixXd X = to_dense(XB);
  if (low_rank.rank() > 0) X += low_rank.dense();
  return X;
}

SpectralInterval estimate_spectrum(const RealBanded& A, double tol, std::uint64_t seed) {
  const EigPair e = lanczos_extreme_eigs(A, tol, 300, seed);
  SpectralInterval s;
  s.lambda_min = e.lambda_min * (1.0 - tol);
  s.lambda_max = e.lambda_max * (1.0 + tol);
  s.beta_A = std::max<index_t>(A.bandwidth(), 1);
  return s;
}

Method method_select(double kappa, const SolverConfig& cfg) {
  return kappa <= cfg.kappa_threshold ? Method::cg : Method::split;
}

namespace {

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point t0) {
  return std::chrono::duration<double>(clock_type::now() - t0).count();
}

ExpOptions exp_options(const SolverConfig& cfg) {
  ExpOptions o;
  o.nu = cfg.nu_from_eps_quad ? nu_from_eps_quad(cfg.eps_quad) : cfg.nu;
  o.eps_B = cfg.eps_B;
  o.eps_quad = cfg.eps_quad;
  return o;
}

LowRankOptions lowrank_options(const SolverConfig& cfg) {
  LowRankOptions o;
  o.eps_res = cfg.eps_res;
  o.eps_it = cfg.eps_it.value_or(cfg.eps_quad);
  o.m_max = cfg.m_max;
  o.check_period = cfg.check_period;
  o.drop_tol = cfg.drop_tol;
  o.seed = cfg.seed;
  return o;
}

// When the band limit can never be reached (tiny spectral spread or beta_max
// beyond what the decay allows) the exponential factor alone fixes tau:
// 10 exp(-tau lambda_min) = eps_tau.
double choose_tau(const SpectralInterval& s, const SolverConfig& cfg) {
  if (cfg.tau) return *cfg.tau;
  try {
    return select_tau(s, cfg.beta_max, cfg.eps_tau).tau;
  } catch (const Error& e) {
    const bool unreachable = e.code() == ErrorCode::degenerate_interval ||
                             (e.code() == ErrorCode::no_admissible_tau && cfg.eps_tau < 10.0);
    if (!unreachable) throw;
    return std::log(10.0 / cfg.eps_tau) / s.lambda_min;
  }
}

SpectralInterval scaled(SpectralInterval s, double c) {
  s.lambda_min *= c;
  s.lambda_max *= c;
  return s;
}

void fill_from_cg(SplitSolution& sol, CgResult&& r) {
  sol.report.method = Method::cg;
  sol.report.iterations = r.report.iterations;
  sol.report.relres = r.report.final_relres;
  sol.report.converged = r.report.converged;
  sol.report.stop_reason = r.report.converged ? "converged" : "max_iterations";
  sol.report.beta_xb = r.report.beta_X;
  for (const auto& h : r.report.residual_history) sol.report.residual_history.emplace_back(h.iter, h.relres);
  sol.XB = std::move(r.X);
  sol.low_rank.left = Eigen::MatrixXd(sol.XB.order(), 0);
  sol.low_rank.sig = Eigen::VectorXd(0);
}

void fill_from_split(SplitSolution& sol, XbResult&& xb, LowRankResult&& lr) {
  sol.report.method = Method::split;
  sol.report.iterations = lr.report.iterations;
  sol.report.relres = lr.report.final_relres;
  sol.report.converged = lr.report.stop == StopReason::converged || lr.report.stop == StopReason::trivial;
  sol.report.stop_reason = to_string(lr.report.stop);
  sol.report.residual_history = lr.report.residual_history;
  sol.report.max_beta_exp = xb.max_beta_exp;
  sol.report.quadrature_evaluations = xb.stats.evaluations;
  sol.XB = std::move(xb.XB);
  sol.report.beta_xb = sol.XB.effective_bandwidth();
  sol.low_rank = std::move(lr.factor);
  sol.report.rank = sol.low_rank.rank();
}

}  // namespace

SplitSolution solve_lyapunov(const RealBanded& A, const RealBanded& D, const SolverConfig& cfg) {
  const auto t0 = clock_type::now();
  detail::require_same_order(A.order(), D.order());
  SplitSolution sol;
  Method method = cfg.method;
  std::optional<SpectralInterval> spec;
  if (method != Method::cg) {
    spec = estimate_spectrum(A, cfg.eig_tol);
    sol.report.lambda_min = spec->lambda_min;
    sol.report.lambda_max = spec->lambda_max;
    if (method == Method::automatic) method = method_select(spec->kappa(), cfg);
  }
  if (method == Method::cg) {
    CgOptions o;
    o.eps_res = cfg.eps_res;
    o.max_it = cfg.m_max;
    fill_from_cg(sol, lyap_cg(A, D, o));
  } else {
    const double s = 1.0 / spec->lambda_min;
    RealBanded As = A;
    As *= s;
    RealBanded Ds = as_symmetric(D);
    Ds *= s;
    const SpectralInterval ss = scaled(*spec, s);
    const double tau = choose_tau(ss, cfg);
    XbResult xb = compute_XB(As, ss, Ds, tau, exp_options(cfg));
    const CholFactor chol = banded_cholesky(As);
    LowRankResult lr = lowrank_iterate(As, chol, Ds, xb.XB, tau, lowrank_options(cfg));
    sol.scale_applied = s;
    sol.tau = tau;
    sol.report.tau = tau;
    fill_from_split(sol, std::move(xb), std::move(lr));
  }
  sol.report.seconds = seconds_since(t0);
  return sol;
}

SplitSolution solve_sylvester(const RealBanded& A, const RealBanded& B, const RealBanded& D, const SolverConfig& cfg) {
  const auto t0 = clock_type::now();
  detail::require_same_order(A.order(), D.order());
  detail::require_same_order(B.order(), D.order());
  SplitSolution sol;
  Method method = cfg.method;
  std::optional<SpectralInterval> specA, specB;
  if (method != Method::cg) {
    specA = estimate_spectrum(A, cfg.eig_tol);
    specB = estimate_spectrum(B, cfg.eig_tol);
    sol.report.lambda_min = std::min(specA->lambda_min, specB->lambda_min);
    sol.report.lambda_max = std::max(specA->lambda_max, specB->lambda_max);
    if (method == Method::automatic) method = method_select(std::max(specA->kappa(), specB->kappa()), cfg);
  }
  if (method == Method::cg) {
    CgOptions o;
    o.eps_res = cfg.eps_res;
    o.max_it = cfg.m_max;
    fill_from_cg(sol, sylv_cg(A, B, D, o));
  } else {
    // the coefficient with the widest band drives scaling and tau
    const SpectralInterval& wide = B.bandwidth() > A.bandwidth() ? *specB : *specA;
    const double s = 1.0 / wide.lambda_min;
    RealBanded As = A, Bs = B;
    As *= s;
    Bs *= s;
    RealBanded Ds = D.as_general();
    Ds *= s;
    const SpectralInterval sa = scaled(*specA, s), sb = scaled(*specB, s);
    const double tau = choose_tau(scaled(wide, s), cfg);
    XbResult xb = compute_XB_sylvester(As, sa, Bs, sb, Ds, tau, exp_options(cfg));
    const CholFactor ca = banded_cholesky(As);
    const CholFactor cb = banded_cholesky(Bs);
    LowRankResult lr = lowrank_iterate_sylvester(As, ca, Bs, cb, Ds, xb.XB, tau, lowrank_options(cfg));
    sol.scale_applied = s;
    sol.tau = tau;
    sol.report.tau = tau;
    fill_from_split(sol, std::move(xb), std::move(lr));
  }
  sol.report.seconds = seconds_since(t0);
  return sol;
}

}  // namespace lyapb
