#include "lyapb/cg_solver.hpp"

#include <cmath>

namespace lyapb {

RealBanded lyap_apply(const RealBanded& A, const RealBanded& X) { return symmetric_sum(band_matmul(A, X)); }

RealBanded sylv_apply(const RealBanded& A, const RealBanded& B, const RealBanded& X) {
  return band_add(band_matmul(A, X), band_matmul(X, B));
}

RealBanded as_symmetric(const RealBanded& X) {
  if (X.symmetric()) return X;
  if (X.structure() == Structure::lower)
    throw Error(ErrorCode::invalid_argument, "triangular storage is not symmetric");
  const double tol = 1e-14 * X.max_abs();
  RealBanded S(X.order(), X.bandwidth(), Structure::symmetric);
  for (index_t k = 0; k <= X.bandwidth(); ++k) {
    auto lo = X.diag(k);
    auto up = X.diag(-k);
    auto dst = S.diag(k);
    for (std::size_t p = 0; p < lo.size(); ++p) {
      if (std::abs(lo[p] - up[p]) > tol) throw Error(ErrorCode::invalid_argument, "matrix is not symmetric");
      dst[p] = 0.5 * (lo[p] + up[p]);
    }
  }
  return S;
}

namespace {

struct Problem {
  // residual of the current iterate: D - op(X)
  virtual RealBanded residual(const RealBanded& X) const = 0;
  virtual RealBanded apply(const RealBanded& P) const = 0;
  virtual ~Problem() = default;
};

CgResult run_cg(const Problem& prob, RealBanded X, const CgOptions& opts) {
  CgResult out;
  RealBanded R = prob.residual(X);
  double rr = frob_inner(R, R);
  const double r0 = std::sqrt(rr);
  if (r0 == 0.0) {
    out.report.converged = true;
    out.report.beta_X = X.effective_bandwidth();
    out.X = std::move(X);
    return out;
  }
  RealBanded P = R;
  int k = 0;
  double relres = 1.0;
  while (k < opts.max_it) {
    RealBanded W = prob.apply(P);
    const double pw = frob_inner(P, W);
    if (std::abs(pw) < 1e-300) throw Error(ErrorCode::breakdown, "<P,W> vanished at iteration " + std::to_string(k + 1));
    if (pw < 0.0) throw Error(ErrorCode::not_spd, "<P,W> <= 0: coefficient matrix is not positive definite");
    const double alpha = rr / pw;
    add_scaled(X, alpha, P);
    add_scaled(R, -alpha, W);
    ++k;
    double rr_new = frob_inner(R, R);
    if (opts.recompute_period > 0 && k % opts.recompute_period == 0) {
      R = prob.residual(X);
      rr_new = frob_inner(R, R);
    }
    relres = std::sqrt(rr_new) / r0;
    const bool done = relres < opts.eps_res;
    RealBanded Pn = done ? P : band_add(R, P, rr_new / rr);
    out.report.residual_history.push_back({k, relres, W.effective_bandwidth(), X.effective_bandwidth(),
                                           R.effective_bandwidth(), Pn.effective_bandwidth()});
    if (done) {
      out.report.converged = true;
      break;
    }
    P = std::move(Pn);
    rr = rr_new;
  }
  out.report.iterations = k;
  out.report.final_relres = relres;
  out.report.beta_X = X.effective_bandwidth();
  out.X = std::move(X);
  return out;
}

struct LyapProblem final : Problem {
  const RealBanded& A;
  const RealBanded& D;
  LyapProblem(const RealBanded& a, const RealBanded& d) : A(a), D(d) {}
  RealBanded residual(const RealBanded& X) const override { return band_add(D, lyap_apply(A, X), -1.0); }
  RealBanded apply(const RealBanded& P) const override { return lyap_apply(A, P); }
};

struct SylvProblem final : Problem {
  const RealBanded& A;
  const RealBanded& B;
  const RealBanded& D;
  SylvProblem(const RealBanded& a, const RealBanded& b, const RealBanded& d) : A(a), B(b), D(d) {}
  RealBanded residual(const RealBanded& X) const override { return band_add(D, sylv_apply(A, B, X), -1.0); }
  RealBanded apply(const RealBanded& P) const override { return sylv_apply(A, B, P); }
};

void check_inputs(const RealBanded& A, const RealBanded& D) {
  if (A.order() != D.order()) throw Error(ErrorCode::shape_mismatch, "A and D orders differ");
  if (!A.symmetric()) throw Error(ErrorCode::invalid_argument, "coefficient matrix must be stored symmetric");
}

}  // namespace

CgResult lyap_cg(const RealBanded& A, const RealBanded& D, const CgOptions& opts, std::optional<RealBanded> X0) {
  check_inputs(A, D);
  const RealBanded Ds = as_symmetric(D);
  RealBanded X = X0 ? as_symmetric(*X0) : RealBanded(A.order(), 0, Structure::symmetric);
  detail::require_same_order(X.order(), A.order());
  return run_cg(LyapProblem(A, Ds), std::move(X), opts);
}

CgResult sylv_cg(const RealBanded& A, const RealBanded& B, const RealBanded& D, const CgOptions& opts,
                 std::optional<RealBanded> X0) {
  check_inputs(A, D);
  check_inputs(B, D);
  const RealBanded Dg = D.as_general();
  RealBanded X = X0 ? X0->as_general() : RealBanded(A.order(), 0, Structure::general);
  detail::require_same_order(X.order(), A.order());
  return run_cg(SylvProblem(A, B, Dg), std::move(X), opts);
}

}  // namespace lyapb
