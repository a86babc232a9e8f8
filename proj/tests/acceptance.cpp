// One PASS/FAIL line per acceptance criterion. Exit status is the number of failures.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>

#include "lyapb/cg_solver.hpp"
#include "lyapb/decay_bounds.hpp"
#include "lyapb/driver.hpp"
#include "lyapb/exp_banded.hpp"
#include "lyapb/factor.hpp"
#include "lyapb/lowrank.hpp"
#include "lyapb/oracle.hpp"

using namespace lyapb;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

using clock_type = std::chrono::steady_clock;

double seconds_since(clock_type::time_point t0) {
  return std::chrono::duration<double>(clock_type::now() - t0).count();
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(int id, const std::string& title, const std::function<Outcome()>& body) {
  Outcome o;
  const auto t0 = clock_type::now();
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  if (!o.pass) ++failures;
  std::printf("%s criterion %d: %s (%s) [%.1f s]\n", o.pass ? "PASS" : "FAIL", id, title.c_str(), o.detail.c_str(),
              seconds_since(t0));
  std::fflush(stdout);
}

template <typename... Args>
std::string fmt(const char* f, Args... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

SpectralInterval exact_spec(const RealBanded& A) {
  const SymEig e = sym_eig_dense(to_dense(A));
  return {e.values(0), e.values(e.values.size() - 1), std::max<index_t>(A.bandwidth(), 1)};
}

RealBanded scaled_laplacian(index_t n) {
  RealBanded L(n, 1, Structure::symmetric);
  for (double& v : L.diag(0)) v = 2.0;
  for (double& v : L.diag(1)) v = -1.0;
  L *= 1.0 / (2.0 - 2.0 * std::cos(M_PI / static_cast<double>(n + 1)));
  return L;
}

MatrixXd lyap_res(const MatrixXd& A, const MatrixXd& X, const MatrixXd& D) { return A * X + X * A - D; }

Outcome kron_cg() {
  const ProblemData p = gen_kron_example(170);
  CgOptions o;
  o.eps_res = 1e-6;
  const auto t0 = clock_type::now();
  const CgResult r = lyap_cg(p.A, p.D, o);
  const double secs = seconds_since(t0);
  const bool ok = r.report.converged && r.report.iterations <= 46 && r.report.beta_X <= 275 &&
                  r.report.final_relres <= 1.2e-6 && secs < 60.0;
  return {ok, fmt("n=%td its=%d beta_X=%td relres=%.3g time=%.2fs", p.n, r.report.iterations, r.report.beta_X,
                  r.report.final_relres, secs)};
}

Outcome iteration_prediction() {
  const int k = predicted_cg_iterations(40.0, 1e-6);
  return {k == 45, fmt("predicted=%d, expected 45", k)};
}

Outcome bandwidth_law() {
  std::mt19937_64 rng(2024);
  int violations = 0, checked = 0;
  for (int inst = 0; inst < 20; ++inst) {
    const index_t n = std::uniform_int_distribution<index_t>(60, 300)(rng);
    const index_t ba = std::uniform_int_distribution<index_t>(1, 4)(rng);
    const index_t bd = std::uniform_int_distribution<index_t>(0, 5)(rng);
    const RealBanded A = random_spd_banded(n, ba, 0.05 + 0.5 * (inst % 3), 100 + inst);
    const RealBanded D = random_sym_banded(n, bd, 200 + inst);
    CgOptions o;
    o.eps_res = 1e-8;
    o.max_it = 300;
    const CgResult r = lyap_cg(A, D, o);
    for (const CgIterate& it : r.report.residual_history) {
      const index_t k = it.iter;
      ++checked;
      if (it.beta_W > k * ba + bd) ++violations;
      if (it.beta_X > (k - 1) * ba + bd) ++violations;
      if (it.beta_R > k * ba + bd) ++violations;
      if (it.beta_P > k * ba + bd) ++violations;
    }
  }
  return {violations == 0, fmt("%d iterations checked, %d violations", checked, violations)};
}

Outcome oracle_equivalence() {
  std::mt19937_64 rng(77);
  int bad = 0;
  double worst_rel = 0.0, worst_agree = 0.0, worst_err = 0.0;
  for (int inst = 0; inst < 20; ++inst) {
    const index_t n = std::uniform_int_distribution<index_t>(80, 200)(rng);
    const index_t ba = std::uniform_int_distribution<index_t>(1, 3)(rng);
    const RealBanded A = random_spd_banded(n, ba, inst % 2 ? 1e-3 : 0.05, 300 + inst);
    const RealBanded D = random_sym_banded(n, inst % 3, 400 + inst);
    const MatrixXd Ad = to_dense(A), Dd = to_dense(D);
    const MatrixXd Xref = dense_lyap_oracle(Ad, Dd);
    for (Method m : {Method::cg, Method::split}) {
      SolverConfig cfg;
      cfg.method = m;
      cfg.eps_res = m == Method::cg ? 1e-5 : 1e-3;
      const SplitSolution s = solve_lyapunov(A, D, cfg);
      const double ops = s.residual_norm(A, D) / Dd.norm();
      const double dense = lyap_res(Ad, s.dense(), Dd).norm() / Dd.norm();
      const double agree = std::abs(ops - dense);
      worst_rel = std::max(worst_rel, ops);
      worst_agree = std::max(worst_agree, agree);
      worst_err = std::max(worst_err, (s.dense() - Xref).norm() / Xref.norm());
      if (ops > cfg.eps_res || agree > 1e-8) ++bad;
    }
  }
  return {bad == 0, fmt("40 solves, %d failing; max relres=%.3g, max |ops-dense|=%.2g, max rel error to oracle=%.3g", bad,
                        worst_rel, worst_agree, worst_err)};
}

Outcome decay_validity() {
  std::mt19937_64 rng(5);
  long samples = 0, miss21 = 0, miss22 = 0;
  for (int inst = 0; inst < 10; ++inst) {
    ProblemData p;
    if (inst < 3) {
      p = gen_kron_example(10 + 5 * inst);
    } else {
      const index_t n = std::uniform_int_distribution<index_t>(60, 200)(rng);
      p.A = random_spd_banded(n, 1 + inst % 3, 0.2, 500 + inst);
      p.D = random_sym_banded(n, inst % 4, 600 + inst);
      p.n = n;
    }
    const SpectralInterval spec = exact_spec(p.A);
    const MatrixXd X = dense_lyap_oracle(to_dense(p.A), to_dense(p.D));
    const double floor = 1e-14 * X.cwiseAbs().maxCoeff();
    KronBound kb(spec);
    std::uniform_int_distribution<index_t> pick(0, p.n - 1);
    for (int s = 0; s < 1000; ++s) {
      const index_t i = pick(rng), j = pick(rng);
      const double x = std::abs(X(i, j)) - floor;
      ++samples;
      if (haber_solution_bound(spec, p.D, i, j) < x) ++miss21;
      if (kb(p.D, i, j) < x) ++miss22;
    }
  }
  const double ok21 = 1.0 - static_cast<double>(miss21) / samples;
  const double ok22 = 1.0 - static_cast<double>(miss22) / samples;

  const ProblemData k = gen_kron_example(170);
  const EigPair e = lanczos_extreme_eigs(k.A, 1e-8);
  const SpectralInterval ks{e.lambda_min, e.lambda_max, k.A.bandwidth()};
  const index_t j = k.n / 2;
  KronBound kb(ks);
  const double r22 = kb(k.D, j, j) / kb(k.D, 0, j);
  const double r22b = kb(k.D, j, j) / kb(k.D, k.n - 1, j);
  const double h_first = haber_solution_bound(ks, k.D, 0, j), h_mid = haber_solution_bound(ks, k.D, j, j);
  const double r21 = h_mid / h_first;
  const bool ok = ok21 >= 0.99 && ok22 >= 0.99 && std::min(r22, r22b) >= 1e3 && r21 < 10.0;
  return {ok, fmt("bounded fraction thm21=%.4f thm22=%.4f over %ld samples; kron column %td: "
                  "envelope ratio thm22=%.3g, thm21=%.3g",
                  ok21, ok22, samples, j + 1, std::min(r22, r22b), r21)};
}

Outcome tau_reproduction() {
  const RealBanded A = scaled_laplacian(200);
  const SpectralInterval spec = exact_spec(A);
  const TauChoice c = select_tau(spec, 50, 1e-5);
  const double f0 = tau_profile(spec, c.tau, c.xi_bar), f1 = tau_profile(spec, c.tau, c.xi_bar + 1),
               f2 = tau_profile(spec, c.tau, c.xi_bar + 2);
  auto near = [](double v, double ref) { return std::abs(v - ref) <= 0.02 * ref; };
  return {near(f0, 1.74e-5) && near(f1, 1.00e-5) && near(f2, 5.66e-6),
          fmt("tau=%.6g xi_bar=%td f=(%.4g, %.4g, %.4g)", c.tau, c.xi_bar, f0, f1, f2)};
}

Outcome rational_accuracy() {
  bool ok = true;
  std::ostringstream d;
  for (int nu : {4, 6, 8}) {
    const RationalChebTable& t = cheb_table(nu);
    double err = 0.0;
    for (int k = 0; k < 1000; ++k) {
      const double x = 100.0 * k / 999.0;
      err = std::max(err, std::abs(std::exp(-x) - t(x)));
    }
    ok = ok && err >= std::pow(10.0, -nu - 1) && err <= std::pow(10.0, -nu + 1);
    d << "nu=" << nu << ":" << err << " ";
  }
  return {ok, d.str()};
}

Outcome resolvent_contract() {
  const index_t n = 200;
  const RealBanded A = scaled_laplacian(n);
  const SpectralInterval spec = exact_spec(A);
  const double tau = select_tau(spec, 50, 1e-5).tau;
  const MatrixXd Ad = to_dense(A);
  const RationalChebTable& t6 = cheb_table(6);
  int violations = 0, checks = 0;
  double worst = 0.0;
  for (double x : {-std::sqrt(2.0 / 3.0), -1.0 / std::sqrt(5.0), 0.0, 1.0 / std::sqrt(5.0), std::sqrt(2.0 / 3.0)}) {
    const double t = 0.5 * tau * (1.0 + x);
    for (const cplx& xi : t6.poles) {
      Eigen::MatrixXcd M = Ad.cast<cplx>() * t;
      M.diagonal().array() -= xi;
      const Eigen::MatrixXcd inv = M.inverse();
      const double err = (to_dense(banded_resolvent(A, spec, t, xi, 1e-5)) - inv).cwiseAbs().maxCoeff();
      worst = std::max(worst, err);
      ++checks;
      if (!(err < 1e-5)) ++violations;
    }
  }
  return {violations == 0, fmt("%d (time, pole) pairs, %d violations, max error %.3g", checks, violations, worst)};
}

Outcome cheap_residual_equivalence() {
  std::mt19937_64 rng(9);
  double worst = 0.0;
  int weak = 0;
  for (int inst = 0; inst < 20; ++inst) {
    const index_t n = std::uniform_int_distribution<index_t>(40, 100)(rng);
    RealBanded A = random_spd_banded(n, 1 + inst % 3, 0.01, 700 + inst);
    const RealBanded D = random_sym_banded(n, inst % 3, 800 + inst);
    const SpectralInterval spec = exact_spec(A);
    A *= 1.0 / spec.lambda_min;
    const SpectralInterval ss{1.0, spec.kappa(), spec.beta_A};
    const double tau = 0.05 + 0.05 * (inst % 4);
    const XbResult xb = compute_XB(A, ss, D, tau);
    const RealBanded RB = band_add(lyap_apply(A, xb.XB), D, -1.0);
    const CholFactor chol = banded_cholesky(A);
    KrylovState st(A, chol, D, RB, random_unit_vector(n, 900 + inst));
    const index_t m = 8 + inst % 5;
    for (index_t k = 0; k < m; ++k) st.expand();
    const ArnoldiG g = arnoldi_G(st, m);
    const AssembledFactor af = assemble_S(st.V(m), projected_solve(st.K(m), st.Dm(m)), tau);
    if (af.factor.rank() < 3 || frob_norm(xb.XB) == 0.0) ++weak;
    const CheapResidual c = cheap_residual(frob_norm(RB), g, af.Delta, af.factor.sig, st.W_RB_W(m, g.vhat));
    const double dense = lyap_res(to_dense(A), to_dense(xb.XB) + af.factor.dense(), to_dense(D)).norm();
    worst = std::max(worst, std::abs(c.value - dense) / dense);
  }
  return {worst <= 1e-8 && weak == 0, fmt("max relative gap %.3g over 20 instances (%d without s>=3 or X_B)", worst, weak)};
}

Outcome splitting_identity() {
  double worst = 0.0;
  for (int inst = 0; inst < 10; ++inst) {
    const index_t n = 50 + 5 * inst;
    const MatrixXd A = to_dense(random_spd_banded(n, 1 + inst % 3, 0.1, 1000 + inst));
    const MatrixXd D = to_dense(random_sym_banded(n, inst % 4, 1100 + inst));
    const MatrixXd X = dense_lyap_oracle(A, D);
    for (double tau : {0.1, 1.0, 10.0}) {
      const MatrixXd E = dense_expm_sym(A, tau);
      worst = std::max(worst, (dense_finite_horizon_oracle(A, D, tau) + E * X * E - X).norm() / X.norm());
    }
  }
  return {worst <= 1e-10, fmt("max relative deviation %.3g", worst)};
}

Outcome lowrank_bound() {
  bool ok = true;
  std::ostringstream d;
  for (int inst = 0; inst < 5; ++inst) {
    const index_t n = 60 + 10 * inst;
    const MatrixXd A = to_dense(random_spd_banded(n, 1 + inst % 2, 0.05, 1200 + inst));
    const MatrixXd D = to_dense(random_sym_banded(n, 1, 1300 + inst));
    const SymEig e = sym_eig_dense(A);  // ascending: values(0) is the smallest
    const double tau = 0.5;
    const MatrixXd E = dense_expm_sym(A, tau);
    const MatrixXd T = E * dense_lyap_oracle(A, D) * E;
    const Eigen::JacobiSVD<MatrixXd> svd(T);
    for (index_t l : {1, 5, 10}) {
      const double best = svd.singularValues()(l);
      const double bound = std::sqrt(3.0) / (2.0 * e.values(0)) * std::exp(-tau * (e.values(0) + e.values(l))) * D.norm();
      if (bound < best) {
        ok = false;
        d << "n=" << n << " l=" << l << " bound " << bound << " < " << best << "; ";
      }
    }
  }
  if (ok) d << "bound held for l in {1,5,10} on 5 instances";
  return {ok, d.str()};
}

struct LargeRun {
  SplitSolution sol;
  double relres = 0.0;
  double mem_fraction = 0.0;
  double kappa = 0.0;
};

LargeRun large_run(const ProblemData& p, const SolverConfig& cfg) {
  LargeRun r;
  r.sol = solve_lyapunov(p.A, p.D, cfg);
  r.relres = r.sol.residual_norm(p.A, p.D) / frob_norm(p.D);
  const MemoryReport m = r.sol.memory_report();
  r.mem_fraction = static_cast<double>(m.total()) / static_cast<double>(m.bytes_dense);
  r.kappa = r.sol.report.lambda_max / r.sol.report.lambda_min;
  return r;
}

Outcome sylvester_reduction() {
  double worst = 0.0;
  for (int inst = 0; inst < 3; ++inst) {
    const index_t n = 60 + 20 * inst;
    const RealBanded A = random_spd_banded(n, 1 + inst, 0.01, 1400 + inst);
    const RealBanded D = random_sym_banded(n, inst, 1500 + inst);
    for (Method m : {Method::cg, Method::split}) {
      SolverConfig cfg;
      cfg.method = m;
      const MatrixXd Xl = solve_lyapunov(A, D, cfg).dense();
      const MatrixXd Xs = solve_sylvester(A, A, D, cfg).dense();
      worst = std::max(worst, (Xl - Xs).cwiseAbs().maxCoeff());
    }
  }
  return {worst <= 1e-10, fmt("max elementwise difference %.3g over 6 solves", worst)};
}

double seconds_per_iteration(index_t blocks, int its) {
  const ProblemData p = gen_kron_example(blocks);
  CgOptions o;
  o.eps_res = 1e-300;
  o.max_it = its;
  double best = 1e300;
  for (int rep = 0; rep < 3; ++rep) {
    const auto t0 = clock_type::now();
    const CgResult r = lyap_cg(p.A, p.D, o);
    best = std::min(best, seconds_since(t0) / r.report.iterations);
  }
  return best;
}

Outcome linear_scaling() {
  const double t1 = seconds_per_iteration(500, 30);
  const double t2 = seconds_per_iteration(1000, 30);
  const double ratio = t2 / t1;
  return {ratio >= 1.5 && ratio <= 3.0, fmt("n=3000: %.4g s/it, n=6000: %.4g s/it, ratio %.3g", t1, t2, ratio)};
}

}  // namespace

int main() {
  report(1, "kron example CG", kron_cg);
  report(2, "iteration prediction", iteration_prediction);
  report(3, "bandwidth law", bandwidth_law);
  report(4, "oracle equivalence", oracle_equivalence);
  report(5, "decay bounds validity", decay_validity);
  report(6, "tau selection", tau_reproduction);
  report(7, "rational exponential accuracy", rational_accuracy);
  report(8, "resolvent truncation contract", resolvent_contract);
  report(9, "cheap residual equivalence", cheap_residual_equivalence);
  report(10, "splitting identity", splitting_identity);
  report(11, "low-rank error bound", lowrank_bound);

  const ProblemData big = gen_1d_operator(2000, 20.0, 1);
  SolverConfig cfg;
  cfg.method = Method::split;
  LargeRun base;
  bool have_base = false;
  report(12, "ill-conditioned end-to-end solve", [&]() -> Outcome {
    base = large_run(big, cfg);
    have_base = true;
    const double secs = base.sol.report.seconds;
    const bool ok = base.kappa >= 5e4 && base.kappa <= 2e5 && base.relres <= 1e-3 && secs < 600.0 &&
                    base.mem_fraction < 0.25;
    return {ok, fmt("n=2000 kappa=%.3g tau=%.4g beta_XB=%td rank=%td relres=%.3g stop=%s time=%.1fs memory=%.1f%% of dense",
                    base.kappa, base.sol.tau, base.sol.report.beta_xb, base.sol.report.rank, base.relres,
                    base.sol.report.stop_reason.c_str(), secs, 100.0 * base.mem_fraction)};
  });
  report(13, "tau sensitivity", [&]() -> Outcome {
    if (!have_base) return {false, "criterion 12 run unavailable"};
    SolverConfig lo = cfg, hi = cfg;
    lo.tau = base.sol.tau / 10.0;
    hi.tau = base.sol.tau * 10.0;
    const LargeRun a = large_run(big, lo), b = large_run(big, hi);
    const bool ok = a.sol.report.rank > base.sol.report.rank && b.sol.report.beta_xb > base.sol.report.beta_xb;
    return {ok, fmt("rank tau/10=%td vs %td; beta_XB 10tau=%td vs %td (relres %.3g, %.3g)", a.sol.report.rank,
                    base.sol.report.rank, b.sol.report.beta_xb, base.sol.report.beta_xb, a.relres, b.relres)};
  });
  report(14, "Sylvester reduction", sylvester_reduction);
  report(15, "linear scaling", linear_scaling);

  std::printf("%d of 15 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
