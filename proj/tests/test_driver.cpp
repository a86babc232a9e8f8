#include "doctest.h"
#include "helpers.hpp"

#include "lyapb/driver.hpp"
#include "lyapb/oracle.hpp"

using namespace lyapb;
using Eigen::MatrixXd;

TEST_CASE("method selection") {
  const SolverConfig cfg;
  CHECK(method_select(40.0, cfg) == Method::cg);
  CHECK(method_select(1.7e5, cfg) == Method::split);
  CHECK(method_select(1e4, cfg) == Method::cg);
  CHECK(parse_method("split") == Method::split);
  CHECK_THROWS_AS(parse_method("gmres"), Error);
}

TEST_CASE("identity equation on both paths") {
  RealBanded D = RealBanded::identity(30);
  D *= 2.0;
  for (Method m : {Method::cg, Method::split}) {
    SolverConfig cfg;
    cfg.method = m;
    const SplitSolution s = solve_lyapunov(RealBanded::identity(30), D, cfg);
    CHECK(s.residual_norm(RealBanded::identity(30), D) <= cfg.eps_res * frob_norm(D));
    CHECK(s.entry(4, 4) == doctest::Approx(1.0).epsilon(1e-3));
  }
}

TEST_CASE("splitting solve on an ill-conditioned operator") {
  const ProblemData p = gen_1d_operator(300, 4.0, 3);
  SolverConfig cfg;
  cfg.beta_max = 60;
  const SplitSolution s = solve_lyapunov(p.A, p.D, cfg);
  CHECK(s.report.method == Method::split);
  CHECK(s.report.lambda_max / s.report.lambda_min > 1e4);
  const double rel = s.residual_norm(p.A, p.D) / frob_norm(p.D);
  CHECK(rel == doctest::Approx(s.report.relres).epsilon(1e-8));
  if (s.report.converged) CHECK(rel <= cfg.eps_res);

  const MatrixXd X = s.dense();
  const MatrixXd Xref = dense_lyap_oracle(to_dense(p.A), to_dense(p.D));
  const double dense_rel = testutil::lyap_residual(to_dense(p.A), X, to_dense(p.D)).norm() / to_dense(p.D).norm();
  CHECK(dense_rel == doctest::Approx(rel).epsilon(1e-6));
  CHECK(testutil::rel_frob(X, Xref) < 0.05);

  std::vector<double> e(300, 0.0);
  e[17] = 1.0;
  const auto col = s.apply(e);
  for (index_t i = 0; i < 300; i += 13) CHECK(col[static_cast<std::size_t>(i)] == doctest::Approx(X(i, 17)).epsilon(1e-12));
  CHECK(s.entry(40, 17) == doctest::Approx(X(40, 17)).epsilon(1e-12));

  const MemoryReport mem = s.memory_report();
  CHECK(mem.bytes_dense == 300u * 300u * sizeof(double));
  CHECK(mem.total() == mem.bytes_banded + mem.bytes_lowrank);
}

TEST_CASE("scaling invariance") {
  const RealBanded A = random_spd_banded(80, 2, 0.01, 21);
  const RealBanded D = random_sym_banded(80, 1, 22);
  for (Method m : {Method::cg, Method::split}) {
    SolverConfig cfg;
    cfg.method = m;
    cfg.beta_max = 30;
    const MatrixXd X1 = solve_lyapunov(A, D, cfg).dense();
    // a power of two scales exactly; other factors may flip entries sitting
    // right at a truncation threshold
    for (double c : {8.0, 7.5}) {
      RealBanded cA = A, cD = D;
      cA *= c;
      cD *= c;
      const MatrixXd X2 = solve_lyapunov(cA, cD, cfg).dense();
      CHECK(testutil::rel_frob(X2, X1) <= (c == 8.0 ? 1e-12 : 1e-8));
    }
  }
}

TEST_CASE("two-sided driver reduces to the symmetric one") {
  const RealBanded A = random_spd_banded(70, 2, 0.02, 31);
  const RealBanded D = random_sym_banded(70, 2, 32);
  for (Method m : {Method::cg, Method::split}) {
    SolverConfig cfg;
    cfg.method = m;
    cfg.beta_max = 25;
    const MatrixXd Xl = solve_lyapunov(A, D, cfg).dense();
    const MatrixXd Xs = solve_sylvester(A, A, D, cfg).dense();
    CHECK((Xl - Xs).cwiseAbs().maxCoeff() <= 1e-10);
  }
}

TEST_CASE("two-sided driver on diagonal and random data") {
  RealBanded A(20, 0, Structure::symmetric), B(20, 0, Structure::symmetric);
  for (index_t i = 0; i < 20; ++i) {
    A.at(i, i) = 1.0 + i;
    B.at(i, i) = 2.0 + 0.5 * i;
  }
  const RealBanded D = testutil::random_general(20, 2, 41);
  SolverConfig cfg;
  cfg.eps_res = 1e-8;
  const SplitSolution s = solve_sylvester(A, B, D, cfg);
  for (index_t i = 0; i < 20; ++i)
    for (index_t j = std::max<index_t>(0, i - 2); j <= std::min<index_t>(19, i + 2); ++j)
      CHECK(s.entry(i, j) == doctest::Approx(D(i, j) / (A(i, i) + B(j, j))).epsilon(1e-6));

  const index_t n = 100;
  const RealBanded Ar = random_spd_banded(n, 2, 0.002, 42), Br = random_spd_banded(n, 1, 0.003, 43);
  const RealBanded Dr = testutil::random_general(n, 1, 44);
  SolverConfig sc;
  sc.method = Method::split;
  sc.beta_max = 30;
  const SplitSolution r = solve_sylvester(Ar, Br, Dr, sc);
  const MatrixXd Xref = dense_sylvester_oracle(to_dense(Ar), to_dense(Br), to_dense(Dr));
  CHECK(r.residual_norm(Ar, Br, Dr) / frob_norm(Dr) <= 1e-3);
  CHECK(testutil::rel_frob(r.dense(), Xref) <= 1e-2);
}
