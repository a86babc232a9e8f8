#include "doctest.h"
#include "helpers.hpp"

#include "lyapb/oracle.hpp"

using namespace lyapb;
using testutil::tridiag;

namespace {

Eigen::MatrixXcd ldlt_product(const LdltFactor& F) {
  const Eigen::MatrixXcd L = to_dense(F.L);
  Eigen::VectorXcd d(static_cast<index_t>(F.d.size()));
  for (std::size_t i = 0; i < F.d.size(); ++i) d(static_cast<index_t>(i)) = F.d[i];
  return L * d.asDiagonal() * L.transpose();
}

}  // namespace

TEST_CASE("banded cholesky") {
  RealBanded A = RealBanded::identity(5);
  A *= 4.0;
  const CholFactor F0 = banded_cholesky(A);
  std::vector<double> e1(5, 0.0);
  e1[0] = 1.0;
  const auto x0 = chol_solve(F0, e1);
  CHECK(x0[0] == doctest::Approx(0.25));
  CHECK(x0[1] == 0.0);

  const RealBanded T = tridiag(50, -1.0, 2.0);
  const CholFactor F = banded_cholesky(T);
  CHECK(F.L.bandwidth() == 1);
  const Eigen::MatrixXd L = to_dense(F.L);
  CHECK((L * L.transpose() - to_dense(T)).norm() / to_dense(T).norm() <= 1e-12);

  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  std::vector<double> b(50);
  for (double& v : b) v = g(rng);
  const auto x = chol_solve(F, b);
  const auto Ax = matvec(T, std::span<const double>(x));
  double r = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < b.size(); ++i) {
    r += (Ax[i] - b[i]) * (Ax[i] - b[i]);
    nb += b[i] * b[i];
  }
  CHECK(std::sqrt(r / nb) <= 1e-12);

  CHECK_THROWS_AS(banded_cholesky(tridiag(5, -1.0, 1.0)), Error);
}

TEST_CASE("complex ldlt") {
  ComplexBanded M(6, 0, Structure::symmetric);
  for (cplx& v : M.diag(0)) v = cplx(2.0, 1.0);
  const LdltFactor F = complex_ldlt(M);
  for (const cplx& d : F.d) CHECK(std::abs(d - cplx(2.0, 1.0)) == 0.0);
  CHECK(std::abs(F.L(3, 3) - cplx(1.0)) == 0.0);

  ComplexBanded S = to_complex(tridiag(40, -1.0, 2.0));
  for (cplx& v : S.diag(0)) v -= cplx(-1.0, 2.0);
  const LdltFactor G = complex_ldlt(S);
  CHECK(G.L.bandwidth() == 1);
  CHECK((ldlt_product(G) - to_dense(S)).norm() / to_dense(S).norm() <= 1e-12);

  // a real SPD input reproduces the Cholesky factor up to the pivot scaling
  const RealBanded T = tridiag(20, -1.0, 3.0);
  const LdltFactor H = complex_ldlt(to_complex(T));
  const CholFactor C = banded_cholesky(T);
  for (index_t i = 0; i < 20; ++i) {
    CHECK(H.d[static_cast<std::size_t>(i)].real() > 0.0);
    const double lii = C.L(i, i);
    CHECK(H.d[static_cast<std::size_t>(i)].real() == doctest::Approx(lii * lii));
    if (i > 0) CHECK(H.L(i, i - 1).real() == doctest::Approx(C.L(i, i - 1) / C.L(i - 1, i - 1)));
  }

  ComplexBanded Z(3, 0, Structure::symmetric);
  Z.diag(0)[0] = 1.0;
  CHECK_THROWS_AS(complex_ldlt(Z), Error);
}

TEST_CASE("partial inverse column") {
  ComplexBanded M(8, 0, Structure::symmetric);
  for (cplx& v : M.diag(0)) v = 2.0;
  const auto c = partial_inverse_column(complex_ldlt(M), 3, 5);
  REQUIRE(c.size() == 3u);
  CHECK(std::abs(c[0] - 0.5) < 1e-15);
  CHECK(std::abs(c[1]) == 0.0);
  CHECK(std::abs(c[2]) == 0.0);

  const index_t n = 50;
  ComplexBanded S = to_complex(tridiag(n, -1.0, 2.0));
  for (cplx& v : S.diag(0)) v -= cplx(-0.5, 1.5);
  const LdltFactor F = complex_ldlt(S);
  const Eigen::MatrixXcd inv = to_dense(S).inverse();
  for (index_t q : {0, 7, 31, 49}) {
    const auto col = partial_inverse_column(F, q, n - 1);
    double err = 0.0;
    for (index_t r = q; r < n; ++r) err = std::max(err, std::abs(col[static_cast<std::size_t>(r - q)] - inv(r, q)));
    CHECK(err <= 1e-12);
  }
  // truncating the sweeps perturbs the kept entries by roughly the size of the dropped tail
  for (index_t len : {10, 20}) {
    const auto part = partial_inverse_column(F, 10, 10 + len);
    double err = 0.0;
    for (index_t r = 10; r <= 10 + len; ++r)
      err = std::max(err, std::abs(part[static_cast<std::size_t>(r - 10)] - inv(r, 10)));
    double tail = 0.0;
    for (index_t r = 11 + len; r < n; ++r) tail = std::max(tail, std::abs(inv(r, 10)));
    CHECK(err > 0.0);
    CHECK(err <= 10.0 * tail);
  }
  CHECK_THROWS_AS(partial_inverse_column(F, 5, 4), Error);
}

TEST_CASE("lanczos extreme eigenvalues") {
  const EigPair id = lanczos_extreme_eigs(RealBanded::identity(30));
  CHECK(id.lambda_min == doctest::Approx(1.0));
  CHECK(id.lambda_max == doctest::Approx(1.0));

  const index_t n = 200;
  const EigPair e = lanczos_extreme_eigs(tridiag(n, -1.0, 2.0), 1e-10, 300);
  const double lmin = 2.0 - 2.0 * std::cos(M_PI / (n + 1.0));
  const double lmax = 2.0 - 2.0 * std::cos(n * M_PI / (n + 1.0));
  CHECK(std::abs(e.lambda_min - lmin) / lmin <= 1e-6);
  CHECK(std::abs(e.lambda_max - lmax) / lmax <= 1e-6);

  for (index_t blocks : {5, 40, 170}) {
    const ProblemData p = gen_kron_example(blocks);
    const EigPair k = lanczos_extreme_eigs(p.A);
    CHECK(k.lambda_max / k.lambda_min <= 40.0);
  }
}

TEST_CASE("dense symmetric eigensolver") {
  Eigen::MatrixXd M(2, 2);
  M << 3, 0, 0, 1;
  SymEig e = sym_eig_dense(M);
  CHECK(e.values(0) == doctest::Approx(1.0));
  CHECK(e.values(1) == doctest::Approx(3.0));
  CHECK(std::abs(e.vectors(1, 0)) == doctest::Approx(1.0));

  M << 2, 1, 1, 2;
  e = sym_eig_dense(M);
  CHECK(e.values(0) == doctest::Approx(1.0));
  CHECK(e.values(1) == doctest::Approx(3.0));

  Eigen::MatrixXd R = Eigen::MatrixXd::Random(50, 50);
  R = (R + R.transpose()).eval();
  e = sym_eig_dense(R);
  CHECK((R * e.vectors - e.vectors * e.values.asDiagonal()).norm() <= 1e-12 * 50 * R.norm());
  CHECK((e.vectors.transpose() * e.vectors - Eigen::MatrixXd::Identity(50, 50)).norm() <= 1e-12);
  for (index_t i = 1; i < 50; ++i) CHECK(e.values(i - 1) <= e.values(i));
}
