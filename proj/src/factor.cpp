#include "lyapb/factor.hpp"

#include <cmath>
#include <functional>
#include <random>

namespace lyapb {

namespace {

// Entry (i,k), i >= k, of a lower banded factor; caller guarantees i-k <= beta.
template <typename T>
inline T& low(BandedMatrix<T>& L, index_t i, index_t k) {
  return L.diag(i - k)[static_cast<std::size_t>(k)];
}
template <typename T>
inline const T& low(const BandedMatrix<T>& L, index_t i, index_t k) {
  return L.diag(i - k)[static_cast<std::size_t>(k)];
}

}  // namespace

CholFactor banded_cholesky(const RealBanded& A) {
  const index_t n = A.order();
  const index_t b = A.bandwidth();
  CholFactor F{RealBanded(n, b, Structure::lower)};
  RealBanded& L = F.L;
  for (index_t j = 0; j < n; ++j) {
    double djj = A(j, j);
    for (index_t k = std::max<index_t>(0, j - b); k < j; ++k) djj -= low(L, j, k) * low(L, j, k);
    if (!(djj > 0.0)) throw Error(ErrorCode::not_spd, "non-positive pivot at row " + std::to_string(j));
    const double ljj = std::sqrt(djj);
    low(L, j, j) = ljj;
    for (index_t i = j + 1; i <= std::min(n - 1, j + b); ++i) {
      double s = A(i, j);
      for (index_t k = std::max<index_t>(0, i - b); k < j; ++k) s -= low(L, i, k) * low(L, j, k);
      low(L, i, j) = s / ljj;
    }
  }
  return F;
}

std::vector<double> chol_solve(const CholFactor& F, std::span<const double> b) {
  const RealBanded& L = F.L;
  const index_t n = L.order();
  const index_t bw = L.bandwidth();
  if (static_cast<index_t>(b.size()) != n) throw Error(ErrorCode::shape_mismatch, "rhs length");
  std::vector<double> x(b.begin(), b.end());
  for (index_t i = 0; i < n; ++i) {
    double s = x[static_cast<std::size_t>(i)];
    for (index_t k = std::max<index_t>(0, i - bw); k < i; ++k) s -= low(L, i, k) * x[static_cast<std::size_t>(k)];
    x[static_cast<std::size_t>(i)] = s / low(L, i, i);
  }
  for (index_t i = n - 1; i >= 0; --i) {
    double s = x[static_cast<std::size_t>(i)];
    for (index_t r = i + 1; r <= std::min(n - 1, i + bw); ++r) s -= low(L, r, i) * x[static_cast<std::size_t>(r)];
    x[static_cast<std::size_t>(i)] = s / low(L, i, i);
  }
  return x;
}

LdltFactor complex_ldlt(const ComplexBanded& M) {
  const index_t n = M.order();
  const index_t b = M.bandwidth();
  LdltFactor F{ComplexBanded(n, b, Structure::lower), std::vector<cplx>(static_cast<std::size_t>(n))};
  ComplexBanded& L = F.L;
  auto& d = F.d;
  const double guard = 1e-14 * M.max_abs();
  std::vector<cplx> ld(static_cast<std::size_t>(b + 1));  // L(j,k) d(k) over the window
  for (index_t j = 0; j < n; ++j) {
    const index_t k0 = std::max<index_t>(0, j - b);
    cplx dj = M(j, j);
    for (index_t k = k0; k < j; ++k) {
      ld[static_cast<std::size_t>(k - k0)] = low(L, j, k) * d[static_cast<std::size_t>(k)];
      dj -= ld[static_cast<std::size_t>(k - k0)] * low(L, j, k);
    }
    if (std::abs(dj) <= guard || std::abs(dj) == 0.0)
      throw Error(ErrorCode::singular_pivot, "pivot " + std::to_string(j) + " has modulus " + std::to_string(std::abs(dj)));
    d[static_cast<std::size_t>(j)] = dj;
    low(L, j, j) = 1.0;
    for (index_t i = j + 1; i <= std::min(n - 1, j + b); ++i) {
      cplx s = M(i, j);
      for (index_t k = std::max<index_t>(k0, i - b); k < j; ++k) s -= low(L, i, k) * ld[static_cast<std::size_t>(k - k0)];
      low(L, i, j) = s / dj;
    }
  }
  return F;
}

std::vector<cplx> partial_inverse_column(const LdltFactor& F, index_t q, index_t p_hat) {
  const ComplexBanded& L = F.L;
  const index_t n = L.order();
  const index_t b = L.bandwidth();
  if (q < 0 || p_hat < q || p_hat >= n) throw Error(ErrorCode::index_out_of_range, "partial inverse range");
  const auto len = static_cast<std::size_t>(p_hat - q + 1);
  std::vector<cplx> s(len, cplx(0.0));
  // forward: L y = e_q on rows q..p_hat
  s[0] = 1.0;
  for (index_t r = q + 1; r <= p_hat; ++r) {
    cplx acc = 0.0;
    for (index_t k = std::max(q, r - b); k < r; ++k) acc -= low(L, r, k) * s[static_cast<std::size_t>(k - q)];
    s[static_cast<std::size_t>(r - q)] = acc;
  }
  for (index_t r = q; r <= p_hat; ++r) s[static_cast<std::size_t>(r - q)] /= F.d[static_cast<std::size_t>(r)];
  // backward: L^T s = z restricted to rows q..p_hat
  for (index_t r = p_hat; r >= q; --r) {
    cplx acc = s[static_cast<std::size_t>(r - q)];
    for (index_t k = r + 1; k <= std::min(p_hat, r + b); ++k) acc -= low(L, k, r) * s[static_cast<std::size_t>(k - q)];
    s[static_cast<std::size_t>(r - q)] = acc;
  }
  return s;
}

namespace {

struct LanczosTop {
  double theta = 0.0;
  bool converged = false;
  int steps = 0;
};

// Largest eigenvalue of the symmetric operator op by Lanczos with full reorthogonalization.
LanczosTop lanczos_top(index_t n, const std::function<std::vector<double>(const std::vector<double>&)>& op,
                       double tol, int maxit, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  Eigen::MatrixXd Q(n, std::min<index_t>(maxit, n) + 1);
  Eigen::VectorXd v(n);
  for (index_t i = 0; i < n; ++i) v(i) = nd(rng);
  v.normalize();
  Q.col(0) = v;
  std::vector<double> alpha, beta;
  LanczosTop out;
  const index_t kmax = std::min<index_t>(maxit, n);
  for (index_t k = 0; k < kmax; ++k) {
    std::vector<double> qk(Q.col(k).data(), Q.col(k).data() + n);
    auto wv = op(qk);
    Eigen::VectorXd w = Eigen::Map<Eigen::VectorXd>(wv.data(), n);
    const double a = Q.col(k).dot(w);
    alpha.push_back(a);
    for (int pass = 0; pass < 2; ++pass) {
      Eigen::VectorXd h = Q.leftCols(k + 1).transpose() * w;
      w -= Q.leftCols(k + 1) * h;
    }
    const double bnext = w.norm();
    const auto m = static_cast<index_t>(alpha.size());
    const bool check = m <= 12 || m % 4 == 0 || m == kmax || bnext < 1e-12 * std::abs(a);
    if (check) {
      Eigen::VectorXd dg = Eigen::Map<Eigen::VectorXd>(alpha.data(), m);
      Eigen::VectorXd sd(std::max<index_t>(m - 1, 0));
      for (index_t i = 0; i + 1 < m; ++i) sd(i) = beta[static_cast<std::size_t>(i)];
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
      es.computeFromTridiagonal(dg, sd, Eigen::ComputeEigenvectors);
      const double theta = es.eigenvalues()(m - 1);
      const double resid = std::abs(bnext * es.eigenvectors()(m - 1, m - 1));
      out.theta = theta;
      out.steps = static_cast<int>(m);
      if (resid <= tol * std::abs(theta) || bnext <= 1e-12 * std::abs(theta)) {
        out.converged = true;
        return out;
      }
    }
    if (k + 1 >= kmax) break;
    beta.push_back(bnext);
    Q.col(k + 1) = w / bnext;
  }
  return out;
}

}  // namespace

EigPair lanczos_extreme_eigs(const RealBanded& A, double tol, int maxit, std::uint64_t seed) {
  if (!A.symmetric()) throw Error(ErrorCode::invalid_argument, "Lanczos needs a symmetric matrix");
  if (maxit < 2) throw Error(ErrorCode::invalid_argument, "maxit must be at least 2");
  const index_t n = A.order();
  auto top = lanczos_top(
      n, [&](const std::vector<double>& x) { return matvec(A, std::span<const double>(x)); }, tol, maxit, seed);
  const CholFactor F = banded_cholesky(A);
  auto inv = lanczos_top(
      n, [&](const std::vector<double>& x) { return chol_solve(F, x); }, tol, maxit, seed + 1);
  EigPair e;
  e.lambda_max = top.theta;
  e.lambda_min = 1.0 / inv.theta;
  e.converged = top.converged && inv.converged;
  e.iterations = std::max(top.steps, inv.steps);
  if (e.lambda_min > e.lambda_max) e.lambda_min = e.lambda_max;
  return e;
}

SymEig sym_eig_dense(const Eigen::MatrixXd& M) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(M);
  return {es.eigenvalues(), es.eigenvectors()};
}

namespace {
template <typename T, typename Dense>
Dense dense_of(const BandedMatrix<T>& X) {
  const index_t n = X.order();
  Dense M = Dense::Zero(n, n);
  for (index_t k = -X.bandwidth(); k <= X.bandwidth(); ++k) {
    auto d = X.full_diag(k);
    for (std::size_t p = 0; p < d.size(); ++p) {
      const index_t j = static_cast<index_t>(p) - std::min<index_t>(k, 0);
      M(j + k, j) = d[p];
    }
  }
  return M;
}
}  // namespace

Eigen::MatrixXd to_dense(const RealBanded& X) { return dense_of<double, Eigen::MatrixXd>(X); }
Eigen::MatrixXcd to_dense(const ComplexBanded& X) { return dense_of<cplx, Eigen::MatrixXcd>(X); }

RealBanded from_dense(const Eigen::MatrixXd& M, index_t beta, Structure s) {
  const index_t n = M.rows();
  if (M.cols() != n) throw Error(ErrorCode::shape_mismatch, "square matrix expected");
  RealBanded X(n, beta, s);
  for (index_t k = X.kmin(); k <= X.kmax(); ++k) {
    auto d = X.diag(k);
    for (std::size_t p = 0; p < d.size(); ++p) {
      const index_t j = static_cast<index_t>(p) - std::min<index_t>(k, 0);
      d[p] = M(j + k, j);
    }
  }
  return X;
}

}  // namespace lyapb
