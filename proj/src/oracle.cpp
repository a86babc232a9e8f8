#include "lyapb/oracle.hpp"

#include <cmath>
#include <ostream>
#include <random>

#include "lyapb/factor.hpp"

namespace lyapb {

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

void require_dense_size(const MatrixXd& A, const MatrixXd& D) {
  if (A.rows() != A.cols() || D.rows() != A.rows() || D.cols() != A.rows())
    throw Error(ErrorCode::shape_mismatch, "dense oracle operands");
  if (A.rows() > 2000) throw Error(ErrorCode::invalid_argument, "dense oracles are limited to n <= 2000");
}

}  // namespace

MatrixXd dense_lyap_oracle(const MatrixXd& A, const MatrixXd& D) {
  require_dense_size(A, D);
  const SymEig e = sym_eig_dense(A);
  MatrixXd Y = e.vectors.transpose() * D * e.vectors;
  for (index_t j = 0; j < Y.cols(); ++j)
    for (index_t i = 0; i < Y.rows(); ++i) {
      const double s = e.values(i) + e.values(j);
      if (!(s > 0.0)) throw Error(ErrorCode::not_spd, "eigenvalue sum is not positive");
      Y(i, j) /= s;
    }
  return e.vectors * Y * e.vectors.transpose();
}

MatrixXd dense_finite_horizon_oracle(const MatrixXd& A, const MatrixXd& D, double tau) {
  require_dense_size(A, D);
  const SymEig e = sym_eig_dense(A);
  MatrixXd Y = e.vectors.transpose() * D * e.vectors;
  for (index_t j = 0; j < Y.cols(); ++j)
    for (index_t i = 0; i < Y.rows(); ++i) {
      const double s = e.values(i) + e.values(j);
      if (!(s > 0.0)) throw Error(ErrorCode::not_spd, "eigenvalue sum is not positive");
      Y(i, j) *= -std::expm1(-tau * s) / s;
    }
  return e.vectors * Y * e.vectors.transpose();
}

MatrixXd dense_sylvester_oracle(const MatrixXd& A, const MatrixXd& B, const MatrixXd& D) {
  require_dense_size(A, D);
  require_dense_size(B, D);
  const SymEig ea = sym_eig_dense(A);
  const SymEig eb = sym_eig_dense(B);
  MatrixXd Y = ea.vectors.transpose() * D * eb.vectors;
  for (index_t j = 0; j < Y.cols(); ++j)
    for (index_t i = 0; i < Y.rows(); ++i) {
      const double s = ea.values(i) + eb.values(j);
      if (!(s > 0.0)) throw Error(ErrorCode::not_spd, "eigenvalue sum is not positive");
      Y(i, j) /= s;
    }
  return ea.vectors * Y * eb.vectors.transpose();
}

MatrixXd dense_expm_sym(const MatrixXd& A, double t) {
  const SymEig e = sym_eig_dense(A);
  return e.vectors * (-t * e.values.array()).exp().matrix().asDiagonal() * e.vectors.transpose();
}

ProblemData gen_kron_example(index_t n_blocks) {
  if (n_blocks < 1) throw Error(ErrorCode::invalid_argument, "need at least one block");
  constexpr double e = -0.34;
  constexpr double a = 1.36;
  constexpr index_t b = 6;
  const index_t N = b * n_blocks;
  ProblemData p;
  p.generator = "kron";
  p.n = N;
  p.A = RealBanded(N, std::min<index_t>(b, N - 1), Structure::symmetric);
  p.D = RealBanded(N, std::min<index_t>(2 * b - 1, N - 1), Structure::symmetric);
  for (index_t blk = 0; blk < n_blocks; ++blk) {
    for (index_t r = 0; r < b; ++r) {
      const index_t i = blk * b + r;
      p.A.at(i, i) = e + (a - e);
      if (r > 0) p.A.at(i, i - 1) = e;
      if (blk > 0) p.A.at(i, i - b) = e;
      for (index_t s = 0; s < b; ++s) {
        const index_t j = blk * b + s;
        if (j <= i) p.D.at(i, j) = 0.2;
        if (blk > 0) p.D.at(i, (blk - 1) * b + s) = 0.1;
      }
      p.D.at(i, i) += 0.8;
    }
  }
  return p;
}

ProblemData gen_1d_operator(index_t n, double gamma, std::uint64_t seed) {
  if (n < 2 || !(gamma > 0.0)) throw Error(ErrorCode::invalid_argument, "need n >= 2 and gamma > 0");
  const double h = 1.0 / static_cast<double>(n + 1);
  const double c = 1.0 / (gamma * h * h);
  ProblemData p;
  p.generator = "1d";
  p.n = n;
  p.gamma = gamma;
  p.seed = seed;
  p.A = RealBanded(n, 1, Structure::symmetric);
  for (index_t i = 0; i < n; ++i) {
    const double x = static_cast<double>(i + 1) * h;
    const double wl = std::exp(x - 0.5 * h);
    const double wr = std::exp(x + 0.5 * h);
    p.A.at(i, i) = c * (wl + wr) + gamma;
    if (i + 1 < n) p.A.at(i + 1, i) = -c * wr;
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  p.D = RealBanded(n, 0, Structure::symmetric);
  for (double& v : p.D.diag(0)) v = u(rng);
  return p;
}

ProblemData gen_pentadiag_operator(index_t n, double gamma, std::uint64_t seed) {
  if (n < 3 || !(gamma > 0.0)) throw Error(ErrorCode::invalid_argument, "need n >= 3 and gamma > 0");
  const double c = static_cast<double>((n - 1) * (n - 1)) / 12.0;
  ProblemData p;
  p.generator = "penta";
  p.n = n;
  p.gamma = gamma;
  p.seed = seed;
  p.A = RealBanded(n, 2, Structure::symmetric);
  for (index_t j = 0; j < n; ++j) {
    const double x = static_cast<double>(j) / static_cast<double>(n - 1);
    p.A.at(j, j) = 30.0 * c + gamma * std::log(10.0 * (x + 1.0));
    if (j + 1 < n) p.A.at(j + 1, j) = -16.0 * c;
    if (j + 2 < n) p.A.at(j + 2, j) = c;
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  p.D = RealBanded(n, 1, Structure::symmetric);
  for (double& v : p.D.raw()) v = u(rng);
  p.D *= 1.0 / frob_norm(p.D);
  return p;
}

RealBanded random_spd_banded(index_t n, index_t beta, double delta, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  RealBanded A(n, beta, Structure::symmetric);
  std::vector<double> rowsum(static_cast<std::size_t>(n), 0.0);
  for (index_t k = 1; k <= A.bandwidth(); ++k) {
    auto d = A.diag(k);
    for (std::size_t p = 0; p < d.size(); ++p) {
      d[p] = -(1.0 - u(rng));  // in [-1, 0)
      rowsum[p] += -d[p];
      rowsum[p + static_cast<std::size_t>(k)] += -d[p];
    }
  }
  auto d0 = A.diag(0);
  for (std::size_t p = 0; p < d0.size(); ++p) d0[p] = rowsum[p] + delta * (1.0 + u(rng));
  return A;
}

RealBanded random_sym_banded(index_t n, index_t beta, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  RealBanded D(n, beta, Structure::symmetric);
  for (double& v : D.raw()) v = u(rng);
  return D;
}

ProblemData generate(const std::string& id, index_t n, double gamma, std::uint64_t seed) {
  if (id == "kron") {
    if (n % 6 != 0) throw Error(ErrorCode::invalid_argument, "kron generator needs n divisible by 6");
    return gen_kron_example(n / 6);
  }
  if (id == "1d") return gen_1d_operator(n, gamma, seed);
  if (id == "penta") return gen_pentadiag_operator(n, gamma, seed);
  throw Error(ErrorCode::invalid_argument, "unknown generator '" + id + "' (kron, 1d, penta)");
}

RunRecord run_experiment(const ProblemData& p, const SolverConfig& cfg) {
  RunRecord r;
  r.generator = p.generator;
  r.n = p.n;
  r.gamma = p.gamma;
  const SplitSolution sol = p.B ? solve_sylvester(p.A, *p.B, p.D, cfg) : solve_lyapunov(p.A, p.D, cfg);
  r.method = to_string(sol.report.method);
  r.iterations = sol.report.iterations;
  r.beta = sol.report.beta_xb;
  r.rank = sol.report.rank;
  r.tau = sol.report.tau;
  r.seconds = sol.report.seconds;
  const double res = p.B ? sol.residual_norm(p.A, *p.B, p.D) : sol.residual_norm(p.A, p.D);
  r.relres = res / frob_norm(p.D);
  r.bytes = sol.memory_report().total();
  r.kappa = sol.report.lambda_min > 0.0 ? sol.report.lambda_max / sol.report.lambda_min : 0.0;
  r.stop_reason = sol.report.stop_reason;
  return r;
}

void write_record_header(std::ostream& out) {
  out << "generator,n,gamma,method,its,beta,rank,tau,seconds,relres,bytes,kappa,stop\n";
}

void write_record(std::ostream& out, const RunRecord& r) {
  out << r.generator << ',' << r.n << ',' << r.gamma << ',' << r.method << ',' << r.iterations << ',' << r.beta << ','
      << r.rank << ',' << r.tau << ',' << r.seconds << ',' << r.relres << ',' << r.bytes << ',' << r.kappa << ','
      << r.stop_reason << '\n';
}

void emit_decay_profile(std::ostream& out, const RealBanded& D, const SpectralInterval& spec,
                        const MatrixXd& X, index_t j, index_t stride) {
  const index_t n = D.order();
  if (j < 0 || j >= n) throw Error(ErrorCode::index_out_of_range, "profile column");
  KronBound kb(spec);
  out << "i,abs_x,bound_thm21,bound_thm22\n";
  for (index_t i = 0; i < n; i += std::max<index_t>(stride, 1)) {
    out << i + 1 << ',' << (X.size() ? std::abs(X(i, j)) : std::nan("")) << ','
        << haber_solution_bound(spec, D, i, j) << ',' << kb(D, i, j) << '\n';
  }
}

}  // namespace lyapb
