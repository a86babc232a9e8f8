#pragma once

#include <random>

#include <Eigen/Dense>

#include "lyapb/banded.hpp"
#include "lyapb/factor.hpp"

namespace testutil {

using lyapb::index_t;
using lyapb::RealBanded;

inline RealBanded tridiag(index_t n, double off, double diag) {
  RealBanded T(n, 1, lyapb::Structure::symmetric);
  for (double& v : T.diag(0)) v = diag;
  for (double& v : T.diag(1)) v = off;
  return T;
}

/// tridiag(-1,2,-1) scaled so that its smallest eigenvalue is 1.
inline RealBanded scaled_laplacian(index_t n) {
  RealBanded L = tridiag(n, -1.0, 2.0);
  const double lmin = 2.0 - 2.0 * std::cos(M_PI / static_cast<double>(n + 1));
  L *= 1.0 / lmin;
  return L;
}

inline RealBanded random_general(index_t n, index_t beta, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  RealBanded X(n, beta, lyapb::Structure::general);
  for (double& v : X.raw()) v = u(rng);
  return X;
}

inline double rel_frob(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Y) {
  return (X - Y).norm() / Y.norm();
}

inline Eigen::MatrixXd lyap_residual(const Eigen::MatrixXd& A, const Eigen::MatrixXd& X, const Eigen::MatrixXd& D) {
  return A * X + X * A - D;
}

}  // namespace testutil
