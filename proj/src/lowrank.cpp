#include "lyapb/lowrank.hpp"

#include <cmath>
#include <random>

#include "lyapb/cg_solver.hpp"

namespace lyapb {

using Eigen::MatrixXd;
using Eigen::VectorXd;

MatrixXd LowRankFactor::dense() const {
  return left * sig.asDiagonal() * right_or_left().transpose();
}

MatrixXd band_times_dense(const RealBanded& X, const MatrixXd& M) {
  const index_t n = X.order();
  if (M.rows() != n) throw Error(ErrorCode::shape_mismatch, "banded times dense");
  MatrixXd out = MatrixXd::Zero(n, M.cols());
  for (index_t c = 0; c < M.cols(); ++c) {
    const double* __restrict x = M.col(c).data();
    double* __restrict y = out.col(c).data();
    for (index_t k = X.full_kmin(); k <= X.bandwidth(); ++k) {
      auto d = X.full_diag(k);
      if (d.empty()) continue;
      const index_t jlo = std::max<index_t>(0, -k);
      const index_t jhi = std::min(n, n - k);
      const double* __restrict dd = d.data() + (jlo + std::min<index_t>(k, 0));
      for (index_t j = jlo; j < jhi; ++j) y[j + k] += dd[j - jlo] * x[j];
    }
  }
  return out;
}

namespace {
VectorXd bmv(const RealBanded& X, const VectorXd& v) {
  return band_times_dense(X, v);
}
}  // namespace

VectorXd random_unit_vector(index_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  VectorXd v(n);
  for (index_t i = 0; i < n; ++i) v(i) = nd(rng);
  return v / v.norm();
}

KrylovState::KrylovState(const RealBanded& A, const CholFactor& chol, const RealBanded& D, const RealBanded& RB,
                         const VectorXd& v0)
    : A_(A), chol_(chol), D_(D), RB_(RB), n_(A.order()) {
  if (v0.size() != n_) throw Error(ErrorCode::shape_mismatch, "start vector length");
  const double nv = v0.norm();
  if (nv == 0.0) throw Error(ErrorCode::invalid_argument, "zero start vector");
  grow();
  V_.col(0) = v0 / nv;
  absorb(0);
  m_ = 1;
}

void KrylovState::grow() {
  const index_t cap = std::max<index_t>(16, 2 * V_.cols());
  auto resize = [](MatrixXd& M, index_t r, index_t c) {
    MatrixXd N = MatrixXd::Zero(r, c);
    N.topLeftCorner(M.rows(), M.cols()) = M;
    M.swap(N);
  };
  resize(V_, n_, cap);
  resize(H_, cap + 1, cap);
  resize(K_, cap, cap);
  if (D_.order() > 0) resize(Dm_, cap, cap);
  if (RB_.order() > 0) {
    resize(RBV_, n_, cap);
    resize(VtRBV_, cap, cap);
  }
}

void KrylovState::absorb(index_t c) {
  const VectorXd v = V_.col(c);
  const VectorXd av = bmv(A_, v);
  const VectorXd kc = V_.leftCols(c + 1).transpose() * av;
  K_.block(0, c, c + 1, 1) = kc;
  K_.block(c, 0, 1, c + 1) = kc.transpose();
  if (D_.order() > 0) {
    const VectorXd dv = bmv(D_, v);
    const VectorXd dc = V_.leftCols(c + 1).transpose() * dv;
    Dm_.block(0, c, c + 1, 1) = dc;
    Dm_.block(c, 0, 1, c + 1) = dc.transpose();
  }
  if (RB_.order() > 0) {
    RBV_.col(c) = bmv(RB_, v);
    const VectorXd rc = V_.leftCols(c + 1).transpose() * RBV_.col(c);
    VtRBV_.block(0, c, c + 1, 1) = rc;
    VtRBV_.block(c, 0, 1, c + 1) = rc.transpose();
  }
}

bool KrylovState::expand() {
  if (breakdown_) return false;
  const VectorXd last = V_.col(m_ - 1);
  std::vector<double> rhs(last.data(), last.data() + n_);
  auto sol = chol_solve(chol_, rhs);
  VectorXd w = Eigen::Map<VectorXd>(sol.data(), n_);
  const double w0 = w.norm();
  VectorXd h = VectorXd::Zero(m_);
  for (int pass = 0; pass < 2; ++pass) {
    const VectorXd c = V_.leftCols(m_).transpose() * w;
    w -= V_.leftCols(m_) * c;
    h += c;
  }
  const double eta = w.norm();
  if (m_ + 1 > V_.cols()) grow();
  H_.block(0, m_ - 1, m_, 1) = h;
  if (!(eta > 1e-14 * w0) || m_ >= n_) {
    H_(m_, m_ - 1) = 0.0;
    breakdown_ = true;
    return false;
  }
  H_(m_, m_ - 1) = eta;
  V_.col(m_) = w / eta;
  absorb(m_);
  ++m_;
  return true;
}

VectorXd KrylovState::A_times(index_t col) const { return bmv(A_, V_.col(col)); }

MatrixXd KrylovState::W_RB_W(index_t m, const VectorXd& vhat) const {
  if (RB_.order() == 0) throw Error(ErrorCode::invalid_argument, "state built without residual projection");
  MatrixXd out(m + 1, m + 1);
  out.topLeftCorner(m, m) = VtRBV_.topLeftCorner(m, m);
  const VectorXd rv = bmv(RB_, vhat);
  const VectorXd c = V_.leftCols(m).transpose() * rv;
  out.block(0, m, m, 1) = c;
  out.block(m, 0, 1, m) = c.transpose();
  out(m, m) = vhat.dot(rv);
  return out;
}

ProjectedSolution projected_solve(const MatrixXd& K, const MatrixXd& Dm) {
  if (K.rows() != K.cols() || Dm.rows() != K.rows() || Dm.cols() != K.cols())
    throw Error(ErrorCode::shape_mismatch, "projected matrices");
  const SymEig e = sym_eig_dense(0.5 * (K + K.transpose()));
  ProjectedSolution ps{e.vectors, e.values, e.vectors.transpose() * Dm * e.vectors};
  const index_t m = K.rows();
  for (index_t j = 0; j < m; ++j)
    for (index_t i = 0; i < m; ++i) {
      const double s = ps.Psi(i) + ps.Psi(j);
      if (!(s > 0.0)) throw Error(ErrorCode::not_spd, "projected eigenvalue sum is not positive");
      ps.Zhat(i, j) /= s;
    }
  ps.Zhat = 0.5 * (ps.Zhat + ps.Zhat.transpose());
  return ps;
}

AssembledFactor assemble_S(const Eigen::Ref<const MatrixXd>& V, const ProjectedSolution& ps, double tau,
                           double drop_tol) {
  const SymEig z = sym_eig_dense(ps.Zhat);
  const index_t m = ps.Psi.size();
  const VectorXd decay = (-tau * ps.Psi.array()).exp();
  MatrixXd full = ps.Pi * decay.asDiagonal() * z.vectors * z.values.cwiseAbs().cwiseSqrt().asDiagonal();
  VectorXd norms = full.colwise().norm();
  const double top = m > 0 ? norms.maxCoeff() : 0.0;
  std::vector<index_t> keep;
  for (index_t k = 0; k < m; ++k)
    if (top > 0.0 && norms(k) >= drop_tol * top && norms(k) > 0.0) keep.push_back(k);
  AssembledFactor out;
  out.Delta.resize(m, static_cast<index_t>(keep.size()));
  out.factor.sig.resize(static_cast<index_t>(keep.size()));
  for (std::size_t c = 0; c < keep.size(); ++c) {
    out.Delta.col(static_cast<index_t>(c)) = full.col(keep[c]);
    out.factor.sig(static_cast<index_t>(c)) = z.values(keep[c]) < 0.0 ? -1.0 : 1.0;
  }
  out.factor.left = V * out.Delta;
  return out;
}

ArnoldiG arnoldi_G(const KrylovState& st, index_t m) {
  const bool exact = st.size() == m;  // no successor vector: invariant subspace reached
  if (m < 1 || m > st.size() || (exact && !st.broke_down()))
    throw Error(ErrorCode::invalid_argument, "Arnoldi data for this basis size is not available");
  const MatrixXd Hm = st.H(m).topRows(m);
  Eigen::PartialPivLU<MatrixXd> lu(Hm);
  const double rc = lu.rcond();
  if (!(rc > 1e-15)) throw Error(ErrorCode::breakdown, "projected Hessenberg matrix is singular; restart advised");
  const MatrixXd Hinv = lu.inverse();
  ArnoldiG g;
  g.G = MatrixXd::Zero(m + 1, m);
  g.vhat = VectorXd::Zero(st.V(1).rows());
  const double h = exact ? 0.0 : st.H(m)(m, m - 1);
  g.G.topRows(m) = Hinv;
  if (h != 0.0) {
    const VectorXd av = st.A_times(m);
    const VectorXd c = st.K(m + 1).col(m).head(m);
    VectorXd r = av - st.V(m) * c;
    r -= st.V(m) * (st.V(m).transpose() * r);
    g.eta = r.norm();
    if (g.eta > 0.0) g.vhat = r / g.eta;
    const Eigen::RowVectorXd last = Hinv.row(m - 1);
    g.G.topRows(m) -= h * c * last;
    g.G.row(m) = -g.eta * h * last;
  }
  return g;
}

CheapResidual cheap_residual(double gamma, const ArnoldiG& g, const MatrixXd& Delta, const VectorXd& sig,
                             const MatrixXd& WtRBW) {
  const index_t m = g.G.cols();
  if (Delta.rows() != m || WtRBW.rows() != m + 1) throw Error(ErrorCode::shape_mismatch, "cheap residual operands");
  const MatrixXd Z = Delta * sig.asDiagonal() * Delta.transpose();
  MatrixXd E = MatrixXd::Zero(m + 1, m);
  E.topRows(m).setIdentity();
  const MatrixXd GZ = g.G * Z;
  const MatrixXd J = GZ * E.transpose() + E * GZ.transpose();
  const double sq = gamma * gamma + J.squaredNorm() + 2.0 * (J.cwiseProduct(WtRBW)).sum();
  CheapResidual r;
  const double scale = gamma * gamma + J.squaredNorm();
  if (sq < 0.0) {
    r.cancellation = sq < -1e-12 * std::max(scale, 1e-300);
    r.value = 0.0;
  } else {
    r.value = std::sqrt(sq);
  }
  return r;
}

const char* to_string(StopReason r) noexcept {
  switch (r) {
    case StopReason::converged: return "converged";
    case StopReason::stagnated: return "stagnated";
    case StopReason::breakdown: return "breakdown";
    case StopReason::max_iterations: return "max_iterations";
    case StopReason::trivial: return "trivial";
  }
  return "unknown";
}

double lowrank_residual_norm(const RealBanded& RB, const RealBanded& A, const RealBanded& B, const LowRankFactor& F) {
  const double rb2 = std::pow(frob_norm(RB), 2);
  const index_t s = F.rank();
  if (s == 0) return std::sqrt(rb2);
  const MatrixXd& L = F.left;
  const MatrixXd& Rt = F.right_or_left();
  MatrixXd P(L.rows(), 2 * s), Q(L.rows(), 2 * s);
  P << band_times_dense(A, L), L;
  Q << Rt, band_times_dense(B, Rt);
  VectorXd msig(2 * s);
  msig << F.sig, F.sig;
  const MatrixXd C = P.transpose() * band_times_dense(RB, Q);
  const MatrixXd GP = P.transpose() * P;
  const MatrixXd GQ = Q.transpose() * Q;
  const double cross = (C.array().rowwise() * msig.transpose().array()).matrix().diagonal().sum();
  // ||P M Q^T||^2 = trace(GP M GQ M)
  const MatrixXd T = GP * msig.asDiagonal() * GQ * msig.asDiagonal();
  const double low = T.trace();
  const double sq = rb2 + 2.0 * cross + low;
  return std::sqrt(std::max(sq, 0.0));
}

namespace {

struct Checker {
  double norm_d;
  const LowRankOptions& opts;
  LowRankReport& rep;
  double mu;

  // returns true when the iteration should stop
  bool update(int m, double res, bool at_end, StopReason end_reason) {
    const double rel = res / norm_d;
    rep.residual_history.emplace_back(m, rel);
    rep.final_relres = rel;
    rep.iterations = m;
    if (rel < opts.eps_res) {
      rep.stop = StopReason::converged;
      return true;
    }
    if (res > 0.0 && std::abs(res - mu) / res < opts.eps_it) {
      rep.stop = StopReason::stagnated;
      return true;
    }
    if (at_end) {
      rep.stop = end_reason;
      return true;
    }
    mu = res;
    return false;
  }
};

}  // namespace

LowRankResult lowrank_iterate(const RealBanded& A, const CholFactor& chol, const RealBanded& D, const RealBanded& XB,
                              double tau, const LowRankOptions& opts) {
  const index_t n = A.order();
  detail::require_same_order(n, D.order());
  detail::require_same_order(n, XB.order());
  if (opts.m_max < 1 || opts.check_period < 1) throw Error(ErrorCode::invalid_argument, "m_max and check period must be positive");
  const RealBanded Ds = as_symmetric(D);
  const RealBanded RB = band_add(lyap_apply(A, as_symmetric(XB)), Ds, -1.0);
  LowRankResult out;
  out.report.gamma = frob_norm(RB);
  out.factor.left = MatrixXd(n, 0);
  out.factor.sig = VectorXd(0);
  const double norm_d = frob_norm(Ds);
  if (norm_d == 0.0) {
    out.report.final_relres = out.report.gamma == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    out.report.stop = StopReason::trivial;
    return out;
  }
  KrylovState st(A, chol, Ds, RB, random_unit_vector(n, opts.seed));
  Checker chk{norm_d, opts, out.report, norm_d};
  for (int m = 1; m <= opts.m_max; ++m) {
    const bool grew = st.expand();
    const bool end = !grew || m == opts.m_max;
    if (m % opts.check_period != 0 && !end) continue;
    const ArnoldiG g = arnoldi_G(st, m);
    const ProjectedSolution ps = projected_solve(st.K(m), st.Dm(m));
    AssembledFactor af = assemble_S(st.V(m), ps, tau, opts.drop_tol);
    const CheapResidual r = cheap_residual(out.report.gamma, g, af.Delta, af.factor.sig, st.W_RB_W(m, g.vhat));
    out.report.cancellation = out.report.cancellation || r.cancellation;
    out.factor = std::move(af.factor);
    if (chk.update(m, r.value, end, grew ? StopReason::max_iterations : StopReason::breakdown)) break;
  }
  return out;
}

LowRankResult lowrank_iterate_sylvester(const RealBanded& A, const CholFactor& cholA, const RealBanded& B,
                                        const CholFactor& cholB, const RealBanded& D, const RealBanded& XB,
                                        double tau, const LowRankOptions& opts) {
  const index_t n = A.order();
  detail::require_same_order(n, B.order());
  detail::require_same_order(n, D.order());
  detail::require_same_order(n, XB.order());
  if (opts.m_max < 1 || opts.check_period < 1) throw Error(ErrorCode::invalid_argument, "m_max and check period must be positive");
  const RealBanded Dg = D.as_general();
  const RealBanded RB = band_add(sylv_apply(A, B, XB.as_general()), Dg, -1.0);
  LowRankResult out;
  out.report.gamma = frob_norm(RB);
  out.factor.left = MatrixXd(n, 0);
  out.factor.right = MatrixXd(n, 0);
  out.factor.sig = VectorXd(0);
  const double norm_d = frob_norm(Dg);
  if (norm_d == 0.0) {
    out.report.final_relres = out.report.gamma == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return out;
  }
  const RealBanded none;
  const VectorXd v0 = random_unit_vector(n, opts.seed);
  KrylovState sa(A, cholA, none, none, v0);
  KrylovState sb(B, cholB, none, none, v0);
  Checker chk{norm_d, opts, out.report, norm_d};
  for (int m = 1; m <= opts.m_max; ++m) {
    const bool ga = sa.expand();
    const bool gb = sb.expand();
    const bool grew = ga && gb;
    const bool end = !grew || m == opts.m_max;
    if (m % opts.check_period != 0 && !end) continue;
    const index_t ma = std::min<index_t>(m, sa.size());
    const index_t mb = std::min<index_t>(m, sb.size());
    const SymEig ea = sym_eig_dense(0.5 * (sa.K(ma) + sa.K(ma).transpose()));
    const SymEig eb = sym_eig_dense(0.5 * (sb.K(mb) + sb.K(mb).transpose()));
    const MatrixXd VA = sa.V(ma) * ea.vectors;
    const MatrixXd VB = sb.V(mb) * eb.vectors;
    MatrixXd Z = VA.transpose() * band_times_dense(Dg, VB);
    for (index_t j = 0; j < mb; ++j)
      for (index_t i = 0; i < ma; ++i) {
        const double s = ea.values(i) + eb.values(j);
        if (!(s > 0.0)) throw Error(ErrorCode::not_spd, "projected eigenvalue sum is not positive");
        Z(i, j) /= s;
      }
    const MatrixXd core = (-tau * ea.values.array()).exp().matrix().asDiagonal() * Z *
                          (-tau * eb.values.array()).exp().matrix().asDiagonal();
    Eigen::JacobiSVD<MatrixXd> svd(core, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const VectorXd sv = svd.singularValues();
    index_t keep = 0;
    const double top = sv.size() ? sv(0) : 0.0;
    while (keep < sv.size() && top > 0.0 && std::sqrt(sv(keep)) >= opts.drop_tol * std::sqrt(top) && sv(keep) > 0.0) ++keep;
    const VectorXd root = sv.head(keep).cwiseSqrt();
    out.factor.left = VA * svd.matrixU().leftCols(keep) * root.asDiagonal();
    out.factor.right = VB * svd.matrixV().leftCols(keep) * root.asDiagonal();
    out.factor.sig = VectorXd::Ones(keep);
    const double res = lowrank_residual_norm(RB, A, B, out.factor);
    if (chk.update(m, res, end, grew ? StopReason::max_iterations : StopReason::breakdown)) break;
  }
  return out;
}

}  // namespace lyapb
