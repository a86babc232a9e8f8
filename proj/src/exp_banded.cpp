#include "lyapb/exp_banded.hpp"

#include <array>
#include <cmath>
#include <utility>

#include "lyapb/factor.hpp"

namespace lyapb {

namespace {

struct RawTable {
  int nu;
  double offset;
  std::vector<std::pair<cplx, cplx>> terms;  // (pole, weight)
};

const std::vector<RawTable>& raw_tables() {
  static const std::vector<RawTable> t = {
#include "cheb_table_data.inc"
  };
  return t;
}

std::vector<RationalChebTable> build_tables() {
  std::vector<RationalChebTable> out;
  for (const auto& raw : raw_tables()) {
    RationalChebTable t;
    t.nu = raw.nu;
    t.offset = raw.offset;
    for (auto [p, w] : raw.terms) {
      if (p.imag() == 0.0) t.real_pole_index = t.poles.size();
      t.poles.push_back(p);
      t.weights.push_back(w);
    }
    out.push_back(std::move(t));
  }
  return out;
}

}  // namespace

double RationalChebTable::operator()(double x) const {
  cplx s = offset;
  for (std::size_t j = 0; j < poles.size(); ++j) s += weights[j] / (x - poles[j]);
  return s.real();
}

const RationalChebTable& cheb_table(int nu) {
  static const std::vector<RationalChebTable> tables = build_tables();
  for (const auto& t : tables)
    if (t.nu == nu) return t;
  throw Error(ErrorCode::invalid_argument, "rational degree must lie in [4, 14], got " + std::to_string(nu));
}

int nu_from_eps_quad(double eps_quad) {
  if (!(eps_quad > 0.0)) throw Error(ErrorCode::invalid_argument, "eps_quad must be positive");
  const int nu = static_cast<int>(std::floor(std::log10(1.0 / eps_quad))) - 1;
  return std::clamp(nu, 4, 14);
}

ComplexBanded banded_resolvent(const RealBanded& A, const SpectralInterval& spec, double t, cplx xi, double eps_B) {
  const index_t n = A.order();
  if (!A.symmetric()) throw Error(ErrorCode::invalid_argument, "resolvent needs symmetric A");
  if (!(t > 0.0)) throw Error(ErrorCode::invalid_argument, "resolvent needs t > 0");
  ComplexBanded M = to_complex(A);
  M *= cplx(t);
  for (cplx& v : M.diag(0)) v -= xi;
  const LdltFactor F = complex_ldlt(M);
  index_t pbar = 0;
  if (spec.lambda_max > spec.lambda_min) pbar = cutoff_offset(freund_estimate(t, xi, spec), eps_B);
  const index_t beta = std::min(pbar, n - 1);
  ComplexBanded out(n, beta, Structure::symmetric);
  for (index_t q = 0; q < n; ++q) {
    const index_t p_hat = std::min(n - 1, q + beta);
    const auto col = partial_inverse_column(F, q, p_hat);
    for (index_t r = q; r <= p_hat; ++r) out.diag(r - q)[static_cast<std::size_t>(q)] = col[static_cast<std::size_t>(r - q)];
  }
  return out;
}

RealBanded rational_exp(const RealBanded& A, const SpectralInterval& spec, double t, const RationalChebTable& table,
                        double eps_B, double eps_quad) {
  const index_t n = A.order();
  if (t == 0.0) {
    RealBanded I = RealBanded::identity(n);
    I *= table(0.0);
    return I;
  }
  RealBanded acc(n, 0, Structure::symmetric);
  for (std::size_t j = 0; j < table.poles.size(); ++j) {
    const cplx xi = table.poles[j];
    if (xi.imag() < 0.0) continue;  // conjugate partner contributes the complex conjugate
    const double factor = xi.imag() > 0.0 ? 2.0 : 1.0;
    ComplexBanded M = banded_resolvent(A, spec, t, xi, eps_B);
    M *= table.weights[j];
    add_scaled(acc, factor, real_part(M));
  }
  for (double& v : acc.diag(0)) v += table.offset;
  return truncate_small(acc, eps_quad);
}

namespace {

// Linear combination sum_k c_k X_k, all operands sharing one layout family.
RealBanded lincomb(std::initializer_list<std::pair<double, const RealBanded*>> terms) {
  index_t beta = 0;
  index_t n = 0;
  Structure s = Structure::symmetric;
  for (auto [c, X] : terms) {
    beta = std::max(beta, X->bandwidth());
    n = X->order();
    if (!X->symmetric()) s = Structure::general;
  }
  RealBanded out(n, beta, s);
  for (auto [c, X] : terms) add_scaled(out, c, *X);
  return out;
}

class Lobatto {
 public:
  Lobatto(const std::function<RealBanded(double)>& f, double eps, int max_depth, QuadratureStats& st)
      : f_(f), eps_(eps), max_depth_(max_depth), st_(st) {}

  RealBanded run(double a, double b) {
    const double m = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    const std::array<double, 13> x = {a,         m - x1 * h, m - al * h, m - x2 * h, m - be * h, m - x3 * h, m,
                                      m + x3 * h, m + be * h, m + x2 * h, m + al * h, m + x1 * h, b};
    std::array<RealBanded, 13> y;
    for (std::size_t k = 0; k < 13; ++k) y[k] = eval(x[k]);
    static constexpr std::array<double, 7> w = {.0158271919734802, .0942738402188500, .155071987336585,
                                                .188821573960182,  .199773405226859,  .224926465333340,
                                                .242611071901408};
    RealBanded is = lincomb({{w[0], &y[0]}, {w[0], &y[12]}, {w[1], &y[1]}, {w[1], &y[11]}, {w[2], &y[2]},
                             {w[2], &y[10]}, {w[3], &y[3]}, {w[3], &y[9]}, {w[4], &y[4]}, {w[4], &y[8]},
                             {w[5], &y[5]}, {w[5], &y[7]}, {w[6], &y[6]}});
    is *= h;
    scale_ = frob_norm(is);
    if (scale_ == 0.0) return is;
    return step(a, b, y[0], y[12], std::array<const RealBanded*, 5>{&y[2], &y[4], &y[6], &y[8], &y[10]}, 1);
  }

 private:
  static constexpr double x1 = .942882415695480;
  static constexpr double x2 = .641853342345781;
  static constexpr double x3 = .236383199662150;
  static inline const double al = std::sqrt(2.0 / 3.0);
  static inline const double be = 1.0 / std::sqrt(5.0);

  RealBanded eval(double t) {
    ++st_.evaluations;
    return f_(t);
  }

  // interior: values at mll, ml, m, mr, mrr when already known
  RealBanded step(double a, double b, const RealBanded& fa, const RealBanded& fb,
                  std::optional<std::array<const RealBanded*, 5>> interior, int depth) {
    st_.max_depth_reached = std::max(st_.max_depth_reached, depth);
    const double h = 0.5 * (b - a);
    const double m = 0.5 * (a + b);
    const double mll = m - al * h, ml = m - be * h, mr = m + be * h, mrr = m + al * h;
    std::array<RealBanded, 5> own;
    std::array<const RealBanded*, 5> y{};
    if (interior) {
      y = *interior;
    } else {
      const std::array<double, 5> pts = {mll, ml, m, mr, mrr};
      for (std::size_t k = 0; k < 5; ++k) {
        own[k] = eval(pts[k]);
        y[k] = &own[k];
      }
    }
    RealBanded i2 = lincomb({{1.0, &fa}, {1.0, &fb}, {5.0, y[1]}, {5.0, y[3]}});
    i2 *= h / 6.0;
    RealBanded i1 = lincomb({{77.0, &fa}, {77.0, &fb}, {432.0, y[0]}, {432.0, y[4]}, {625.0, y[1]},
                             {625.0, y[3]}, {672.0, y[2]}});
    i1 *= h / 1470.0;
    const double err = frob_norm(band_add(i1, i2, -1.0));
    if (err <= eps_ * scale_ || mll <= a || b <= mrr) {
      ++st_.intervals;
      return i1;
    }
    if (depth >= max_depth_)
      throw Error(ErrorCode::quadrature_failure, "recursion depth cap " + std::to_string(max_depth_) +
                                                     " reached on [" + std::to_string(a) + ", " + std::to_string(b) + "]");
    RealBanded out = step(a, mll, fa, *y[0], std::nullopt, depth + 1);
    add_scaled(out, 1.0, step(mll, ml, *y[0], *y[1], std::nullopt, depth + 1));
    add_scaled(out, 1.0, step(ml, m, *y[1], *y[2], std::nullopt, depth + 1));
    add_scaled(out, 1.0, step(m, mr, *y[2], *y[3], std::nullopt, depth + 1));
    add_scaled(out, 1.0, step(mr, mrr, *y[3], *y[4], std::nullopt, depth + 1));
    add_scaled(out, 1.0, step(mrr, b, *y[4], fb, std::nullopt, depth + 1));
    return out;
  }

  const std::function<RealBanded(double)>& f_;
  double eps_;
  int max_depth_;
  QuadratureStats& st_;
  double scale_ = 0.0;
};

}  // namespace

RealBanded adaptive_lobatto(const std::function<RealBanded(double)>& f, double a, double b, double eps, int max_depth,
                            QuadratureStats* stats) {
  QuadratureStats local;
  Lobatto q(f, eps, max_depth, stats ? *stats : local);
  return q.run(a, b);
}

XbResult compute_XB(const RealBanded& A, const SpectralInterval& spec, const RealBanded& D, double tau,
                    const ExpOptions& opts) {
  detail::require_same_order(A.order(), D.order());
  if (!(tau > 0.0)) throw Error(ErrorCode::invalid_argument, "tau must be positive");
  XbResult res;
  if (frob_norm(D) == 0.0) {
    res.XB = RealBanded(A.order(), 0, D.symmetric() ? Structure::symmetric : Structure::general);
    return res;
  }
  const RationalChebTable& table = cheb_table(opts.nu);
  const bool sym = D.symmetric();
  auto f = [&](double t) {
    RealBanded E = rational_exp(A, spec, t, table, opts.eps_B, opts.eps_quad);
    res.max_beta_exp = std::max(res.max_beta_exp, E.bandwidth());
    return band_matmul(band_matmul(E, D), E, sym);
  };
  res.XB = adaptive_lobatto(f, 0.0, tau, opts.eps_quad, opts.max_depth, &res.stats);
  return res;
}

XbResult compute_XB_sylvester(const RealBanded& A, const SpectralInterval& specA, const RealBanded& B,
                              const SpectralInterval& specB, const RealBanded& D, double tau, const ExpOptions& opts) {
  detail::require_same_order(A.order(), D.order());
  detail::require_same_order(B.order(), D.order());
  if (!(tau > 0.0)) throw Error(ErrorCode::invalid_argument, "tau must be positive");
  XbResult res;
  if (frob_norm(D) == 0.0) {
    res.XB = RealBanded(A.order(), 0, Structure::general);
    return res;
  }
  const RationalChebTable& table = cheb_table(opts.nu);
  const RealBanded Dg = D.as_general();
  auto f = [&](double t) {
    RealBanded EA = rational_exp(A, specA, t, table, opts.eps_B, opts.eps_quad);
    RealBanded EB = rational_exp(B, specB, t, table, opts.eps_B, opts.eps_quad);
    res.max_beta_exp = std::max({res.max_beta_exp, EA.bandwidth(), EB.bandwidth()});
    return band_matmul(band_matmul(EA, Dg), EB);
  };
  res.XB = adaptive_lobatto(f, 0.0, tau, opts.eps_quad, opts.max_depth, &res.stats);
  return res;
}

}  // namespace lyapb
