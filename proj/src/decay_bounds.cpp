#include "lyapb/decay_bounds.hpp"

#include <cmath>
#include <functional>
#include <numbers>

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace lyapb {

namespace {

constexpr double pi = std::numbers::pi;

// Visit every structurally stored nonzero D(k,l) of the full matrix.
template <typename F>
void for_each_nonzero(const RealBanded& D, F&& f) {
  for (index_t k = -D.bandwidth(); k <= D.bandwidth(); ++k) {
    auto d = D.full_diag(k);
    for (std::size_t p = 0; p < d.size(); ++p) {
      if (d[p] == 0.0) continue;
      const index_t col = static_cast<index_t>(p) - std::min<index_t>(k, 0);
      f(col + k, col, d[p]);
    }
  }
}

void check_spec(const SpectralInterval& s) {
  if (!(s.lambda_min > 0.0) || s.lambda_max < s.lambda_min || s.beta_A < 1)
    throw Error(ErrorCode::invalid_argument, "spectral interval needs 0 < lambda_min <= lambda_max, beta_A >= 1");
}

}  // namespace

double haber_solution_bound(const SpectralInterval& spec, const RealBanded& D, index_t i, index_t j) {
  check_spec(spec);
  const index_t n = D.order();
  const double kappa = spec.kappa();
  const double sk = std::sqrt(kappa);
  // prefactor max{1/lambda_min, (1+sqrt k)^2/(2 lambda_max)} of the Kronecker operator
  const double tau = 1.0 / (2.0 * spec.lambda_min) * std::max(1.0, (1.0 + sk) * (1.0 + sk) / (2.0 * kappa));
  const double log_rho = std::log((sk - 1.0) / (sk + 1.0)) / static_cast<double>(n * spec.beta_A);
  double sum = 0.0;
  for_each_nonzero(D, [&](index_t k, index_t l, double v) {
    const double e = std::abs(static_cast<double>((l - j) * n + k - i));
    sum += std::abs(v) * (e == 0.0 ? 1.0 : std::exp(e * log_rho));
  });
  return tau * sum;
}

double KronBound::theta(index_t d, bool both_off) {
  auto key = std::make_pair(d, both_off);
  if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  check_spec(spec_);
  const double lmin = spec_.lambda_min;
  const double delta = spec_.lambda_max - lmin;
  double value = 0.0;
  if (delta > 0.0) {
    const double beta = static_cast<double>(spec_.beta_A);
    auto R_of = [&](double w) {
      const double a = (std::hypot(lmin, w) + std::hypot(spec_.lambda_max, w)) / delta;
      return a + std::sqrt(std::max(a * a - 1.0, 0.0));
    };
    std::function<double(double)> g;
    double pref = 0.0;
    if (both_off) {
      pref = 64.0 / (2.0 * pi * delta * delta);
      g = [&, d](double w) {
        const double R = R_of(w);
        const double r2 = R * R;
        const double core = r2 / ((r2 - 1.0) * (r2 - 1.0));
        return core * core * std::exp(-(static_cast<double>(d) / beta - 2.0) * std::log(R));
      };
    } else {
      pref = 8.0 / (2.0 * pi * delta);
      g = [&, d](double w) {
        const double R = R_of(w);
        const double r2 = R * R;
        return r2 / ((r2 - 1.0) * (r2 - 1.0)) / std::hypot(lmin, w) *
               std::exp(-(static_cast<double>(d) / beta - 1.0) * std::log(R));
      };
    }
    using boost::math::quadrature::gauss_kronrod;
    double omega = spec_.lambda_max;
    double acc = gauss_kronrod<double, 61>::integrate(g, 0.0, omega, 15, 1e-10);
    bool done = false;
    for (int doubling = 0; doubling < 80; ++doubling) {
      const double tail = gauss_kronrod<double, 61>::integrate(g, omega, 2.0 * omega, 15, 1e-10);
      acc += tail;
      omega *= 2.0;
      if (tail < 1e-3 * acc) {
        done = true;
        break;
      }
    }
    if (!done || !std::isfinite(acc))
      throw Error(ErrorCode::quadrature_failure,
                  "omega integral for distance " + std::to_string(d) + " did not settle (last value " + std::to_string(acc) + ")");
    value = pref * 2.0 * acc;
  }
  cache_.emplace(key, value);
  return value;
}

double KronBound::operator()(const RealBanded& D, index_t i, index_t j) {
  double sum = 0.0;
  for_each_nonzero(D, [&](index_t k, index_t l, double v) {
    double th = 0.0;
    if (k == i && l == j)
      th = 1.0 / (2.0 * spec_.lambda_min);
    else
      th = theta(std::abs(k - i) + std::abs(l - j), k != i && l != j);
    sum += th * std::abs(v);
  });
  return sum;
}

double kron_solution_bound(const SpectralInterval& spec, const RealBanded& D, index_t i, index_t j) {
  KronBound kb(spec);
  return kb(D, i, j);
}

double FreundEstimate::at_offset(index_t d) const {
  return prefactor * std::exp(-static_cast<double>(d) / static_cast<double>(beta_A) * std::log(R));
}

FreundEstimate freund_estimate(double t, cplx xi, const SpectralInterval& spec) {
  check_spec(spec);
  const cplx l1 = t * spec.lambda_min - xi;
  const cplx l2 = t * spec.lambda_max - xi;
  const double width = std::abs(l2 - l1);
  if (width == 0.0) throw Error(ErrorCode::degenerate_interval, "t*(lambda_max - lambda_min) = 0");
  const cplx a = (l2 + l1) / (l2 - l1);
  const double alpha = (std::abs(l1) + std::abs(l2)) / width;
  const double R = alpha + std::sqrt(std::max(alpha * alpha - 1.0, 0.0));
  const double zeta = 0.5 * (R + 1.0 / R);
  const double eta = 0.5 * (R - 1.0 / R);
  const double cpsi = a.real() / zeta;
  const double spsi = eta > 0.0 ? a.imag() / eta : 0.0;
  if (std::abs(cpsi * cpsi + spsi * spsi - 1.0) > 1e-8)
    throw Error(ErrorCode::consistency, "shifted centre is off the confocal ellipse");
  if (!(eta > 0.0)) throw Error(ErrorCode::singular_pivot, "shift lies on the spectral segment");
  const double root = std::sqrt(std::max(zeta * zeta - cpsi * cpsi, 0.0));
  const double B = R / (eta * root * (zeta + root));
  return {2.0 * R / width * B, R, spec.beta_A};
}

double freund_resolvent_bound(double t, cplx xi, const SpectralInterval& spec, index_t p, index_t q) {
  if (p == q) throw Error(ErrorCode::invalid_argument, "the decay estimate needs p != q");
  return freund_estimate(t, xi, spec).at_offset(std::abs(p - q));
}

index_t cutoff_offset(const FreundEstimate& f, double eps_B) {
  if (!(eps_B > 0.0)) throw Error(ErrorCode::invalid_argument, "eps_B must be positive");
  const double x = static_cast<double>(f.beta_A) * std::log(f.prefactor / eps_B) / std::log(f.R);
  if (!(x > 2.0)) return 2;
  if (x > 1e15) return std::numeric_limits<index_t>::max() / 4;
  return static_cast<index_t>(std::ceil(x));
}

index_t cutoff_bar_p(double t, cplx xi, const SpectralInterval& spec, index_t n, index_t q, double eps_B) {
  const index_t pbar = cutoff_offset(freund_estimate(t, xi, spec), eps_B);
  return std::min(n - 1, q + std::min(pbar, n));
}

double benzi_exp_bound(double rho, double t, index_t beta_M, index_t k, index_t l) {
  if (beta_M < 1) throw Error(ErrorCode::invalid_argument, "beta_M >= 1 required");
  const double xi = std::ceil(static_cast<double>(std::abs(k - l)) / static_cast<double>(beta_M));
  const double rt = rho * t;
  if (rt >= 1.0 && std::sqrt(4.0 * rt) <= xi && xi <= 2.0 * rt) return 10.0 * std::exp(-xi * xi / (5.0 * rt));
  if (xi >= 2.0 * rt && xi > 0.0 && rt > 0.0)
    return 10.0 * std::exp(-rt - std::log(rt) + xi * (1.0 + std::log(rt) - std::log(xi)));
  return std::numeric_limits<double>::infinity();
}

double tau_profile(const SpectralInterval& spec, double t, index_t i) {
  const double rho = (spec.lambda_max - spec.lambda_min) / 4.0;
  const double xi = std::ceil(static_cast<double>(i - 1) / static_cast<double>(spec.beta_A));
  return 10.0 * std::exp(-xi * xi / (5.0 * rho * t)) * std::exp(-t * spec.lambda_min);
}

TauChoice select_tau(const SpectralInterval& spec, index_t beta_max, double eps_tau) {
  check_spec(spec);
  if (beta_max < 1 || !(eps_tau > 0.0)) throw Error(ErrorCode::invalid_argument, "beta_max >= 1 and eps_tau > 0 required");
  TauChoice c;
  c.rho = (spec.lambda_max - spec.lambda_min) / 4.0;
  c.xi_bar = (beta_max - 1 + spec.beta_A - 1) / spec.beta_A;
  c.eps_tau = eps_tau;
  c.beta_max = beta_max;
  if (!(c.rho > 0.0)) throw Error(ErrorCode::degenerate_interval, "lambda_max == lambda_min, no decay-driven tau");
  const double L = std::log(eps_tau / 10.0);
  const double xb = static_cast<double>(c.xi_bar);
  const double disc = 25.0 * c.rho * c.rho * L * L - 20.0 * c.rho * spec.lambda_min * xb * xb;
  if (disc < 0.0 || L >= 0.0)
    throw Error(ErrorCode::no_admissible_tau, "no admissible tau for beta_max=" + std::to_string(beta_max) +
                                                  "; reduce beta_max or eps_tau");
  c.tau = (-5.0 * c.rho * L - std::sqrt(disc)) / (10.0 * c.rho * spec.lambda_min);
  if (!(c.tau > 0.0)) throw Error(ErrorCode::no_admissible_tau, "tau rule returned a non-positive value");
  return c;
}

int predicted_cg_iterations(double kappa, double eps_res) {
  if (kappa < 1.0 || !(eps_res > 0.0) || eps_res > 1.0)
    throw Error(ErrorCode::invalid_argument, "kappa >= 1 and 0 < eps_res <= 1 required");
  if (eps_res == 1.0) return 0;
  if (kappa == 1.0) return 1;
  const double s = 1.0 / std::sqrt(kappa);
  const double sigma = (1.0 - s) / (1.0 + s);
  const double inv = 1.0 / eps_res;
  const double num = std::log(inv + std::sqrt(inv * inv - 1.0));
  return static_cast<int>(std::ceil(num / std::log(1.0 / sigma)));
}

}  // namespace lyapb
