#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <type_traits>
#include <vector>

#include "lyapb/error.hpp"

namespace lyapb {

using index_t = std::ptrdiff_t;
using cplx = std::complex<double>;

template <typename T>
inline constexpr bool is_complex_v = false;
template <typename T>
inline constexpr bool is_complex_v<std::complex<T>> = true;

/// How the stored diagonals relate to the full matrix.
///   general   : diagonals -beta..beta
///   symmetric : diagonals 0..beta, upper triangle mirrored (plain transpose, also for complex)
///   lower     : diagonals 0..beta, upper triangle zero
enum class Structure { general, symmetric, lower };

/// Square banded matrix with diagonal-major storage.
///
/// Diagonal k holds the entries (i,j) with i - j = k; entry (i,j) sits at
/// position min(i,j) along its diagonal. Indices are 0-based.
template <typename T>
class BandedMatrix {
 public:
  using value_type = T;

  BandedMatrix() = default;

  BandedMatrix(index_t n, index_t beta, Structure s = Structure::general) : n_(n), s_(s) {
    if (n < 0 || beta < 0) throw Error(ErrorCode::invalid_argument, "negative order or bandwidth");
    beta_ = n == 0 ? 0 : std::min(beta, n - 1);
    layout();
  }

  static BandedMatrix identity(index_t n, Structure s = Structure::symmetric) {
    BandedMatrix m(n, 0, s);
    std::fill(m.data_.begin(), m.data_.end(), T(1));
    return m;
  }

  [[nodiscard]] index_t order() const noexcept { return n_; }
  [[nodiscard]] index_t bandwidth() const noexcept { return beta_; }
  [[nodiscard]] Structure structure() const noexcept { return s_; }
  [[nodiscard]] bool symmetric() const noexcept { return s_ == Structure::symmetric; }
  [[nodiscard]] std::size_t stored_entries() const noexcept { return data_.size(); }
  [[nodiscard]] std::span<const T> raw() const noexcept { return data_; }
  [[nodiscard]] std::span<T> raw() noexcept { return data_; }

  /// Lowest stored diagonal index.
  [[nodiscard]] index_t kmin() const noexcept { return s_ == Structure::general ? -beta_ : 0; }
  [[nodiscard]] index_t kmax() const noexcept { return beta_; }

  /// Range of diagonals that may be nonzero in the full matrix.
  [[nodiscard]] index_t full_kmin() const noexcept { return s_ == Structure::lower ? 0 : -beta_; }

  [[nodiscard]] bool stores(index_t k) const noexcept { return k >= kmin() && k <= kmax(); }

  /// Stored diagonal k (kmin() <= k <= kmax()).
  [[nodiscard]] std::span<T> diag(index_t k) {
    return {data_.data() + off_[static_cast<std::size_t>(k - kmin())],
            static_cast<std::size_t>(n_ - std::abs(k))};
  }
  [[nodiscard]] std::span<const T> diag(index_t k) const {
    return {data_.data() + off_[static_cast<std::size_t>(k - kmin())],
            static_cast<std::size_t>(n_ - std::abs(k))};
  }

  /// Diagonal k of the full matrix; symmetric storage maps k<0 onto -k.
  /// Empty span when the diagonal is structurally zero.
  [[nodiscard]] std::span<const T> full_diag(index_t k) const {
    if (std::abs(k) > beta_) return {};
    if (s_ == Structure::symmetric) return diag(std::abs(k));
    if (!stores(k)) return {};
    return diag(k);
  }

  [[nodiscard]] T operator()(index_t i, index_t j) const {
    check(i, j);
    index_t k = i - j;
    if (s_ == Structure::symmetric && k < 0) k = -k;
    if (!stores(k)) return T(0);
    return diag(k)[static_cast<std::size_t>(std::min(i, j))];
  }

  /// Mutable access to a stored entry. For symmetric storage (i,j) and (j,i) alias.
  T& at(index_t i, index_t j) {
    check(i, j);
    index_t k = i - j;
    if (s_ == Structure::symmetric && k < 0) k = -k;
    if (!stores(k)) throw Error(ErrorCode::index_out_of_range, "entry outside stored band");
    return diag(k)[static_cast<std::size_t>(std::min(i, j))];
  }

  /// Copy with a different bandwidth (dropping or zero-padding outer diagonals).
  [[nodiscard]] BandedMatrix with_bandwidth(index_t beta) const {
    BandedMatrix out(n_, beta, s_);
    for (index_t k = std::max(kmin(), out.kmin()); k <= std::min(kmax(), out.kmax()); ++k) {
      auto src = diag(k);
      std::copy(src.begin(), src.end(), out.diag(k).begin());
    }
    return out;
  }

  /// Expand symmetric storage into general storage; other layouts are copied.
  [[nodiscard]] BandedMatrix as_general() const {
    if (s_ == Structure::general) return *this;
    BandedMatrix out(n_, beta_, Structure::general);
    for (index_t k = out.kmin(); k <= out.kmax(); ++k) {
      auto src = full_diag(k);
      if (!src.empty()) std::copy(src.begin(), src.end(), out.diag(k).begin());
    }
    return out;
  }

  /// Outermost diagonal containing an entry with |x| > tol.
  [[nodiscard]] index_t effective_bandwidth(double tol = 0.0) const {
    for (index_t b = beta_; b > 0; --b) {
      for (index_t k : {b, -b}) {
        if (!stores(k)) continue;
        for (const T& v : diag(k))
          if (std::abs(v) > tol) return b;
      }
    }
    return 0;
  }

  [[nodiscard]] double max_abs() const noexcept {
    double m = 0.0;
    for (const T& v : data_) m = std::max(m, static_cast<double>(std::abs(v)));
    return m;
  }

  BandedMatrix& operator*=(T alpha) noexcept {
    for (T& v : data_) v *= alpha;
    return *this;
  }

 private:
  void layout() {
    off_.clear();
    std::size_t pos = 0;
    for (index_t k = kmin(); k <= kmax(); ++k) {
      off_.push_back(pos);
      pos += static_cast<std::size_t>(n_ - std::abs(k));
    }
    data_.assign(pos, T(0));
  }

  void check(index_t i, index_t j) const {
    if (i < 0 || j < 0 || i >= n_ || j >= n_) throw Error(ErrorCode::index_out_of_range, "matrix index");
  }

  index_t n_ = 0;
  index_t beta_ = 0;
  Structure s_ = Structure::general;
  std::vector<std::size_t> off_;
  std::vector<T> data_;
};

using RealBanded = BandedMatrix<double>;
using ComplexBanded = BandedMatrix<cplx>;

namespace detail {
inline void require_same_order(index_t a, index_t b) {
  if (a != b) throw Error(ErrorCode::shape_mismatch, "matrix orders differ");
}
}  // namespace detail

/// X + alpha*Y. Result is symmetric when both operands are, lower when both are lower.
template <typename T>
BandedMatrix<T> band_add(const BandedMatrix<T>& X, const BandedMatrix<T>& Y, T alpha = T(1)) {
  detail::require_same_order(X.order(), Y.order());
  Structure s = X.structure() == Y.structure() ? X.structure() : Structure::general;
  BandedMatrix<T> out(X.order(), std::max(X.bandwidth(), Y.bandwidth()), s);
  for (index_t k = out.kmin(); k <= out.kmax(); ++k) {
    auto dst = out.diag(k);
    auto x = X.full_diag(k);
    auto y = Y.full_diag(k);
    for (std::size_t p = 0; p < x.size(); ++p) dst[p] = x[p];
    for (std::size_t p = 0; p < y.size(); ++p) dst[p] += alpha * y[p];
  }
  return out;
}

/// In place Y += alpha*X, widening Y when needed. Y symmetric requires X symmetric.
template <typename T>
void add_scaled(BandedMatrix<T>& Y, T alpha, const BandedMatrix<T>& X) {
  detail::require_same_order(X.order(), Y.order());
  if (Y.symmetric() && !X.symmetric())
    throw Error(ErrorCode::invalid_argument, "cannot accumulate nonsymmetric into symmetric");
  if (X.bandwidth() > Y.bandwidth()) Y = Y.with_bandwidth(X.bandwidth());
  for (index_t k = Y.kmin(); k <= Y.kmax(); ++k) {
    auto x = X.full_diag(k);
    if (x.empty()) continue;
    auto dst = Y.diag(k);
    for (std::size_t p = 0; p < x.size(); ++p) dst[p] += alpha * x[p];
  }
}

/// Product X*Y. With lower_only the result is stored as symmetric from its
/// lower triangle; callers use it when the product is known to be symmetric.
template <typename T>
BandedMatrix<T> band_matmul(const BandedMatrix<T>& X, const BandedMatrix<T>& Y, bool lower_only = false) {
  detail::require_same_order(X.order(), Y.order());
  const index_t n = X.order();
  BandedMatrix<T> C(n, X.bandwidth() + Y.bandwidth(), lower_only ? Structure::symmetric : Structure::general);
  if (n == 0) return C;
  for (index_t a = X.full_kmin(); a <= X.bandwidth(); ++a) {
    auto xa = X.full_diag(a);
    if (xa.empty()) continue;
    for (index_t b = Y.full_kmin(); b <= Y.bandwidth(); ++b) {
      const index_t c = a + b;
      if (c < C.kmin() || c > C.kmax()) continue;
      auto yb = Y.full_diag(b);
      if (yb.empty()) continue;
      // C(j+b+a, j) += X(j+b+a, j+b) * Y(j+b, j)
      const index_t jlo = std::max<index_t>({0, -b, -c});
      const index_t jhi = std::min<index_t>({n, n - b, n - c});
      if (jlo >= jhi) continue;
      const T* __restrict px = xa.data() + (jlo + b + std::min<index_t>(a, 0));
      const T* __restrict py = yb.data() + (jlo + std::min<index_t>(b, 0));
      T* __restrict pc = C.diag(c).data() + (jlo + std::min<index_t>(c, 0));
      const index_t len = jhi - jlo;
      for (index_t t = 0; t < len; ++t) pc[t] += px[t] * py[t];
    }
  }
  return C;
}

/// S + S^T stored symmetric.
template <typename T>
BandedMatrix<T> symmetric_sum(const BandedMatrix<T>& S) {
  BandedMatrix<T> W(S.order(), S.bandwidth(), Structure::symmetric);
  for (index_t k = 0; k <= W.kmax(); ++k) {
    auto dst = W.diag(k);
    auto lo = S.full_diag(k);
    auto up = S.full_diag(-k);
    for (std::size_t p = 0; p < lo.size(); ++p) dst[p] = lo[p];
    for (std::size_t p = 0; p < up.size(); ++p) dst[p] += up[p];
  }
  return W;
}

template <typename T>
BandedMatrix<T> transpose(const BandedMatrix<T>& X) {
  if (X.symmetric()) return X;
  BandedMatrix<T> out(X.order(), X.bandwidth(), Structure::general);
  for (index_t k = out.kmin(); k <= out.kmax(); ++k) {
    auto src = X.full_diag(-k);
    if (!src.empty()) std::copy(src.begin(), src.end(), out.diag(k).begin());
  }
  return out;
}

/// trace(Y^T X) (bilinear, no conjugation).
template <typename T>
T frob_inner(const BandedMatrix<T>& X, const BandedMatrix<T>& Y) {
  detail::require_same_order(X.order(), Y.order());
  const index_t b = std::min(X.bandwidth(), Y.bandwidth());
  T sum(0);
  if (X.symmetric() && Y.symmetric()) {
    for (index_t k = 0; k <= b; ++k) {
      auto x = X.diag(k);
      auto y = Y.diag(k);
      T s(0);
      for (std::size_t p = 0; p < x.size(); ++p) s += x[p] * y[p];
      sum += k == 0 ? s : T(2) * s;
    }
    return sum;
  }
  for (index_t k = -b; k <= b; ++k) {
    auto x = X.full_diag(k);
    auto y = Y.full_diag(k);
    if (x.empty() || y.empty()) continue;
    for (std::size_t p = 0; p < x.size(); ++p) sum += x[p] * y[p];
  }
  return sum;
}

template <typename T>
double frob_norm(const BandedMatrix<T>& X) {
  double sum = 0.0;
  for (index_t k = X.kmin(); k <= X.kmax(); ++k) {
    double s = 0.0;
    for (const T& v : X.diag(k)) s += std::norm(v);
    sum += (X.symmetric() && k != 0) ? 2.0 * s : s;
  }
  return std::sqrt(sum);
}

/// Zero entries with |x| < eps and shrink the bandwidth to the outermost nonzero diagonal.
template <typename T>
BandedMatrix<T> truncate_small(const BandedMatrix<T>& X, double eps) {
  BandedMatrix<T> out = X;
  if (eps <= 0.0) return out;
  for (T& v : out.raw())
    if (std::abs(v) < eps) v = T(0);
  return out.with_bandwidth(out.effective_bandwidth());
}

/// y = X x.
template <typename T, typename U>
std::vector<std::common_type_t<T, U>> matvec(const BandedMatrix<T>& X, std::span<const U> x) {
  using R = std::common_type_t<T, U>;
  const index_t n = X.order();
  if (static_cast<index_t>(x.size()) != n) throw Error(ErrorCode::shape_mismatch, "matvec length");
  std::vector<R> y(static_cast<std::size_t>(n), R(0));
  for (index_t k = X.full_kmin(); k <= X.bandwidth(); ++k) {
    auto d = X.full_diag(k);
    if (d.empty()) continue;
    // y(j+k) += d[min] * x(j), j from max(0,-k) to min(n, n-k)
    const index_t jlo = std::max<index_t>(0, -k);
    const index_t jhi = std::min(n, n - k);
    const index_t shift = std::min<index_t>(k, 0);
    for (index_t j = jlo; j < jhi; ++j) y[static_cast<std::size_t>(j + k)] += d[static_cast<std::size_t>(j + shift)] * x[static_cast<std::size_t>(j)];
  }
  return y;
}

/// Entry-wise complex -> real part.
inline RealBanded real_part(const ComplexBanded& X) {
  RealBanded out(X.order(), X.bandwidth(), X.structure());
  auto src = X.raw();
  auto dst = out.raw();
  for (std::size_t p = 0; p < src.size(); ++p) dst[p] = src[p].real();
  return out;
}

inline ComplexBanded to_complex(const RealBanded& X) {
  ComplexBanded out(X.order(), X.bandwidth(), X.structure());
  auto src = X.raw();
  auto dst = out.raw();
  for (std::size_t p = 0; p < src.size(); ++p) dst[p] = src[p];
  return out;
}

}  // namespace lyapb
