#pragma once

// Chebyshev primitives: value/coefficient transforms on Lobatto points,
// Clenshaw evaluation, series products and the banded ultraspherical
// operators (differentiation, conversion, multiplication by 1 +- y).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "fracspec/common.hpp"

namespace fracspec {

enum class ChebKind { first, second };

/// Coefficients of a Chebyshev series on [-1,1]; index n multiplies T_n
/// (kind == first) or U_n (kind == second).
template <Scalar S>
struct ChebSeries {
  ChebKind kind = ChebKind::first;
  std::vector<S> coeffs{S(0)};

  ChebSeries() = default;
  explicit ChebSeries(std::vector<S> c, ChebKind k = ChebKind::first)
      : kind(k), coeffs(std::move(c)) {
    if (coeffs.empty()) throw Error("ChebSeries: empty coefficient vector");
  }

  [[nodiscard]] std::size_t size() const noexcept { return coeffs.size(); }
  /// Index of the last coefficient with nonzero magnitude (0 for the zero series).
  [[nodiscard]] std::size_t degree() const noexcept;
  [[nodiscard]] S operator()(double y) const;
};

/// N+1 Chebyshev-Lobatto points cos(k pi / N), k = 0..N (descending).
[[nodiscard]] std::vector<double> lobatto_points(std::size_t n_points);

/// Interpolant coefficients from samples at the Lobatto points (fast cosine
/// transform, O(N log N)).
template <Scalar S>
[[nodiscard]] ChebSeries<S> values_to_coeffs(std::span<const S> values);

/// Inverse of values_to_coeffs: the series sampled at its own Lobatto grid.
template <Scalar S>
[[nodiscard]] std::vector<S> coeffs_to_values(const ChebSeries<S>& series);

/// Sum c_n T_n(y) or c_n U_n(y) by backward recurrence. Throws if |y| > 1 + 1e-12.
template <Scalar S>
[[nodiscard]] S clenshaw_eval(const ChebSeries<S>& series, double y);

/// Same recurrence without the domain check; coefficients given as a span.
template <Scalar S>
[[nodiscard]] S clenshaw_T(std::span<const S> c, double y) noexcept;

/// First-kind coefficients of the product of two first-kind series
/// (T_k T_m = (T_{k+m} + T_{|k-m|}) / 2). Result length a.size()+b.size()-1.
template <Scalar S>
[[nodiscard]] std::vector<S> cheb_product(std::span<const S> a, std::span<const S> b);

/// Accumulates alpha * (a * b) into out[0..out.size()), dropping higher terms.
template <Scalar S>
void cheb_product_accumulate(std::span<const S> a, std::span<const S> b, S alpha,
                             std::span<S> out) noexcept;

/// Square matrix stored by diagonals: entry (i, j) with -kl <= j - i <= ku.
class BandedMatrix {
 public:
  BandedMatrix() = default;
  BandedMatrix(std::size_t n, std::size_t kl, std::size_t ku);

  [[nodiscard]] std::size_t size() const noexcept { return n_; }
  [[nodiscard]] std::size_t lower() const noexcept { return kl_; }
  [[nodiscard]] std::size_t upper() const noexcept { return ku_; }

  /// Zero outside the band.
  [[nodiscard]] double operator()(std::size_t i, std::size_t j) const noexcept;
  void set(std::size_t i, std::size_t j, double v);

  [[nodiscard]] std::vector<double> apply(std::span<const double> x) const;
  [[nodiscard]] Eigen::MatrixXd dense() const;

  /// Product this * rhs, truncated to the common size.
  [[nodiscard]] BandedMatrix operator*(const BandedMatrix& rhs) const;

 private:
  std::size_t n_ = 0, kl_ = 0, ku_ = 0;
  std::vector<double> diag_;  // (kl + ku + 1) x n, row-major by diagonal offset
};

/// Solves a square banded system by Gaussian elimination with partial pivoting
/// in O(n (kl + ku) kl) work. entry(i, j) is queried only for -kl <= j - i <= ku.
/// Throws SingularSystemError on an exactly zero pivot.
template <class Entry>
[[nodiscard]] std::vector<double> solve_banded(std::size_t n, std::size_t kl, std::size_t ku,
                                               Entry&& entry, std::vector<double> rhs);

/// Ultraspherical operators truncated to `size`:
/// D  : T-coefficients -> U-coefficients of the derivative,
/// S  : T-coefficients -> U-coefficients (conversion),
/// Mplus / Mminus : multiplication by (1+y) / (1-y) acting on U-coefficients.
struct UltraOps {
  std::size_t size = 0;
  BandedMatrix D;
  BandedMatrix S;
  BandedMatrix Mplus;
  BandedMatrix Mminus;
};

[[nodiscard]] UltraOps build_ultra_ops(std::size_t size);

template <class Entry>
std::vector<double> solve_banded(std::size_t n, std::size_t kl, std::size_t ku, Entry&& entry,
                                 std::vector<double> rhs) {
  if (rhs.size() != n) throw Error("solve_banded: size mismatch");
  // LAPACK-style band storage with kl extra superdiagonals for pivot fill-in.
  const std::size_t ld = 2 * kl + ku + 1;
  const std::size_t off = kl + ku;
  std::vector<double> ab(ld * n, 0.0);
  auto at = [&](std::size_t i, std::size_t j) -> double& { return ab[off + i - j + j * ld]; };
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t i0 = j > ku ? j - ku : 0;
    const std::size_t i1 = std::min(n - 1, j + kl);
    for (std::size_t i = i0; i <= i1; ++i) at(i, j) = entry(i, j);
  }
  for (std::size_t j = 0; j < n; ++j) {
    const std::size_t last = std::min(n - 1, j + kl);
    const std::size_t cmax = std::min(n - 1, j + kl + ku);
    std::size_t p = j;
    for (std::size_t i = j + 1; i <= last; ++i) {
      if (std::abs(at(i, j)) > std::abs(at(p, j))) p = i;
    }
    if (at(p, j) == 0.0) throw SingularSystemError("solve_banded: zero pivot", std::numeric_limits<double>::infinity());
    if (p != j) {
      for (std::size_t c = j; c <= cmax; ++c) std::swap(at(j, c), at(p, c));
      std::swap(rhs[j], rhs[p]);
    }
    const double piv = at(j, j);
    for (std::size_t i = j + 1; i <= last; ++i) {
      const double l = at(i, j) / piv;
      if (l == 0.0) continue;
      at(i, j) = 0.0;
      for (std::size_t c = j + 1; c <= cmax; ++c) at(i, c) -= l * at(j, c);
      rhs[i] -= l * rhs[j];
    }
  }
  for (std::size_t jj = n; jj-- > 0;) {
    const std::size_t cmax = std::min(n - 1, jj + kl + ku);
    double s = rhs[jj];
    for (std::size_t c = jj + 1; c <= cmax; ++c) s -= at(jj, c) * rhs[c];
    rhs[jj] = s / at(jj, jj);
  }
  return rhs;
}

}  // namespace fracspec
