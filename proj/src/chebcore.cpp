#include "fracspec/chebcore.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>

namespace fracspec {

std::string_view to_string(Side side) {
  switch (side) {
    case Side::left: return "left";
    case Side::right: return "right";
    case Side::riesz: return "riesz";
  }
  return "?";
}

Side side_from_string(std::string_view name) {
  if (name == "left") return Side::left;
  if (name == "right") return Side::right;
  if (name == "riesz") return Side::riesz;
  throw Error("unknown side '" + std::string(name) + "' (expected left, right or riesz)");
}

template <Scalar S>
std::size_t ChebSeries<S>::degree() const noexcept {
  for (std::size_t n = coeffs.size(); n-- > 0;) {
    if (std::abs(coeffs[n]) > 0) return n;
  }
  return 0;
}

template <Scalar S>
S ChebSeries<S>::operator()(double y) const {
  return clenshaw_eval(*this, y);
}

std::vector<double> lobatto_points(std::size_t n_points) {
  if (n_points == 0) throw Error("lobatto_points: need at least one point");
  if (n_points == 1) return {1.0};
  const std::size_t n = n_points - 1;
  std::vector<double> pts(n_points);
  // sin form keeps the points exactly antisymmetric
  for (std::size_t k = 0; k <= n; ++k) {
    const double m = static_cast<double>(n) - 2.0 * static_cast<double>(k);
    pts[k] = std::sin(kPi * m / (2.0 * static_cast<double>(n)));
  }
  return pts;
}

namespace {

// FFTW plans are cached per length; planning is not thread safe, execution is.
class Dct1Plans {
 public:
  static Dct1Plans& instance() {
    static Dct1Plans plans;
    return plans;
  }

  // In-place-style REDFT00 of length n (n >= 2) on `data`.
  void run(std::vector<double>& data) {
    const int n = static_cast<int>(data.size());
    double* in = fftw_alloc_real(data.size());
    double* out = fftw_alloc_real(data.size());
    std::copy(data.begin(), data.end(), in);
    fftw_plan plan = get(n);
    fftw_execute_r2r(plan, in, out);
    std::copy(out, out + n, data.begin());
    fftw_free(in);
    fftw_free(out);
  }

  ~Dct1Plans() {
    for (auto& [n, p] : plans_) fftw_destroy_plan(p);
  }

 private:
  fftw_plan get(int n) {
    std::lock_guard lock(mutex_);
    auto it = plans_.find(n);
    if (it != plans_.end()) return it->second;
    double* in = fftw_alloc_real(static_cast<std::size_t>(n));
    double* out = fftw_alloc_real(static_cast<std::size_t>(n));
    fftw_plan p = fftw_plan_r2r_1d(n, in, out, FFTW_REDFT00, FFTW_ESTIMATE);
    fftw_free(in);
    fftw_free(out);
    plans_.emplace(n, p);
    return p;
  }

  std::mutex mutex_;
  std::map<int, fftw_plan> plans_;
};

std::vector<double> real_values_to_coeffs(std::vector<double> v) {
  const std::size_t np = v.size();
  if (np == 1) return v;
  const double n = static_cast<double>(np - 1);
  Dct1Plans::instance().run(v);
  for (auto& c : v) c /= n;
  v.front() *= 0.5;
  v.back() *= 0.5;
  return v;
}

std::vector<double> real_coeffs_to_values(std::vector<double> c) {
  const std::size_t np = c.size();
  if (np == 1) return c;
  // REDFT00 of (c0, c1/2, ..., c_{N-1}/2, cN) gives sum c_n cos(n k pi / N).
  for (std::size_t n = 1; n + 1 < np; ++n) c[n] *= 0.5;
  Dct1Plans::instance().run(c);
  return c;
}

}  // namespace

template <Scalar S>
ChebSeries<S> values_to_coeffs(std::span<const S> values) {
  if (values.empty()) throw Error("values_to_coeffs: empty input");
  if constexpr (std::same_as<S, double>) {
    return ChebSeries<double>(real_values_to_coeffs({values.begin(), values.end()}));
  } else {
    std::vector<double> re(values.size()), im(values.size());
    for (std::size_t k = 0; k < values.size(); ++k) {
      re[k] = values[k].real();
      im[k] = values[k].imag();
    }
    re = real_values_to_coeffs(std::move(re));
    im = real_values_to_coeffs(std::move(im));
    std::vector<cplx> c(values.size());
    for (std::size_t k = 0; k < c.size(); ++k) c[k] = {re[k], im[k]};
    return ChebSeries<cplx>(std::move(c));
  }
}

template <Scalar S>
std::vector<S> coeffs_to_values(const ChebSeries<S>& series) {
  if (series.kind != ChebKind::first) throw Error("coeffs_to_values: first-kind series required");
  const auto& c = series.coeffs;
  if constexpr (std::same_as<S, double>) {
    return real_coeffs_to_values(c);
  } else {
    std::vector<double> re(c.size()), im(c.size());
    for (std::size_t k = 0; k < c.size(); ++k) {
      re[k] = c[k].real();
      im[k] = c[k].imag();
    }
    re = real_coeffs_to_values(std::move(re));
    im = real_coeffs_to_values(std::move(im));
    std::vector<cplx> v(c.size());
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = {re[k], im[k]};
    return v;
  }
}

template <Scalar S>
S clenshaw_T(std::span<const S> c, double y) noexcept {
  S b1(0), b2(0);
  for (std::size_t n = c.size(); n-- > 1;) {
    const S b0 = c[n] + 2.0 * y * b1 - b2;
    b2 = b1;
    b1 = b0;
  }
  return c[0] + y * b1 - b2;
}

template <Scalar S>
S clenshaw_eval(const ChebSeries<S>& series, double y) {
  if (!(std::abs(y) <= 1.0 + 1e-12)) throw Error("clenshaw_eval: argument outside [-1, 1]");
  const std::span<const S> c(series.coeffs);
  if (series.kind == ChebKind::first) return clenshaw_T(c, y);
  // U_n obeys the same recurrence with U_0 = 1, U_1 = 2y.
  S b1(0), b2(0);
  for (std::size_t n = c.size(); n-- > 0;) {
    const S b0 = c[n] + 2.0 * y * b1 - b2;
    b2 = b1;
    b1 = b0;
  }
  return b1;
}

template <Scalar S>
void cheb_product_accumulate(std::span<const S> a, std::span<const S> b, S alpha,
                             std::span<S> out) noexcept {
  const std::size_t m = out.size();
  const S half = 0.5 * alpha;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const S ak = half * a[k];
    if (ak == S(0)) continue;
    // T_{k+j}
    const std::size_t jmax_sum = k >= m ? 0 : std::min(b.size(), m - k);
    for (std::size_t j = 0; j < jmax_sum; ++j) out[k + j] += ak * b[j];
    // T_{|k-j|}
    for (std::size_t j = 0; j < b.size(); ++j) {
      const std::size_t idx = k >= j ? k - j : j - k;
      if (idx < m) out[idx] += ak * b[j];
    }
  }
}

template <Scalar S>
std::vector<S> cheb_product(std::span<const S> a, std::span<const S> b) {
  if (a.empty() || b.empty()) throw Error("cheb_product: empty operand");
  std::vector<S> out(a.size() + b.size() - 1, S(0));
  cheb_product_accumulate<S>(a, b, S(1), out);
  return out;
}

BandedMatrix::BandedMatrix(std::size_t n, std::size_t kl, std::size_t ku)
    : n_(n), kl_(kl), ku_(ku), diag_((kl + ku + 1) * n, 0.0) {}

double BandedMatrix::operator()(std::size_t i, std::size_t j) const noexcept {
  if (i >= n_ || j >= n_) return 0.0;
  if (j + kl_ < i || i + ku_ < j) return 0.0;
  const std::size_t d = j + kl_ - i;
  return diag_[d * n_ + j];
}

void BandedMatrix::set(std::size_t i, std::size_t j, double v) {
  if (i >= n_ || j >= n_ || j + kl_ < i || i + ku_ < j) {
    throw Error("BandedMatrix::set: entry outside band");
  }
  diag_[(j + kl_ - i) * n_ + j] = v;
}

std::vector<double> BandedMatrix::apply(std::span<const double> x) const {
  if (x.size() != n_) throw Error("BandedMatrix::apply: dimension mismatch");
  std::vector<double> y(n_, 0.0);
  for (std::size_t i = 0; i < n_; ++i) {
    const std::size_t j0 = i > kl_ ? i - kl_ : 0;
    const std::size_t j1 = std::min(n_ - 1, i + ku_);
    double s = 0.0;
    for (std::size_t j = j0; j <= j1; ++j) s += (*this)(i, j) * x[j];
    y[i] = s;
  }
  return y;
}

Eigen::MatrixXd BandedMatrix::dense() const {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n_), static_cast<Eigen::Index>(n_));
  for (std::size_t i = 0; i < n_; ++i) {
    for (std::size_t j = (i > kl_ ? i - kl_ : 0); j <= std::min(n_ - 1, i + ku_); ++j) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = (*this)(i, j);
    }
  }
  return m;
}

BandedMatrix BandedMatrix::operator*(const BandedMatrix& rhs) const {
  const std::size_t n = std::min(n_, rhs.n_);
  BandedMatrix out(n, kl_ + rhs.kl_, ku_ + rhs.ku_);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t k0 = i > kl_ ? i - kl_ : 0;
    const std::size_t k1 = std::min(n - 1, i + ku_);
    for (std::size_t k = k0; k <= k1; ++k) {
      const double a = (*this)(i, k);
      if (a == 0.0) continue;
      const std::size_t j0 = k > rhs.kl_ ? k - rhs.kl_ : 0;
      const std::size_t j1 = std::min(n - 1, k + rhs.ku_);
      for (std::size_t j = j0; j <= j1; ++j) {
        out.diag_[(j + out.kl_ - i) * n + j] += a * rhs(k, j);
      }
    }
  }
  return out;
}

UltraOps build_ultra_ops(std::size_t size) {
  if (size < 2) throw Error("build_ultra_ops: size must be at least 2");
  UltraOps ops;
  ops.size = size;
  ops.D = BandedMatrix(size, 0, 1);
  ops.S = BandedMatrix(size, 0, 2);
  ops.Mplus = BandedMatrix(size, 1, 1);
  ops.Mminus = BandedMatrix(size, 1, 1);
  for (std::size_t n = 1; n < size; ++n) ops.D.set(n - 1, n, static_cast<double>(n));
  ops.S.set(0, 0, 1.0);
  for (std::size_t n = 1; n < size; ++n) ops.S.set(n, n, 0.5);
  for (std::size_t n = 2; n < size; ++n) ops.S.set(n - 2, n, -0.5);
  // y U_n = (U_{n+1} + U_{n-1}) / 2
  for (std::size_t n = 0; n < size; ++n) {
    ops.Mplus.set(n, n, 1.0);
    ops.Mminus.set(n, n, 1.0);
    if (n + 1 < size) {
      ops.Mplus.set(n + 1, n, 0.5);
      ops.Mminus.set(n + 1, n, -0.5);
    }
    if (n >= 1) {
      ops.Mplus.set(n - 1, n, 0.5);
      ops.Mminus.set(n - 1, n, -0.5);
    }
  }
  return ops;
}

#define FRACSPEC_INSTANTIATE(S)                                                                   \
  template struct ChebSeries<S>;                                                                \
  template ChebSeries<S> values_to_coeffs<S>(std::span<const S>);                               \
  template std::vector<S> coeffs_to_values<S>(const ChebSeries<S>&);                            \
  template S clenshaw_eval<S>(const ChebSeries<S>&, double);                                    \
  template S clenshaw_T<S>(std::span<const S>, double) noexcept;                                \
  template std::vector<S> cheb_product<S>(std::span<const S>, std::span<const S>);              \
  template void cheb_product_accumulate<S>(std::span<const S>, std::span<const S>, S, std::span<S>) noexcept;

FRACSPEC_INSTANTIATE(double)
FRACSPEC_INSTANTIATE(cplx)
#undef FRACSPEC_INSTANTIATE

}  // namespace fracspec
