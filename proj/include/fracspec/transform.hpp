#pragma once

// Monotone variable transforms x = psi(y) of [-1,1] onto itself and the
// transplanted Chebyshev (TCP) expansions built on them:
//   Q_n(x) = T_n(psi^{-1}(x)),  so expanding f in Q_n is expanding f(psi(y)) in T_n.

#include <cmath>
#include <concepts>
#include <limits>
#include <cstddef>
#include <functional>
#include <span>
#include <variant>
#include <vector>

#include "fracspec/chebcore.hpp"

namespace fracspec {

/// psi(y) = tanh(pi/2 sinh(omega y)), numerically onto [-1,1] for omega >= 3.154.
struct DoubleExpTransform {
  static constexpr double kMinOmega = 3.154;
  double omega = kMinOmega;

  DoubleExpTransform() = default;
  explicit DoubleExpTransform(double w);
};

/// psi(y) = 2((1+y)/2)^{1/beta} - 1, singularity of order beta at x = -1.
struct AlgebraicTransform {
  double beta = 1.0;

  AlgebraicTransform() = default;
  explicit AlgebraicTransform(double b);
};

// New transforms are added as variant alternatives with the same free-function set.
using Transform = std::variant<DoubleExpTransform, AlgebraicTransform>;

enum class TransformKind { double_exponential, algebraic };
[[nodiscard]] TransformKind kind(const Transform& t) noexcept;
/// omega for the double-exponential transform, beta for the algebraic one.
[[nodiscard]] double parameter(const Transform& t) noexcept;

[[nodiscard]] double forward(const Transform& t, double y);
[[nodiscard]] double inverse(const Transform& t, double x);
[[nodiscard]] double derivative(const Transform& t, double y);
/// log(1 + psi(y)) and log(1 - psi(y)) without cancellation.
[[nodiscard]] double log_one_plus(const Transform& t, double y);
[[nodiscard]] double log_one_minus(const Transform& t, double y);

/// log(1 +- psi(y)) = log 2 - log(1 + exp(-+ pi sinh(omega y))); sign is +1 or -1.
[[nodiscard]] double log1pm_psi(const DoubleExpTransform& t, double y, int sign);

/// Weak endpoint singularity f ~ (1+x)^gamma (or (1-x)^gamma) and a bound on |f|.
/// gamma = +infinity declares a smooth function.
struct SingularityInfo {
  double gamma = std::numeric_limits<double>::infinity();
  double fnorm = 1.0;
};

/// Smallest omega >= 3.154 resolving the declared singularity to eps * ||f||.
[[nodiscard]] double select_omega(const SingularityInfo& info);
/// Uses the minimum gamma (and the matching fnorm) over all declared singularities.
[[nodiscard]] double select_omega(std::span<const SingularityInfo> infos);

/// Everything a sampled function may need at a transplanted grid point. The
/// log fields give 1 +- x to full relative accuracy near the endpoints.
struct TransformedPoint {
  double y;
  double x;
  double log1px;  // log(1 + x)
  double log1mx;  // log(1 - x)

  [[nodiscard]] double pow1p(double kappa) const { return std::exp(kappa * log1px); }
  [[nodiscard]] double pow1m(double kappa) const { return std::exp(kappa * log1mx); }
  [[nodiscard]] double one_plus_x() const { return std::exp(log1px); }
  [[nodiscard]] double one_minus_x() const { return std::exp(log1mx); }
};

[[nodiscard]] TransformedPoint transformed_point(const Transform& t, double y);

/// Maximum |f| over a 257-point Chebyshev sample of f(psi(y)).
[[nodiscard]] double estimate_sup_norm(const Transform& t,
                                       const std::function<double(const TransformedPoint&)>& f);

/// TCP coefficients Q_0..Q_degree of f by interpolating f(psi(y)) at the
/// degree+1 Lobatto points. Non-finite endpoint samples are replaced by the
/// value just inside the interval; non-finite interior samples are an error.
template <Scalar S>
[[nodiscard]] ChebSeries<S> tcp_expand(const Transform& t,
                                       const std::function<S(const TransformedPoint&)>& f,
                                       std::size_t degree);

template <Scalar S>
[[nodiscard]] ChebSeries<S> tcp_expand_x(const Transform& t, const std::function<S(double)>& f,
                                         std::size_t degree) {
  return tcp_expand<S>(t, [&f](const TransformedPoint& p) { return f(p.x); }, degree);
}

/// sum c_n Q_n(x).
template <Scalar S>
[[nodiscard]] S tcp_eval(const Transform& t, const ChebSeries<S>& series, double x);

}  // namespace fracspec
