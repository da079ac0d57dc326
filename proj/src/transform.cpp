#include "fracspec/transform.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace fracspec {

namespace {

constexpr double kLog2 = std::numbers::ln2;

// log(1 + exp(z)) without overflow.
double softplus(double z) { return z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z)); }

// 1 / cosh(a)^2 without overflow.
double sech2(double a) {
  const double e = std::exp(-2.0 * std::abs(a));
  return 4.0 * e / ((1.0 + e) * (1.0 + e));
}

void check_unit(double v, const char* what) {
  if (!(std::abs(v) <= 1.0)) throw Error(std::string(what) + ": argument outside [-1, 1]");
}

}  // namespace

DoubleExpTransform::DoubleExpTransform(double w) : omega(w) {
  if (!(w >= kMinOmega) || !std::isfinite(w)) {
    throw Error("DoubleExpTransform: omega must be finite and >= 3.154");
  }
}

AlgebraicTransform::AlgebraicTransform(double b) : beta(b) {
  if (!(b > 0) || !std::isfinite(b)) throw Error("AlgebraicTransform: beta must be positive");
}

TransformKind kind(const Transform& t) noexcept {
  return std::holds_alternative<DoubleExpTransform>(t) ? TransformKind::double_exponential
                                                       : TransformKind::algebraic;
}

double parameter(const Transform& t) noexcept {
  if (const auto* de = std::get_if<DoubleExpTransform>(&t)) return de->omega;
  return std::get<AlgebraicTransform>(t).beta;
}

double forward(const Transform& t, double y) {
  check_unit(y, "forward");
  if (const auto* de = std::get_if<DoubleExpTransform>(&t)) {
    if (std::abs(y) == 1.0) return y;
    return std::tanh(0.5 * kPi * std::sinh(de->omega * y));
  }
  const double beta = std::get<AlgebraicTransform>(t).beta;
  if (y == 1.0) return 1.0;
  return 2.0 * std::pow(0.5 * (1.0 + y), 1.0 / beta) - 1.0;
}

double inverse(const Transform& t, double x) {
  check_unit(x, "inverse");
  if (const auto* de = std::get_if<DoubleExpTransform>(&t)) {
    if (std::abs(x) == 1.0) return x;
    const double y = std::asinh(2.0 / kPi * std::atanh(x)) / de->omega;
    return std::clamp(y, -1.0, 1.0);
  }
  const double beta = std::get<AlgebraicTransform>(t).beta;
  if (x == 1.0) return 1.0;
  return std::clamp(2.0 * std::pow(0.5 * (1.0 + x), beta) - 1.0, -1.0, 1.0);
}

double derivative(const Transform& t, double y) {
  check_unit(y, "derivative");
  if (const auto* de = std::get_if<DoubleExpTransform>(&t)) {
    const double w = de->omega;
    return 0.5 * kPi * w * std::cosh(w * y) * sech2(0.5 * kPi * std::sinh(w * y));
  }
  const double beta = std::get<AlgebraicTransform>(t).beta;
  return std::pow(0.5 * (1.0 + y), 1.0 / beta - 1.0) / beta;
}

double log1pm_psi(const DoubleExpTransform& t, double y, int sign) {
  check_unit(y, "log1pm_psi");
  const double s = sign >= 0 ? 1.0 : -1.0;
  return kLog2 - softplus(-s * kPi * std::sinh(t.omega * y));
}

double log_one_plus(const Transform& t, double y) {
  if (const auto* de = std::get_if<DoubleExpTransform>(&t)) return log1pm_psi(*de, y, +1);
  check_unit(y, "log_one_plus");
  const double beta = std::get<AlgebraicTransform>(t).beta;
  return kLog2 + (std::log1p(y) - kLog2) / beta;
}

double log_one_minus(const Transform& t, double y) {
  if (const auto* de = std::get_if<DoubleExpTransform>(&t)) return log1pm_psi(*de, y, -1);
  check_unit(y, "log_one_minus");
  const double beta = std::get<AlgebraicTransform>(t).beta;
  // 1 - psi = 2 (1 - ((1+y)/2)^{1/beta})
  return kLog2 + std::log(-std::expm1((std::log1p(y) - kLog2) / beta));
}

double select_omega(const SingularityInfo& info) {
  if (!(info.gamma > 0)) throw Error("select_omega: singularity order gamma must be positive");
  if (!(info.fnorm > 0) || !std::isfinite(info.fnorm)) {
    throw Error("select_omega: fnorm must be positive and finite");
  }
  const double scaled = kMachineEps * info.fnorm;
  const double log_scaled = std::log(scaled);
  // log(2 / scaled^{1/gamma} - 1) split to avoid overflow for small gamma
  const double term = kLog2 - log_scaled / info.gamma +
                      std::log1p(-0.5 * std::exp(log_scaled / info.gamma));
  return std::max(DoubleExpTransform::kMinOmega, std::asinh(term / kPi));
}

double select_omega(std::span<const SingularityInfo> infos) {
  if (infos.empty()) return DoubleExpTransform::kMinOmega;
  const auto it = std::min_element(infos.begin(), infos.end(),
                                   [](const auto& a, const auto& b) { return a.gamma < b.gamma; });
  return select_omega(*it);
}

TransformedPoint transformed_point(const Transform& t, double y) {
  return {y, forward(t, y), log_one_plus(t, y), log_one_minus(t, y)};
}

double estimate_sup_norm(const Transform& t,
                         const std::function<double(const TransformedPoint&)>& f) {
  double m = 0.0;
  for (double y : lobatto_points(257)) {
    const double v = std::abs(f(transformed_point(t, y)));
    if (std::isfinite(v)) m = std::max(m, v);
  }
  return m;
}

template <Scalar S>
ChebSeries<S> tcp_expand(const Transform& t, const std::function<S(const TransformedPoint&)>& f,
                         std::size_t degree) {
  const auto ys = lobatto_points(degree + 1);
  std::vector<S> values(ys.size());
  for (std::size_t k = 0; k < ys.size(); ++k) {
    TransformedPoint p = transformed_point(t, ys[k]);
    S v = f(p);
    const bool endpoint = std::abs(ys[k]) == 1.0;
    if (!is_finite(v) && endpoint) {
      p.x = std::nextafter(p.x, 0.0);
      if (p.x < 0) {
        p.log1px = std::log1p(p.x);
      } else {
        p.log1mx = std::log1p(-p.x);
      }
      v = f(p);
    }
    if (!is_finite(v)) throw Error("tcp_expand: non-finite function value at sample point");
    values[k] = v;
  }
  return values_to_coeffs<S>(values);
}

template <Scalar S>
S tcp_eval(const Transform& t, const ChebSeries<S>& series, double x) {
  return clenshaw_eval(series, inverse(t, x));
}

template ChebSeries<double> tcp_expand<double>(const Transform&,
                                               const std::function<double(const TransformedPoint&)>&,
                                               std::size_t);
template ChebSeries<cplx> tcp_expand<cplx>(const Transform&,
                                           const std::function<cplx(const TransformedPoint&)>&,
                                           std::size_t);
template double tcp_eval<double>(const Transform&, const ChebSeries<double>&, double);
template cplx tcp_eval<cplx>(const Transform&, const ChebSeries<cplx>&, double);

}  // namespace fracspec
