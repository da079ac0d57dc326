#pragma once

// Independent reference evaluations for the tests: adaptive quadrature of the
// defining integrals, never the library's own recurrences.

#include <algorithm>
#include <cmath>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "fracspec/transform.hpp"

namespace oracle {

using fracspec::Side;
using fracspec::Transform;

inline double T(std::size_t n, double s) {
  s = std::clamp(s, -1.0, 1.0);
  return std::cos(static_cast<double>(n) * std::acos(s));
}

inline double U(std::size_t n, double s) {
  // U_n(s) = sin((n+1) theta) / sin(theta), with the endpoint limits
  s = std::clamp(s, -1.0, 1.0);
  const double th = std::acos(s);
  const double st = std::sin(th);
  if (st < 1e-12) {
    const double sign = (s < 0 && n % 2 == 1) ? -1.0 : 1.0;
    return sign * static_cast<double>(n + 1);
  }
  return std::sin(static_cast<double>(n + 1) * th) / st;
}

/// Q_n(s) = T_n(psi^{-1}(s)).
inline double Q(const Transform& t, std::size_t n, double s) {
  return T(n, fracspec::inverse(t, std::clamp(s, -1.0, 1.0)));
}

/// psi^{-1}(s) from opx = 1 + s and omx = 1 - s, both to full relative accuracy.
inline double inverse_from_gaps(const Transform& t, double opx, double omx) {
  if (const auto* de = std::get_if<fracspec::DoubleExpTransform>(&t)) {
    if (opx <= 0.0) return -1.0;
    if (omx <= 0.0) return 1.0;
    // tanh(a) = s  <=>  2a = log(opx / omx)
    const double a2 = std::log(opx) - std::log(omx);
    return std::clamp(std::asinh(a2 / fracspec::kPi) / de->omega, -1.0, 1.0);
  }
  const double beta = std::get<fracspec::AlgebraicTransform>(t).beta;
  return std::clamp(2.0 * std::pow(0.5 * opx, beta) - 1.0, -1.0, 1.0);
}

/// I^mu[Q_n] at x = psi(y) by panelled tanh-sinh after s = x -+ (1 +- x) w^{1/mu}.
/// The distances 1 +- s are carried separately so points within rounding of +-1
/// keep their position in y.
inline double fractional_integral_of_Q(const Transform& t, double mu, Side side, std::size_t n, double y) {
  const double opx = std::exp(fracspec::log_one_plus(t, y));
  const double omx = std::exp(fracspec::log_one_minus(t, y));
  const double d = side == Side::left ? opx : omx;
  if (d == 0.0) return 0.0;
  auto f = [&](double w) {
    const double v = std::pow(w, 1.0 / mu);
    const double one_minus_v = w >= 1.0 ? 0.0 : -std::expm1(std::log(w) / mu);
    if (side == Side::left) return T(n, inverse_from_gaps(t, d * one_minus_v, omx + d * v));
    return T(n, inverse_from_gaps(t, opx + d * v, d * one_minus_v));
  };
  double inner = 1.0;
  if (n > 0) {
    boost::math::quadrature::tanh_sinh<double> ts;
    const int panels = 8;
    inner = 0.0;
    for (int k = 0; k < panels; ++k) inner += ts.integrate(f, double(k) / panels, double(k + 1) / panels, 1e-13);
  }
  return std::pow(d, mu) / std::tgamma(1.0 + mu) * inner;
}

/// int_0^1 t^mu f(t) dt, tanh-sinh on 64 panels so oscillatory f stays resolved.
template <class F>
double weighted_integral(double mu, F&& f) {
  boost::math::quadrature::tanh_sinh<double> ts;
  const int panels = 64;
  double s = 0.0;
  for (int k = 0; k < panels; ++k) {
    s += ts.integrate([&](double t) { return std::pow(t, mu) * f(t); }, double(k) / panels, double(k + 1) / panels, 1e-15);
  }
  return s;
}

/// phi_n(y) = int_0^1 t^mu U_{n-1}(y - (1+y) t) g(t) dt (left) or
/// int_0^1 t^mu U_{n-1}(y + (1-y) t) g(t) dt (right).
template <class G>
double moment_polynomial(double mu, std::size_t n, double y, Side side, G&& g) {
  if (n == 0) return 0.0;
  return weighted_integral(mu, [&](double t) {
    const double s = side == Side::left ? y - (1.0 + y) * t : y + (1.0 - y) * t;
    return U(n - 1, s) * g(t);
  });
}

}  // namespace oracle
