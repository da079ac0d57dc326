#pragma once

#include <complex>
#include <concepts>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace fracspec {

using cplx = std::complex<double>;

/// Real or complex double precision; the only scalar fields the library supports.
template <class S>
concept Scalar = std::same_as<S, double> || std::same_as<S, cplx>;

template <Scalar S>
using Vec = Eigen::Matrix<S, Eigen::Dynamic, 1>;
template <Scalar S>
using Mat = Eigen::Matrix<S, Eigen::Dynamic, Eigen::Dynamic>;

inline constexpr double kMachineEps = std::numeric_limits<double>::epsilon();
inline constexpr double kPi = 3.14159265358979323846;

/// Which fractional integral: left-sided (lower limit -1), right-sided
/// (upper limit +1) or the symmetric Riesz combination.
enum class Side { left, right, riesz };

std::string_view to_string(Side side);
Side side_from_string(std::string_view name);

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A linear system was singular or too ill-conditioned to trust.
class SingularSystemError : public Error {
 public:
  SingularSystemError(const std::string& what, double condition_estimate)
      : Error(what), condition_estimate_(condition_estimate) {}
  [[nodiscard]] double condition_estimate() const noexcept { return condition_estimate_; }

 private:
  double condition_estimate_;
};

template <Scalar S>
[[nodiscard]] inline bool is_finite(S v) {
  if constexpr (std::same_as<S, double>) {
    return std::isfinite(v);
  } else {
    return std::isfinite(v.real()) && std::isfinite(v.imag());
  }
}

}  // namespace fracspec
