#pragma once

// Spectral approximation A of a fractional integral operator in a TCP basis:
// if u = sum c_n Q_n then I^mu[u] = sum (A c)_n Q_n. Column n of A holds the
// Chebyshev coefficients in y of I^mu[Q_n](psi(y)), built from the moment
// polynomials phi_n^j through a three-term recurrence solved in coefficient space.
//
// Thread-safety: every input (transform, kernel, tables) is read-only while
// the parallel sections in build_fio run; outputs are written per thread and
// reduced afterwards.

#include <cstddef>
#include <span>
#include <vector>

#include "fracspec/kernel.hpp"
#include "fracspec/quadrature.hpp"

namespace fracspec {

/// Columns n = 0..N of the Chebyshev coefficients of phi_n^j.
struct MomentTable {
  std::size_t j = 0;
  std::vector<ChebSeries<double>> columns;
};

struct InitialMoments {
  ChebSeries<double> phi0, phi1, phi2;
};

/// phi_0^j, phi_1^j, phi_2^j from h_0..h_{L+1} and the coefficients of g_j.
[[nodiscard]] InitialMoments initial_moments(const LowRankKernel& kernel, std::size_t j, Side side,
                                             std::span<const double> h);
[[nodiscard]] InitialMoments initial_moments(double mu, const LowRankKernel& kernel, std::size_t j,
                                             Side side);

/// Solves ((1+y)d/dy - n) phi_{n+1} = ((1+y)d/dy + n) phi_{n-1} + 2n phi_n (left) or
/// ((1-y)d/dy + n) phi_{n+1} = ((1-y)d/dy - n) phi_{n-1} + 2n phi_n (right),
/// with phi_{n+1}(+1) (left) or phi_{n+1}(-1) (right) equal to `boundary`.
/// The size-(n+2) truncation is recombined into a (1,2)-banded system.
/// Requires n >= 2 and ops.size >= n + 3.
[[nodiscard]] ChebSeries<double> recurrence_step(std::size_t n, const ChebSeries<double>& prev,
                                                 const ChebSeries<double>& cur, double boundary,
                                                 const UltraOps& ops, Side side);

/// phi_0^j..phi_N^j.
[[nodiscard]] MomentTable build_moment_table(double mu, const LowRankKernel& kernel, std::size_t j,
                                             std::size_t N, Side side);

struct BandProfile {
  std::size_t lower = 0;
  std::size_t upper = 0;
};

/// Smallest bandwidths containing every entry above rel_tol * max|m|.
template <class Derived>
[[nodiscard]] BandProfile measure_band_profile(const Eigen::MatrixBase<Derived>& m, double rel_tol = 1e-13) {
  BandProfile p;
  const double mx = m.cwiseAbs().maxCoeff();
  const double cut = rel_tol * mx;
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
      if (std::abs(m(i, j)) > cut) {
        if (i > j) p.lower = std::max(p.lower, static_cast<std::size_t>(i - j));
        if (j > i) p.upper = std::max(p.upper, static_cast<std::size_t>(j - i));
      }
    }
  }
  return p;
}

struct FIOApprox {
  Side side = Side::left;
  double mu = 0.0;
  Transform transform;
  std::size_t N = 0;
  Eigen::MatrixXd A;
  /// K + 1, where K bounds the degrees of the f_j and of (1 +- psi)^mu.
  std::size_t lower_bandwidth = 0;
  /// Empirical profile at 1e-13 relative.
  BandProfile profile;
  std::size_t kernel_rank = 0;
  std::size_t kernel_K = 0;
  std::size_t kernel_L = 0;
};

/// TCP coefficients of (1 + psi)^mu (left) or (1 - psi)^mu (right), length N.
[[nodiscard]] std::vector<double> endpoint_power_coeffs(const Transform& t, double mu, Side side,
                                                        std::size_t N);

/// Assembles A from precomputed moment tables (one per kernel column).
[[nodiscard]] FIOApprox assemble(double mu, const Transform& t, const LowRankKernel& kernel,
                                 std::span<const MomentTable> tables, std::size_t N, Side side);

/// Full construction: moments, boundary data and recurrence streamed per column,
/// without materialising the moment tables. `threads` > 1 splits the kernel columns.
[[nodiscard]] FIOApprox build_fio(const Transform& t, double mu, Side side, std::size_t N,
                                  const LowRankKernel& kernel, int threads = 1);
/// Builds the kernel first (exact factorization for algebraic/left, ACA otherwise).
[[nodiscard]] FIOApprox build_fio(const Transform& t, double mu, Side side, std::size_t N,
                                  const KernelOptions& opts = {}, int threads = 1);

/// The kernel build_fio would use.
[[nodiscard]] LowRankKernel make_kernel(const Transform& t, double mu, Side side,
                                        const KernelOptions& opts = {});

/// (A_left + A_right) / (2 cos(pi mu / 2)); mu within 1e-8 of an odd integer is rejected.
[[nodiscard]] FIOApprox build_riesz(double mu, const Transform& t, std::size_t N,
                                    const KernelOptions& opts = {}, int threads = 1);
[[nodiscard]] FIOApprox riesz_combine(const FIOApprox& left, const FIOApprox& right);
[[nodiscard]] double riesz_factor(double mu);

}  // namespace fracspec
