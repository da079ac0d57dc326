#pragma once

// The bivariate kernel
//   G(y,t) = ((psi(y) - psi(y - (1+y)t)) / t)^mu          (left)
//   G(y,t) = ((psi(y + (1-y)t) - psi(y)) / t)^mu          (right)
// on [-1,1] x [0,1], and its separable approximation sum_j sigma_j f_j(y) g_j(t).

#include <cstddef>
#include <vector>

#include "fracspec/transform.hpp"

namespace fracspec {

/// Rank-r separable kernel. f_j are first-kind series in y, g_j are
/// first-kind series in s = 2t - 1.
struct LowRankKernel {
  std::vector<double> sigma;
  std::vector<ChebSeries<double>> fcols;
  std::vector<ChebSeries<double>> gcols;
  double mu = 0.0;
  Side side = Side::left;
  std::size_t K = 0;
  std::size_t L = 0;
  /// Max-norm of the residual on the build grid, relative to max |G|.
  double residual = 0.0;

  [[nodiscard]] std::size_t rank() const noexcept { return sigma.size(); }
  [[nodiscard]] double operator()(double y, double t) const;
};

/// Raised when the cross approximation stalls at its rank cap.
class AcaError : public Error {
 public:
  AcaError(const std::string& what, double achieved, std::size_t rank)
      : Error(what), achieved_(achieved), rank_(rank) {}
  [[nodiscard]] double achieved_residual() const noexcept { return achieved_; }
  [[nodiscard]] std::size_t rank() const noexcept { return rank_; }

 private:
  double achieved_;
  std::size_t rank_;
};

/// Cancellation-free evaluation of G; at t = 0 returns ((1 +- y) psi'(y))^mu.
[[nodiscard]] double eval_G(const Transform& t, double mu, Side side, double y, double tt);

/// Exact rank-1 factorization for the algebraic transform (left side).
[[nodiscard]] LowRankKernel algebraic_factorization(double beta, double mu);

struct KernelOptions {
  std::size_t K = 0;         // 0 selects default_kernel_degree(mu)
  std::size_t L = 0;         // 0 selects K
  double tol = 1e-13;        // relative max-norm residual target
  std::size_t max_rank = 0;  // 0 selects 5 * table_rank(mu)
  /// When false, stopping at max_rank is accepted instead of raising AcaError.
  bool require_tolerance = true;
};

/// Rank and degree of a kernel approximation adequate for order mu,
/// interpolated in log10(mu) from (1, 28, 80), (1e-1, 40, 100), (1e-2, 50, 120),
/// (1e-3, 58, 170), (1e-4, 64, 350), (1e-5, 65, 660), (1e-6, 64, 920).
[[nodiscard]] std::size_t table_rank(double mu);
[[nodiscard]] std::size_t table_degree(double mu);
/// max(100, table_degree(mu)).
[[nodiscard]] std::size_t default_kernel_degree(double mu);

/// Cross approximation of G on the (K+1) x (L+1) Chebyshev tensor grid with
/// full-grid greedy pivoting.
[[nodiscard]] LowRankKernel aca_approximate(const Transform& t, double mu, Side side,
                                            const KernelOptions& opts = {});

}  // namespace fracspec
