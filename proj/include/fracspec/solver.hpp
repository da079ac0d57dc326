#pragma once

// Drivers: fractional integral equations with adaptive truncation, the
// fractional Airy problem via integral reformulation, the two-order
// eigenproblem, and solve-then-discretize pseudospectra.

#include <cstddef>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <tuple>
#include <vector>

#include "fracspec/opalgebra.hpp"

namespace fracspec {

using RealFn = std::function<double(const TransformedPoint&)>;

/// a(x) * I^mu_side[ b(.) u ](x); mu == 0 denotes the identity, empty a or b mean 1.
struct Term {
  double mu = 0.0;
  Side side = Side::left;
  RealFn a;
  RealFn b;
  KernelOptions kernel;
};

struct TruncationPolicy {
  std::size_t n_start = 64;
  std::size_t n_max = 1024;
  /// Cauchy tolerance on consecutive solutions.
  double tol = 1e-13;
  std::size_t eval_points = 1000;
  /// Keep doubling to n_max after the tolerance is met (records the plateau).
  bool full_sweep = false;
  double max_condition = 1e13;
};

struct ProblemSpec {
  std::vector<Term> terms;
  RealFn rhs;
  /// Explicit transform; otherwise omega is selected from `singularities`.
  std::optional<Transform> transform;
  std::vector<SingularityInfo> singularities;
  TruncationPolicy policy;
  int threads = 1;
};

struct ConvergenceRecord {
  std::size_t N = 0;
  /// Max difference from the previous truncation on the evaluation grid (inf for the first).
  double cauchy_error = 0.0;
  double residual = 0.0;
  double condition = 0.0;
};

template <Scalar S>
struct Solution {
  ChebSeries<S> coeffs;
  Transform transform;
  std::size_t N_final = 0;
  std::vector<ConvergenceRecord> history;
  double residual = 0.0;
  double condition = 0.0;
  bool converged = false;

  [[nodiscard]] S operator()(double x) const { return tcp_eval<S>(transform, coeffs, x); }
};

/// Truncation budget exhausted before the Cauchy tolerance was met.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, std::vector<ConvergenceRecord> history)
      : Error(what), history_(std::move(history)) {}
  [[nodiscard]] const std::vector<ConvergenceRecord>& history() const noexcept { return history_; }

 private:
  std::vector<ConvergenceRecord> history_;
};

/// Kernels keyed by (mu, side), shared across truncation sizes. Thread-safe.
class OperatorCache {
 public:
  explicit OperatorCache(Transform t, int threads = 1) : transform_(std::move(t)), threads_(threads) {}

  [[nodiscard]] const Transform& transform() const noexcept { return transform_; }
  [[nodiscard]] std::shared_ptr<const LowRankKernel> kernel(double mu, Side side, const KernelOptions& opts = {});
  /// Left, right or Riesz operator at truncation N.
  [[nodiscard]] FIOApprox fio(double mu, Side side, std::size_t N, const KernelOptions& opts = {});

 private:
  Transform transform_;
  int threads_;
  std::mutex mutex_;
  std::map<std::tuple<double, int, std::size_t, std::size_t, double, std::size_t>, std::shared_ptr<const LowRankKernel>> kernels_;
};

/// TCP coefficients of f, interpolated at a larger degree and truncated to N.
template <Scalar S>
[[nodiscard]] Vec<S> tcp_coeffs(const Transform& t, const std::function<S(const TransformedPoint&)>& f,
                                std::size_t N);

/// Equispaced evaluation grid on [-1, 1].
[[nodiscard]] std::vector<double> equispaced(std::size_t n);

template <Scalar S>
[[nodiscard]] double max_difference(const Transform& t, const ChebSeries<S>& a, const ChebSeries<S>& b,
                                    std::span<const double> xs);

[[nodiscard]] Transform resolve_transform(const ProblemSpec& spec);

/// Sum of a_l I^{mu_l}[b_l .] truncated to N.
[[nodiscard]] Eigen::MatrixXd assemble_operator(const ProblemSpec& spec, OperatorCache& cache, std::size_t N);

/// One solve at fixed truncation N (no Cauchy check).
[[nodiscard]] Solution<double> solve_at(const ProblemSpec& spec, OperatorCache& cache, std::size_t N);

/// Solves the equation at N = n_start, 2 n_start, ... until the Cauchy error
/// drops below policy.tol. Throws ConvergenceError if it never does.
[[nodiscard]] Solution<double> solve_fie(const ProblemSpec& spec);
[[nodiscard]] Solution<double> solve_fie(const ProblemSpec& spec, OperatorCache& cache);

enum class AiryAnsatz {
  /// u = I^{3/2}[v] + a (1 + x)^{1/2}; (1 + x)^{1/2} spans the kernel of D^{3/2}
  /// under u(-1) = 0, giving a second-kind system eps i^{3/2} v - x I^{3/2}[v] = a x (1 + x)^{1/2}.
  sqrt,
  /// u = I^{3/2}[v] + a (1 + x), multiplied through by (1 + x)^{1/2}.
  linear,
};

struct AiryOptions {
  TruncationPolicy policy{64, 2048, 1e-10, 1000, false, 1e13};
  AiryAnsatz ansatz = AiryAnsatz::sqrt;
  std::optional<double> omega;
  int threads = 1;
};

struct AiryResult {
  Solution<cplx> u;
  ChebSeries<cplx> v;
  cplx a{0.0, 0.0};
  double residual_left = 0.0;   // |u(-1)|
  double residual_right = 0.0;  // |u(1) - 1|
};

/// eps i^{3/2} D^{3/2} u - x u = 0 on [-1, 1], u(-1) = 0, u(1) = 1 (Riemann-Liouville D).
[[nodiscard]] AiryResult solve_fde_airy(double epsilon, const AiryOptions& opts = {});

struct EigenOptions {
  /// Rows to report; a complex-conjugate pair is one row.
  std::size_t k = 6;
  std::size_t n_start = 64;
  std::size_t n_max = 1024;
  double plateau_tol = 1e-10;
  double tail_tol = 1e-12;
  std::optional<double> omega;
  int threads = 1;
};

struct EigenPlateauRecord {
  std::size_t N = 0;
  double cauchy_error = 0.0;  // 2-norm of the eigenvalue change (inf for the first)
  double max_tail = 0.0;      // largest relative eigenvector tail
};

struct EigenRow {
  cplx lambda;
  bool pair = false;  // lambda and conj(lambda)
};

struct EigenResult {
  std::vector<EigenRow> rows;
  /// Operator eigenvalues rho = 1 / lambda, all members of every pair.
  std::vector<cplx> rho;
  /// Coefficient vectors, one column per row.
  Mat<cplx> vectors;
  std::vector<double> eigen_residuals;
  std::vector<EigenPlateauRecord> history;
  double theta = 0.0;
  std::size_t N_final = 0;
  bool converged = false;
  Transform transform;
};

/// Gamma(mu1 - mu2) / Gamma(mu1) * 2^{1 + mu2 - mu1}.
[[nodiscard]] double eigen_theta(double mu1, double mu2);

/// The truncated operator theta v B A1 - A2 at size N.
[[nodiscard]] Eigen::MatrixXd eigen_operator(double mu1, double mu2, OperatorCache& cache, std::size_t N);

/// Raised when no plateau is reached by n_max; carries the last truncation.
class EigenConvergenceError : public Error {
 public:
  EigenConvergenceError(const std::string& what, EigenResult partial)
      : Error(what), partial_(std::move(partial)) {}
  [[nodiscard]] const EigenResult& partial() const noexcept { return partial_; }

 private:
  EigenResult partial_;
};

/// D^{mu1} u = -lambda u, u^{(j)}(-1) = 0 (j <= l - 2), D^{mu2} u(1) = 0.
[[nodiscard]] EigenResult solve_eigen(double mu1, double mu2, const EigenOptions& opts = {});

struct PseudospectraJob {
  double re_lo = -2.0, re_hi = 12.0, im_lo = -7.0, im_hi = 7.0;
  std::size_t n_re = 141, n_im = 141;
  double mu = 0.5;
  std::size_t lanczos_max_iter = 200;
  double lanczos_tol = 1e-8;
  std::size_t n_start = 32;
  std::size_t n_max = 256;
  /// Relative agreement of consecutive truncations required per point.
  double truncation_tol = 1e-8;
  std::optional<double> omega;
  int threads = 1;
};

struct PseudoPoint {
  cplx z;
  /// 1 / sqrt(lambda_max(R*(z) R(z))).
  double value = 0.0;
  bool flagged = false;
  std::size_t N = 0;
  std::size_t iterations = 0;
};

/// Resolvent of the Caputo derivative of order mu on [0, 1], applied through
/// (z I_l - Id) v = I_l u and (conj(z) I_r - Id) w = I_r v in a shared DE basis.
class ResolventContext {
 public:
  ResolventContext(double mu, std::size_t n_max, std::optional<double> omega = {}, int threads = 1,
                   double gram_cutoff = 1e-12);

  struct Estimate {
    double lambda_max = 0.0;
    std::size_t iterations = 0;
    bool converged = false;
  };

  /// Lanczos estimate of lambda_max(R* R) at truncation N, in L2-orthonormal
  /// coordinates on the span of Gram eigenvectors above gram_cutoff * max.
  [[nodiscard]] Estimate lanczos(cplx z, std::size_t N, std::size_t max_iter = 200, double tol = 1e-8) const;
  /// Largest squared singular value of the truncated resolvent in the L2 norm (dense oracle).
  [[nodiscard]] double dense_lambda_max(cplx z, std::size_t N) const;
  /// Gram matrix of Q_0..Q_{N-1} in L2(-1, 1).
  [[nodiscard]] Eigen::MatrixXd gram(std::size_t N) const;
  [[nodiscard]] std::size_t n_max() const noexcept { return n_max_; }
  [[nodiscard]] const Transform& transform() const noexcept { return transform_; }

 private:
  struct Coordinates {
    Eigen::MatrixXd C;     // k x N, C^T C = G on the retained span
    Eigen::MatrixXd Cinv;  // N x k, C Cinv = Id
  };
  [[nodiscard]] const Coordinates& coordinates(std::size_t N) const;

  double mu_;
  std::size_t n_max_;
  double gram_cutoff_;
  Transform transform_;
  Eigen::MatrixXd Il_, Ir_, G_;
  mutable std::mutex coord_mutex_;
  mutable std::map<std::size_t, std::shared_ptr<const Coordinates>> coords_;
};

[[nodiscard]] PseudoPoint pseudospectra_point(const ResolventContext& ctx, cplx z, const PseudospectraJob& job);
/// Row-major over the imaginary axis (outer) and real axis (inner).
[[nodiscard]] std::vector<PseudoPoint> pseudospectra(const PseudospectraJob& job);

}  // namespace fracspec
