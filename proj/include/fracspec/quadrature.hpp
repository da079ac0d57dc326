#pragma once

// Gauss-Jacobi quadrature for the weight t^mu on [0,1], the moments
// h_l = int_0^1 t^mu T_l(2t-1) dt, and the Dirichlet data of the moment
// recurrence.

#include <cstddef>
#include <span>
#include <vector>

#include "fracspec/chebcore.hpp"

namespace fracspec {

struct JacobiRule {
  double mu = 0.0;
  std::vector<double> nodes;    // ascending, in (0, 1)
  std::vector<double> weights;  // positive, summing to 1/(1+mu)

  [[nodiscard]] std::size_t size() const noexcept { return nodes.size(); }
};

/// n-point rule for int_0^1 t^mu f(t) dt (Golub-Welsch eigenvalues of the
/// Jacobi matrix, weights from the Christoffel function). Requires mu > -1.
[[nodiscard]] JacobiRule gauss_jacobi(double mu, std::size_t n_nodes);

/// Node count for exactness up to polynomial degree `degree`, with a 1.1x margin.
[[nodiscard]] std::size_t jacobi_nodes_for_degree(std::size_t degree);

/// h_0..h_lmax.
[[nodiscard]] std::vector<double> moments_h(double mu, std::size_t lmax);

/// phi_n^j(+1) = int t^mu U_{n-1}(1-2t) g(t) dt for side == left, or
/// phi_n^j(-1) = int t^mu U_{n-1}(2t-1) g(t) dt for side == right.
/// g is a first-kind series in s = 2t - 1.
[[nodiscard]] double boundary_value(double mu, std::size_t n, const ChebSeries<double>& g, Side side);

/// Boundary values for n = 0..n_max and every column of a kernel, sharing one
/// rule. Row n holds phi_n^j(+-1) for j = 0..r-1.
class BoundaryValueTable {
 public:
  BoundaryValueTable(double mu, std::span<const ChebSeries<double>> g_columns, std::size_t n_max,
                     Side side);

  [[nodiscard]] double operator()(std::size_t n, std::size_t j) const { return values_[n * rank_ + j]; }
  [[nodiscard]] std::size_t n_max() const noexcept { return n_max_; }

 private:
  std::size_t rank_ = 0;
  std::size_t n_max_ = 0;
  std::vector<double> values_;
};

}  // namespace fracspec
