#pragma once

// Coefficient-space operators: multiplication by a TCP series, endpoint
// evaluation functionals, sums and products, and dense bordered solves.

#include <cstddef>
#include <span>
#include <vector>

#include "fracspec/fio.hpp"

namespace fracspec {

template <Scalar S>
struct CoeffOperator {
  Mat<S> matrix;
  BandProfile profile;

  [[nodiscard]] std::size_t size() const noexcept { return static_cast<std::size_t>(matrix.rows()); }
  [[nodiscard]] Vec<S> apply(const Vec<S>& c) const { return matrix * c; }
};

[[nodiscard]] CoeffOperator<double> identity_operator(std::size_t N);
[[nodiscard]] CoeffOperator<double> from_fio(const FIOApprox& a);
/// Leading N x N block.
template <Scalar S>
[[nodiscard]] CoeffOperator<S> leading_block(const CoeffOperator<S>& op, std::size_t N);

/// Multiplication by sum c_k Q_k: Q_k Q_l = (Q_{k+l} + Q_{|k-l|}) / 2, truncated to N x N.
template <Scalar S>
[[nodiscard]] CoeffOperator<S> mult_operator(const ChebSeries<S>& c, std::size_t N);

template <Scalar S>
[[nodiscard]] CoeffOperator<S> compose(const CoeffOperator<S>& a, const CoeffOperator<S>& b);
template <Scalar S>
[[nodiscard]] CoeffOperator<S> add(const CoeffOperator<S>& a, const CoeffOperator<S>& b);
template <Scalar S>
[[nodiscard]] CoeffOperator<S> scale(const CoeffOperator<S>& a, S s);
[[nodiscard]] CoeffOperator<cplx> to_complex(const CoeffOperator<double>& a);

/// Evaluation at x = psi(+-1) = +-1: T_n(1) = 1, T_n(-1) = (-1)^n.
struct BoundaryFunctional {
  int endpoint = 1;
  std::vector<double> row;

  template <Scalar S>
  [[nodiscard]] S apply(std::span<const S> c) const {
    S s(0);
    const std::size_t n = std::min(c.size(), row.size());
    for (std::size_t k = 0; k < n; ++k) s += row[k] * c[k];
    return s;
  }
};

[[nodiscard]] BoundaryFunctional boundary_row(int endpoint, std::size_t N);

/// Square system
///   [ border_rows  corner      ] [ c ]   [ rhs_border ]
///   [ core         border_cols ] [ a ] = [ rhs        ]
/// with an N x N core, p extra scalar unknowns a and p functional rows.
template <Scalar S>
struct BorderedSystem {
  Mat<S> core;         // N x N
  Mat<S> border_cols;  // N x p
  Mat<S> border_rows;  // p x N
  Mat<S> corner;       // p x p
  Vec<S> rhs;          // N
  Vec<S> rhs_border;   // p
};

template <Scalar S>
struct BorderedSolution {
  ChebSeries<S> coeffs;
  Vec<S> scalars;
  /// ||M x - b|| / ||b||.
  double residual = 0.0;
  /// Reciprocal of the LU-based reciprocal condition estimate.
  double condition = 0.0;
};

/// Dense LU solve of the assembled system. Throws SingularSystemError when the
/// condition estimate exceeds `max_condition`.
template <Scalar S>
[[nodiscard]] BorderedSolution<S> solve_bordered(const BorderedSystem<S>& sys, double max_condition = 1e13);

/// Plain square solve with the same diagnostics.
template <Scalar S>
[[nodiscard]] BorderedSolution<S> solve_square(const Mat<S>& M, const Vec<S>& b, double max_condition = 1e13);

}  // namespace fracspec
