#include "fracspec/opalgebra.hpp"

#include <cmath>

namespace fracspec {

namespace {

BandProfile merge(const BandProfile& a, const BandProfile& b) {
  return {std::max(a.lower, b.lower), std::max(a.upper, b.upper)};
}

template <Scalar S>
void check_square_pair(const CoeffOperator<S>& a, const CoeffOperator<S>& b) {
  if (a.matrix.rows() != b.matrix.rows() || a.matrix.cols() != b.matrix.cols()) {
    throw Error("opalgebra: dimension mismatch");
  }
}

}  // namespace

CoeffOperator<double> identity_operator(std::size_t N) {
  const auto n = static_cast<Eigen::Index>(N);
  return {Eigen::MatrixXd::Identity(n, n), {}};
}

CoeffOperator<double> from_fio(const FIOApprox& a) { return {a.A, a.profile}; }

template <Scalar S>
CoeffOperator<S> leading_block(const CoeffOperator<S>& op, std::size_t N) {
  const auto n = static_cast<Eigen::Index>(N);
  if (n > op.matrix.rows()) throw Error("leading_block: requested size exceeds operator size");
  CoeffOperator<S> out{op.matrix.topLeftCorner(n, n), {}};
  out.profile = {std::min<std::size_t>(op.profile.lower, N ? N - 1 : 0), std::min<std::size_t>(op.profile.upper, N ? N - 1 : 0)};
  return out;
}

template <Scalar S>
CoeffOperator<S> mult_operator(const ChebSeries<S>& c, std::size_t N) {
  if (c.kind != ChebKind::first) throw Error("mult_operator: first-kind series required");
  const auto n = static_cast<Eigen::Index>(N);
  CoeffOperator<S> op{Mat<S>::Zero(n, n), {}};
  const std::size_t deg = std::min(c.degree(), N ? N - 1 : 0);
  for (std::size_t k = 0; k < N; ++k) {
    for (std::size_t m = 0; m <= deg; ++m) {
      const S h = S(0.5) * c.coeffs[m];
      const std::size_t hi = m + k;
      const std::size_t lo = m > k ? m - k : k - m;
      if (hi < N) op.matrix(static_cast<Eigen::Index>(hi), static_cast<Eigen::Index>(k)) += h;
      op.matrix(static_cast<Eigen::Index>(lo), static_cast<Eigen::Index>(k)) += h;
    }
  }
  op.profile = {deg, deg};
  return op;
}

template <Scalar S>
CoeffOperator<S> compose(const CoeffOperator<S>& a, const CoeffOperator<S>& b) {
  check_square_pair(a, b);
  return {a.matrix * b.matrix, {a.profile.lower + b.profile.lower, a.profile.upper + b.profile.upper}};
}

template <Scalar S>
CoeffOperator<S> add(const CoeffOperator<S>& a, const CoeffOperator<S>& b) {
  check_square_pair(a, b);
  return {a.matrix + b.matrix, merge(a.profile, b.profile)};
}

template <Scalar S>
CoeffOperator<S> scale(const CoeffOperator<S>& a, S s) {
  return {a.matrix * s, a.profile};
}

CoeffOperator<cplx> to_complex(const CoeffOperator<double>& a) {
  return {a.matrix.cast<cplx>(), a.profile};
}

BoundaryFunctional boundary_row(int endpoint, std::size_t N) {
  if (endpoint != 1 && endpoint != -1) throw Error("boundary_row: endpoint must be +1 or -1");
  BoundaryFunctional b;
  b.endpoint = endpoint;
  b.row.resize(N);
  for (std::size_t k = 0; k < N; ++k) b.row[k] = (endpoint == -1 && k % 2 == 1) ? -1.0 : 1.0;
  return b;
}

template <Scalar S>
BorderedSolution<S> solve_square(const Mat<S>& M, const Vec<S>& b, double max_condition) {
  if (M.rows() != M.cols() || M.rows() != b.size()) throw Error("solve_square: dimension mismatch");
  if (!M.allFinite() || !b.allFinite()) throw Error("solve_square: non-finite input");
  Eigen::PartialPivLU<Mat<S>> lu(M);
  const double rc = lu.rcond();
  const double cond = rc > 0 ? 1.0 / rc : std::numeric_limits<double>::infinity();
  if (!(cond <= max_condition)) {
    throw SingularSystemError("solve: condition estimate " + std::to_string(cond) + " exceeds threshold", cond);
  }
  Vec<S> x = lu.solve(b);
  BorderedSolution<S> out;
  const double bn = b.norm();
  out.residual = (M * x - b).norm() / (bn > 0 ? bn : 1.0);
  out.condition = cond;
  out.coeffs = ChebSeries<S>(std::vector<S>(x.data(), x.data() + x.size()));
  out.scalars = Vec<S>(0);
  return out;
}

template <Scalar S>
BorderedSolution<S> solve_bordered(const BorderedSystem<S>& sys, double max_condition) {
  const Eigen::Index p = sys.corner.rows();
  const Eigen::Index N = sys.core.cols();
  if (sys.corner.cols() != p || sys.border_rows.rows() != p || sys.rhs_border.size() != p ||
      sys.border_cols.cols() != p) {
    throw Error("solve_bordered: border blocks inconsistent");
  }
  if (p > 0 && sys.border_rows.cols() != N) throw Error("solve_bordered: border row length mismatch");
  if (sys.core.rows() + p != N + p || sys.rhs.size() != sys.core.rows() ||
      (p > 0 && sys.border_cols.rows() != sys.core.rows())) {
    throw Error("solve_bordered: system is not square");
  }
  const Eigen::Index n = N + p;
  Mat<S> M(n, n);
  Vec<S> b(n);
  if (p > 0) {
    M.topLeftCorner(p, N) = sys.border_rows;
    M.topRightCorner(p, p) = sys.corner;
    M.bottomRightCorner(N, p) = sys.border_cols;
    b.head(p) = sys.rhs_border;
  }
  M.bottomLeftCorner(N, N) = sys.core;
  b.tail(N) = sys.rhs;
  auto sol = solve_square<S>(M, b, max_condition);
  BorderedSolution<S> out;
  out.residual = sol.residual;
  out.condition = sol.condition;
  out.scalars = Eigen::Map<const Vec<S>>(sol.coeffs.coeffs.data() + N, p);
  out.coeffs = ChebSeries<S>(std::vector<S>(sol.coeffs.coeffs.begin(), sol.coeffs.coeffs.begin() + N));
  return out;
}

#define FRACSPEC_INSTANTIATE(S)                                                         \
  template CoeffOperator<S> leading_block<S>(const CoeffOperator<S>&, std::size_t);    \
  template CoeffOperator<S> mult_operator<S>(const ChebSeries<S>&, std::size_t);       \
  template CoeffOperator<S> compose<S>(const CoeffOperator<S>&, const CoeffOperator<S>&); \
  template CoeffOperator<S> add<S>(const CoeffOperator<S>&, const CoeffOperator<S>&);  \
  template CoeffOperator<S> scale<S>(const CoeffOperator<S>&, S);                      \
  template BorderedSolution<S> solve_square<S>(const Mat<S>&, const Vec<S>&, double);  \
  template BorderedSolution<S> solve_bordered<S>(const BorderedSystem<S>&, double);

FRACSPEC_INSTANTIATE(double)
FRACSPEC_INSTANTIATE(cplx)
#undef FRACSPEC_INSTANTIATE

}  // namespace fracspec
