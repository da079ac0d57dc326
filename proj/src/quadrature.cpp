#include "fracspec/quadrature.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>

namespace fracspec {

namespace {

// Orthonormal Jacobi recurrence for weight (1+x)^mu on [-1,1]:
// x p_k = b_{k+1} p_{k+1} + a_k p_k + b_k p_{k-1}.
struct JacobiRecurrence {
  std::vector<double> a, b;  // b[0] unused
  double mu0 = 0.0;
};

JacobiRecurrence jacobi_recurrence(double mu, std::size_t n) {
  JacobiRecurrence r;
  r.a.resize(n);
  r.b.resize(n + 1, 0.0);
  const double beta = mu;  // alpha = 0
  for (std::size_t k = 0; k < n; ++k) {
    const double s = 2.0 * static_cast<double>(k) + beta;
    r.a[k] = (k == 0) ? beta / (beta + 2.0) : beta * beta / (s * (s + 2.0));
  }
  for (std::size_t k = 1; k <= n; ++k) {
    const double kk = static_cast<double>(k);
    const double s = 2.0 * kk + beta;
    const double num = 4.0 * kk * kk * (kk + beta) * (kk + beta);
    const double den = s * s * (s + 1.0) * (s - 1.0);
    r.b[k] = std::sqrt(num / den);
  }
  r.mu0 = std::pow(2.0, mu + 1.0) / (mu + 1.0);
  return r;
}

}  // namespace

JacobiRule gauss_jacobi(double mu, std::size_t n_nodes) {
  if (!(mu > -1.0) || !std::isfinite(mu)) throw Error("gauss_jacobi: mu must exceed -1");
  if (n_nodes == 0) throw Error("gauss_jacobi: need at least one node");
  const auto rec = jacobi_recurrence(mu, n_nodes);
  const auto n = static_cast<Eigen::Index>(n_nodes);

  Eigen::VectorXd diag(n), sub(std::max<Eigen::Index>(n - 1, 0));
  for (Eigen::Index k = 0; k < n; ++k) diag(k) = rec.a[static_cast<std::size_t>(k)];
  for (Eigen::Index k = 0; k + 1 < n; ++k) sub(k) = rec.b[static_cast<std::size_t>(k + 1)];
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw Error("gauss_jacobi: tridiagonal eigensolver failed");

  JacobiRule rule;
  rule.mu = mu;
  rule.nodes.resize(n_nodes);
  rule.weights.resize(n_nodes);
  const double p0 = 1.0 / std::sqrt(rec.mu0);
  for (std::size_t i = 0; i < n_nodes; ++i) {
    double x = es.eigenvalues()(static_cast<Eigen::Index>(i));
    double sum = 0.0;
    // Newton polish on p_n, then Christoffel weight 1 / sum p_k^2.
    for (int it = 0; it < 3; ++it) {
      double pm1 = 0.0, p = p0, dpm1 = 0.0, dp = 0.0;
      sum = p * p;
      for (std::size_t k = 0; k < n_nodes; ++k) {
        const double pn = ((x - rec.a[k]) * p - rec.b[k] * pm1) / rec.b[k + 1];
        const double dpn = ((x - rec.a[k]) * dp + p - rec.b[k] * dpm1) / rec.b[k + 1];
        pm1 = p;
        p = pn;
        dpm1 = dp;
        dp = dpn;
        if (k + 1 < n_nodes) sum += p * p;
      }
      if (it == 2 || dp == 0.0) break;
      const double step = p / dp;
      x -= step;
    }
    rule.nodes[i] = 0.5 * (1.0 + x);
    rule.weights[i] = std::pow(0.5, mu + 1.0) / sum;
  }
  return rule;
}

std::size_t jacobi_nodes_for_degree(std::size_t degree) {
  const double minimum = static_cast<double>(degree + 2) / 2.0;
  return static_cast<std::size_t>(std::ceil(1.1 * minimum)) + 1;
}

std::vector<double> moments_h(double mu, std::size_t lmax) {
  if (!(mu > 0)) throw Error("moments_h: mu must be positive");
  const auto rule = gauss_jacobi(mu, jacobi_nodes_for_degree(lmax));
  std::vector<double> h(lmax + 1, 0.0);
  for (std::size_t i = 0; i < rule.size(); ++i) {
    const double s = 2.0 * rule.nodes[i] - 1.0;
    const double w = rule.weights[i];
    double tm1 = 1.0, t = s;
    h[0] += w;
    if (lmax >= 1) h[1] += w * s;
    for (std::size_t l = 2; l <= lmax; ++l) {
      const double tn = 2.0 * s * t - tm1;
      tm1 = t;
      t = tn;
      h[l] += w * t;
    }
  }
  return h;
}

BoundaryValueTable::BoundaryValueTable(double mu, std::span<const ChebSeries<double>> g_columns,
                                       std::size_t n_max, Side side)
    : rank_(g_columns.size()), n_max_(n_max), values_((n_max + 1) * g_columns.size(), 0.0) {
  if (side == Side::riesz) throw Error("BoundaryValueTable: side must be left or right");
  std::size_t max_l = 0;
  for (const auto& g : g_columns) max_l = std::max(max_l, g.size());
  const auto rule = gauss_jacobi(mu, jacobi_nodes_for_degree(n_max + max_l));
  const std::size_t m = rule.size();

  // weighted kernel samples w_i g_j(t_i)
  std::vector<double> wg(m * rank_);
  for (std::size_t i = 0; i < m; ++i) {
    const double s = 2.0 * rule.nodes[i] - 1.0;
    for (std::size_t j = 0; j < rank_; ++j) {
      wg[i * rank_ + j] = rule.weights[i] * clenshaw_T<double>(g_columns[j].coeffs, s);
    }
  }
  // U_{n-1} at the mapped nodes, advanced one degree per n
  std::vector<double> arg(m), u_prev(m, 0.0), u_cur(m, 1.0);
  for (std::size_t i = 0; i < m; ++i) {
    arg[i] = side == Side::left ? 1.0 - 2.0 * rule.nodes[i] : 2.0 * rule.nodes[i] - 1.0;
  }
  for (std::size_t n = 1; n <= n_max; ++n) {
    if (n >= 2) {
      for (std::size_t i = 0; i < m; ++i) {
        const double next = 2.0 * arg[i] * u_cur[i] - u_prev[i];
        u_prev[i] = u_cur[i];
        u_cur[i] = next;
      }
    }
    double* row = &values_[n * rank_];
    for (std::size_t i = 0; i < m; ++i) {
      const double u = u_cur[i];
      const double* w = &wg[i * rank_];
      for (std::size_t j = 0; j < rank_; ++j) row[j] += u * w[j];
    }
  }
}

double boundary_value(double mu, std::size_t n, const ChebSeries<double>& g, Side side) {
  if (n == 0) return 0.0;
  const std::span<const ChebSeries<double>> cols(&g, 1);
  const BoundaryValueTable table(mu, cols, n, side);
  return table(n, 0);
}

}  // namespace fracspec
