#include "fracspec/kernel.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

namespace fracspec {

namespace {

constexpr double kLog2 = std::numbers::ln2;

double log_cosh(double a) {
  const double x = std::abs(a);
  return x + std::log1p(std::exp(-2.0 * x)) - kLog2;
}

// log(sinh(x) / x), even in x, equal to 0 at x = 0.
double log_sinhc(double x) {
  x = std::abs(x);
  if (x == 0.0) return 0.0;
  if (x < 1.0) return std::log(std::sinh(x) / x);
  return x - std::log(2.0 * x) + std::log1p(-std::exp(-2.0 * x));
}

// Left: xi1 = y - (1+y)t, prefactor (1+y); right: xi1 = y + (1-y)t, prefactor (1-y).
double de_log_G(double omega, double mu, Side side, double y, double t) {
  const double gap = side == Side::left ? 1.0 + y : 1.0 - y;
  if (gap <= 0.0) return -std::numeric_limits<double>::infinity();
  const double a = 0.5 * kPi * std::sinh(omega * y);
  double s = std::log(0.5 * kPi * omega * gap);
  if (t == 0.0) {
    // limit ((1 +- y) psi'(y))^mu
    s += log_cosh(omega * y) - 2.0 * log_cosh(a);
    return mu * s;
  }
  const double xi1 = side == Side::left ? y - gap * t : y + gap * t;
  const double xi2 = 0.5 * omega * gap * t;
  const double half_sum = 0.5 * omega * (y + xi1);
  const double xi3 = kPi * std::cosh(half_sum) * std::sinh(xi2);
  const double b = 0.5 * kPi * std::sinh(omega * xi1);
  s += log_cosh(half_sum) + log_sinhc(xi3) + log_sinhc(xi2) - log_cosh(a) - log_cosh(b);
  return mu * s;
}

double algebraic_G(double beta, double mu, Side side, double y, double t) {
  const double inv_beta = 1.0 / beta;
  if (side == Side::left) {
    const double f1 = std::exp(mu * ((1.0 - inv_beta) * kLog2 + inv_beta * std::log1p(y)));
    const double g1 = t == 0.0 ? std::pow(beta, -mu)
                               : std::pow(-std::expm1(std::log1p(-t) * inv_beta) / t, mu);
    return f1 * g1;
  }
  const double p = 0.5 * (1.0 + y);
  if (t == 0.0) {
    return std::pow((1.0 - y) * std::pow(p, inv_beta - 1.0) * inv_beta, mu);
  }
  if (p == 0.0) return std::pow(2.0 * std::pow(t, inv_beta) / t, mu);
  const double diff = 2.0 * std::pow(p, inv_beta) * std::expm1(std::log1p((1.0 - p) * t / p) * inv_beta);
  return std::pow(diff / t, mu);
}

struct TableRow {
  double log_mu;
  double rank;
  double degree;
};

constexpr std::array<TableRow, 7> kTable{{{0, 28, 80},
                                          {-1, 40, 100},
                                          {-2, 50, 120},
                                          {-3, 58, 170},
                                          {-4, 64, 350},
                                          {-5, 65, 660},
                                          {-6, 64, 920}}};

std::pair<double, double> table_lookup(double mu) {
  if (!(mu > 0)) throw Error("kernel table: mu must be positive");
  const double lm = std::clamp(std::log10(mu), -6.0, 0.0);
  for (std::size_t i = 0; i + 1 < kTable.size(); ++i) {
    const auto& hi = kTable[i];
    const auto& lo = kTable[i + 1];
    if (lm <= hi.log_mu && lm >= lo.log_mu) {
      const double w = (hi.log_mu - lm) / (hi.log_mu - lo.log_mu);
      return {hi.rank + w * (lo.rank - hi.rank), hi.degree + w * (lo.degree - hi.degree)};
    }
  }
  return {kTable.back().rank, kTable.back().degree};
}

}  // namespace

double LowRankKernel::operator()(double y, double t) const {
  const double s = 2.0 * t - 1.0;
  double v = 0.0;
  for (std::size_t j = 0; j < sigma.size(); ++j) {
    v += sigma[j] * clenshaw_T<double>(fcols[j].coeffs, y) * clenshaw_T<double>(gcols[j].coeffs, s);
  }
  return v;
}

double eval_G(const Transform& tr, double mu, Side side, double y, double t) {
  if (!(mu > 0)) throw Error("eval_G: mu must be positive");
  if (side == Side::riesz) throw Error("eval_G: side must be left or right");
  if (!(std::abs(y) <= 1.0) || !(t >= 0.0 && t <= 1.0)) throw Error("eval_G: argument out of range");
  if (const auto* de = std::get_if<DoubleExpTransform>(&tr)) {
    return std::exp(de_log_G(de->omega, mu, side, y, t));
  }
  return algebraic_G(std::get<AlgebraicTransform>(tr).beta, mu, side, y, t);
}

std::size_t table_rank(double mu) {
  return static_cast<std::size_t>(std::lround(table_lookup(mu).first));
}

std::size_t table_degree(double mu) {
  return static_cast<std::size_t>(std::lround(table_lookup(mu).second));
}

std::size_t default_kernel_degree(double mu) { return std::max<std::size_t>(100, table_degree(mu)); }

namespace {

// Chebyshev interpolant of a univariate function, doubling the degree until
// the trailing coefficients fall below eps relative to the largest one.
template <class F>
ChebSeries<double> adaptive_interpolant(F&& f, std::size_t max_degree = 4096) {
  for (std::size_t deg = 16;; deg *= 2) {
    const auto ys = lobatto_points(deg + 1);
    std::vector<double> v(ys.size());
    for (std::size_t k = 0; k < ys.size(); ++k) v[k] = f(ys[k]);
    auto c = values_to_coeffs<double>(v);
    double cmax = 0.0;
    for (double x : c.coeffs) cmax = std::max(cmax, std::abs(x));
    double tail = 0.0;
    for (std::size_t k = c.size() - 4; k < c.size(); ++k) tail = std::max(tail, std::abs(c.coeffs[k]));
    if (tail <= 4.0 * kMachineEps * cmax || deg >= max_degree) {
      std::size_t keep = c.size();
      while (keep > 1 && std::abs(c.coeffs[keep - 1]) <= kMachineEps * cmax) --keep;
      c.coeffs.resize(keep);
      return c;
    }
  }
}

}  // namespace

LowRankKernel algebraic_factorization(double beta, double mu) {
  if (!(beta > 0) || !(mu > 0)) throw Error("algebraic_factorization: beta and mu must be positive");
  const double inv_beta = 1.0 / beta;
  LowRankKernel k;
  k.mu = mu;
  k.side = Side::left;
  k.sigma = {1.0};
  k.fcols.push_back(adaptive_interpolant([&](double y) {
    return std::exp(mu * ((1.0 - inv_beta) * kLog2 + inv_beta * std::log1p(y)));
  }));
  k.gcols.push_back(adaptive_interpolant([&](double s) {
    const double t = 0.5 * (1.0 + s);
    if (t == 0.0) return std::pow(beta, -mu);
    return std::pow(-std::expm1(std::log1p(-t) * inv_beta) / t, mu);
  }));
  k.K = k.fcols[0].size() - 1;
  k.L = k.gcols[0].size() - 1;
  return k;
}

LowRankKernel aca_approximate(const Transform& tr, double mu, Side side, const KernelOptions& opts) {
  if (!(mu > 0)) throw Error("aca_approximate: mu must be positive");
  if (side == Side::riesz) throw Error("aca_approximate: side must be left or right");
  if (!(opts.tol > 0)) throw Error("aca_approximate: tol must be positive");
  const std::size_t K = opts.K ? opts.K : default_kernel_degree(mu);
  const std::size_t L = opts.L ? opts.L : K;
  if (K < 8 || L < 8) throw Error("aca_approximate: K and L must be at least 8");
  const std::size_t cap = opts.max_rank ? opts.max_rank : 5 * table_rank(mu);

  const auto ys = lobatto_points(K + 1);
  const auto ss = lobatto_points(L + 1);
  const auto rows = static_cast<Eigen::Index>(K + 1);
  const auto cols = static_cast<Eigen::Index>(L + 1);
  Eigen::MatrixXd R(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    const double t = 0.5 * (1.0 + ss[static_cast<std::size_t>(j)]);
    for (Eigen::Index i = 0; i < rows; ++i) R(i, j) = eval_G(tr, mu, side, ys[static_cast<std::size_t>(i)], t);
  }
  const double gmax = R.cwiseAbs().maxCoeff();
  if (!(gmax > 0) || !std::isfinite(gmax)) throw Error("aca_approximate: kernel samples not finite");

  LowRankKernel k;
  k.mu = mu;
  k.side = side;
  k.K = K;
  k.L = L;
  std::vector<Eigen::VectorXd> fvals;
  std::vector<Eigen::RowVectorXd> gvals;
  double resid = gmax;
  while (true) {
    Eigen::Index pi = 0, pj = 0;
    resid = R.cwiseAbs().maxCoeff(&pi, &pj);
    if (resid <= opts.tol * gmax) break;
    if (k.sigma.size() >= cap) {
      if (opts.require_tolerance) {
        throw AcaError("aca_approximate: tolerance not reached at rank cap " + std::to_string(cap),
                       resid / gmax, cap);
      }
      break;
    }
    const double pivot = R(pi, pj);
    Eigen::VectorXd f = R.col(pj);
    Eigen::RowVectorXd g = R.row(pi);
    R.noalias() -= (f / pivot) * g;
    k.sigma.push_back(1.0 / pivot);
    fvals.push_back(std::move(f));
    gvals.push_back(std::move(g));
  }
  k.residual = resid / gmax;
  auto chop = [](ChebSeries<double> c) {
    double mx = 0.0;
    for (double v : c.coeffs) mx = std::max(mx, std::abs(v));
    std::size_t keep = c.size();
    while (keep > 1 && std::abs(c.coeffs[keep - 1]) <= 0.1 * kMachineEps * mx) --keep;
    c.coeffs.resize(keep);
    return c;
  };
  for (std::size_t j = 0; j < k.sigma.size(); ++j) {
    k.fcols.push_back(chop(values_to_coeffs<double>(std::span<const double>(fvals[j].data(), fvals[j].size()))));
    k.gcols.push_back(chop(values_to_coeffs<double>(std::span<const double>(gvals[j].data(), gvals[j].size()))));
  }
  return k;
}

}  // namespace fracspec
