#include "fracspec/fio.hpp"

#include <algorithm>
#include <cmath>
#include <exception>

#ifdef FRACSPEC_HAVE_OPENMP
#include <omp.h>
#endif

namespace fracspec {

namespace {

void check_side(Side side, const char* where) {
  if (side != Side::left && side != Side::right) {
    throw Error(std::string(where) + ": side must be left or right");
  }
}

double coeff(const std::vector<double>& c, std::size_t k) { return k < c.size() ? c[k] : 0.0; }

// Coefficients of (1 + y) f (left) or (y - 1) f (right).
std::vector<double> shifted_product(const ChebSeries<double>& f, Side side) {
  const std::vector<double> lin = side == Side::left ? std::vector<double>{1.0, 1.0}
                                                     : std::vector<double>{-1.0, 1.0};
  return cheb_product<double>(f.coeffs, lin);
}

double inverse_gamma_factor(double mu) {
  const double g = std::tgamma(1.0 + mu);
  if (!std::isfinite(g) || g == 0.0) throw Error("fio: Gamma(1 + mu) is not finite");
  return 1.0 / g;
}

}  // namespace

InitialMoments initial_moments(const LowRankKernel& kernel, std::size_t j, Side side,
                               std::span<const double> h) {
  check_side(side, "initial_moments");
  if (j >= kernel.rank()) throw Error("initial_moments: column index out of range");
  const auto& b = kernel.gcols[j].coeffs;
  const std::size_t L = b.size() - 1;
  if (h.size() < L + 2) throw Error("initial_moments: need h_0..h_{L+1}");
  auto bb = [&](std::size_t l) { return coeff(b, l); };

  double H0 = 0.0;
  for (std::size_t l = 0; l <= L; ++l) H0 += h[l] * b[l];
  // t g(t) = (1 + s) g / 2 in the s = 2t - 1 variable
  double H1 = h[0] * (2.0 * bb(0) + bb(1)) / 4.0;
  H1 += h[1] * (2.0 * bb(0) + 2.0 * bb(1) + bb(2)) / 4.0;
  for (std::size_t l = 2; l <= L + 1; ++l) H1 += h[l] * (bb(l - 1) + 2.0 * bb(l) + bb(l + 1)) / 4.0;

  InitialMoments im;
  im.phi0 = ChebSeries<double>({0.0});
  im.phi1 = ChebSeries<double>({H0});
  const double c0 = side == Side::left ? -2.0 * H1 : 2.0 * H1;
  im.phi2 = ChebSeries<double>({c0, 2.0 * (H0 - H1)});
  return im;
}

InitialMoments initial_moments(double mu, const LowRankKernel& kernel, std::size_t j, Side side) {
  std::size_t L = 0;
  for (const auto& g : kernel.gcols) L = std::max(L, g.size() - 1);
  const auto h = moments_h(mu, L + 1);
  return initial_moments(kernel, j, side, h);
}

ChebSeries<double> recurrence_step(std::size_t n, const ChebSeries<double>& prev,
                                   const ChebSeries<double>& cur, double boundary,
                                   const UltraOps& ops, Side side) {
  check_side(side, "recurrence_step");
  if (n < 2) throw Error("recurrence_step: n must be at least 2");
  if (ops.size < n + 3) throw Error("recurrence_step: ultraspherical operators too small");
  const bool left = side == Side::left;
  const BandedMatrix& M = left ? ops.Mplus : ops.Mminus;
  const double nu = left ? -static_cast<double>(n) : static_cast<double>(n);
  const double rho = left ? -1.0 : 1.0;
  const std::size_t m = n + 2;

  // (M D)(i, k) = M(i, k-1) * D(k-1, k)
  auto MD = [&](std::size_t i, std::size_t k) { return k == 0 ? 0.0 : M(i, k - 1) * ops.D(k - 1, k); };
  auto Lop = [&](std::size_t i, std::size_t k) { return MD(i, k) + nu * ops.S(i, k); };

  std::vector<double> rhs(m - 1);
  for (std::size_t i = 0; i + 1 < m; ++i) {
    double f = 0.0;
    for (std::size_t k = i; k <= i + 2; ++k) {
      f += (MD(i, k) - nu * ops.S(i, k)) * coeff(prev.coeffs, k);
      f += 2.0 * static_cast<double>(n) * ops.S(i, k) * coeff(cur.coeffs, k);
    }
    rhs[i] = f - boundary * Lop(i, 0);
  }
  // Basis e_k + rho e_{k-1}, k = 1..m-1, unknown index u = k - 1.
  auto entry = [&](std::size_t i, std::size_t u) { return Lop(i, u + 1) + rho * Lop(i, u); };
  const auto d = solve_banded(m - 1, 1, 2, entry, std::move(rhs));

  std::vector<double> c(m);
  c[0] = boundary + rho * d[0];
  for (std::size_t k = 1; k + 1 < m; ++k) c[k] = d[k - 1] + rho * d[k];
  c[m - 1] = d[m - 2];
  return ChebSeries<double>(std::move(c));
}

MomentTable build_moment_table(double mu, const LowRankKernel& kernel, std::size_t j, std::size_t N,
                               Side side) {
  check_side(side, "build_moment_table");
  MomentTable tab;
  tab.j = j;
  const auto im = initial_moments(mu, kernel, j, side);
  tab.columns.push_back(im.phi0);
  if (N >= 1) tab.columns.push_back(im.phi1);
  if (N >= 2) tab.columns.push_back(im.phi2);
  if (N < 3) return tab;
  const std::vector<ChebSeries<double>> g{kernel.gcols[j]};
  const BoundaryValueTable bvt(mu, g, N, side);
  const auto ops = build_ultra_ops(N + 3);
  for (std::size_t n = 2; n < N; ++n) {
    tab.columns.push_back(recurrence_step(n, tab.columns[n - 1], tab.columns[n], bvt(n + 1, 0), ops, side));
  }
  return tab;
}

std::vector<double> endpoint_power_coeffs(const Transform& t, double mu, Side side, std::size_t N) {
  check_side(side, "endpoint_power_coeffs");
  const std::size_t degree = std::max<std::size_t>(2 * N, 256);
  const bool left = side == Side::left;
  const auto c = tcp_expand<double>(
      t, [mu, left](const TransformedPoint& p) { return left ? p.pow1p(mu) : p.pow1m(mu); }, degree);
  std::vector<double> out(N, 0.0);
  std::copy_n(c.coeffs.begin(), std::min(N, c.size()), out.begin());
  return out;
}

namespace {

std::size_t significant_degree(const std::vector<double>& c) {
  double mx = 0.0;
  for (double v : c) mx = std::max(mx, std::abs(v));
  std::size_t d = c.size();
  while (d > 1 && std::abs(c[d - 1]) <= kMachineEps * mx) --d;
  return d - 1;
}

FIOApprox make_header(double mu, const Transform& t, const LowRankKernel& kernel, std::size_t N,
                      Side side) {
  if (N < 1) throw Error("fio: N must be at least 1");
  if (!(mu > 0)) throw Error("fio: mu must be positive");
  if (kernel.rank() == 0) throw Error("fio: empty kernel");
  if (kernel.side != side) throw Error("fio: kernel side does not match");
  FIOApprox a;
  a.side = side;
  a.mu = mu;
  a.transform = t;
  a.N = N;
  a.kernel_rank = kernel.rank();
  std::size_t K = 0, L = 0;
  for (const auto& f : kernel.fcols) K = std::max(K, f.size() - 1);
  for (const auto& g : kernel.gcols) L = std::max(L, g.size() - 1);
  a.kernel_K = K;
  a.kernel_L = L;
  a.A = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(N), static_cast<Eigen::Index>(N));
  return a;
}

void add_endpoint_term(FIOApprox& a, const std::vector<double>& c0, double scale) {
  const auto N = static_cast<Eigen::Index>(a.N);
  for (Eigen::Index n = 0; n < N; ++n) {
    const double sgn = (a.side == Side::left && (n % 2 == 1)) ? -1.0 : 1.0;
    for (Eigen::Index i = 0; i < N; ++i) a.A(i, n) += sgn * scale * c0[static_cast<std::size_t>(i)];
  }
  a.lower_bandwidth = std::max(a.kernel_K, significant_degree(c0)) + 1;
}

void accumulate_column(Eigen::MatrixXd& A, std::size_t n, const std::vector<double>& Fj,
                       const ChebSeries<double>& phi, double alpha) {
  auto col = A.col(static_cast<Eigen::Index>(n));
  cheb_product_accumulate<double>(Fj, phi.coeffs, alpha, std::span<double>(col.data(), static_cast<std::size_t>(col.size())));
}

}  // namespace

FIOApprox assemble(double mu, const Transform& t, const LowRankKernel& kernel,
                   std::span<const MomentTable> tables, std::size_t N, Side side) {
  check_side(side, "assemble");
  FIOApprox a = make_header(mu, t, kernel, N, side);
  if (tables.size() != kernel.rank()) throw Error("assemble: one moment table per kernel column required");
  const double ig = inverse_gamma_factor(mu);
  add_endpoint_term(a, endpoint_power_coeffs(t, mu, side, N), ig);
  for (const auto& tab : tables) {
    if (tab.j >= kernel.rank()) throw Error("assemble: table column index out of range");
    if (tab.columns.size() < N) throw Error("assemble: moment table too short");
    const auto Fj = shifted_product(kernel.fcols[tab.j], side);
    for (std::size_t n = 1; n < N; ++n) {
      accumulate_column(a.A, n, Fj, tab.columns[n], static_cast<double>(n) * kernel.sigma[tab.j] * ig);
    }
  }
  a.profile = measure_band_profile(a.A);
  return a;
}

FIOApprox build_fio(const Transform& t, double mu, Side side, std::size_t N, const LowRankKernel& kernel,
                    int threads) {
  check_side(side, "build_fio");
  FIOApprox a = make_header(mu, t, kernel, N, side);
  const double ig = inverse_gamma_factor(mu);
  add_endpoint_term(a, endpoint_power_coeffs(t, mu, side, N), ig);

  const std::size_t r = kernel.rank();
  const auto h = moments_h(mu, a.kernel_L + 1);
  const BoundaryValueTable bvt(mu, kernel.gcols, std::max<std::size_t>(N, 3), side);
  const auto ops = build_ultra_ops(N + 3);

  auto run_column = [&](std::size_t j, Eigen::MatrixXd& target) {
    const auto Fj = shifted_product(kernel.fcols[j], side);
    const auto im = initial_moments(kernel, j, side, h);
    ChebSeries<double> prev = im.phi0;
    ChebSeries<double> cur = im.phi1;
    for (std::size_t n = 1; n < N; ++n) {
      accumulate_column(target, n, Fj, cur, static_cast<double>(n) * kernel.sigma[j] * ig);
      if (n + 1 >= N) break;
      ChebSeries<double> next = n == 1 ? im.phi2 : recurrence_step(n, prev, cur, bvt(n + 1, j), ops, side);
      prev = std::move(cur);
      cur = std::move(next);
    }
  };

  int nthreads = std::max(1, threads);
#ifndef FRACSPEC_HAVE_OPENMP
  nthreads = 1;
#endif
  if (nthreads == 1 || r == 1) {
    for (std::size_t j = 0; j < r; ++j) run_column(j, a.A);
  } else {
#ifdef FRACSPEC_HAVE_OPENMP
    std::exception_ptr failure;
#pragma omp parallel num_threads(nthreads)
    {
      Eigen::MatrixXd local = Eigen::MatrixXd::Zero(a.A.rows(), a.A.cols());
#pragma omp for schedule(dynamic)
      for (long j = 0; j < static_cast<long>(r); ++j) {
        try {
          run_column(static_cast<std::size_t>(j), local);
        } catch (...) {
#pragma omp critical(fracspec_fio_error)
          if (!failure) failure = std::current_exception();
        }
      }
#pragma omp critical(fracspec_fio_reduce)
      a.A += local;
    }
    if (failure) std::rethrow_exception(failure);
#endif
  }
  a.profile = measure_band_profile(a.A);
  return a;
}

LowRankKernel make_kernel(const Transform& t, double mu, Side side, const KernelOptions& opts) {
  check_side(side, "make_kernel");
  if (const auto* alg = std::get_if<AlgebraicTransform>(&t); alg && side == Side::left) {
    return algebraic_factorization(alg->beta, mu);
  }
  return aca_approximate(t, mu, side, opts);
}

FIOApprox build_fio(const Transform& t, double mu, Side side, std::size_t N, const KernelOptions& opts,
                    int threads) {
  return build_fio(t, mu, side, N, make_kernel(t, mu, side, opts), threads);
}

double riesz_factor(double mu) {
  if (!(mu > 0)) throw Error("riesz: mu must be positive");
  const double nearest_odd = 2.0 * std::round((mu - 1.0) / 2.0) + 1.0;
  if (std::abs(mu - nearest_odd) < 1e-8) throw Error("riesz: cos(pi mu / 2) vanishes for odd mu");
  return 1.0 / (2.0 * std::cos(0.5 * kPi * mu));
}

FIOApprox riesz_combine(const FIOApprox& left, const FIOApprox& right) {
  if (left.side != Side::left || right.side != Side::right) throw Error("riesz_combine: need left and right operators");
  if (left.N != right.N || left.mu != right.mu) throw Error("riesz_combine: operators do not match");
  FIOApprox a = left;
  a.side = Side::riesz;
  a.A = riesz_factor(left.mu) * (left.A + right.A);
  a.lower_bandwidth = std::max(left.lower_bandwidth, right.lower_bandwidth);
  a.kernel_rank = left.kernel_rank + right.kernel_rank;
  a.kernel_K = std::max(left.kernel_K, right.kernel_K);
  a.kernel_L = std::max(left.kernel_L, right.kernel_L);
  a.profile = measure_band_profile(a.A);
  return a;
}

FIOApprox build_riesz(double mu, const Transform& t, std::size_t N, const KernelOptions& opts, int threads) {
  (void)riesz_factor(mu);
  return riesz_combine(build_fio(t, mu, Side::left, N, opts, threads),
                       build_fio(t, mu, Side::right, N, opts, threads));
}

}  // namespace fracspec
