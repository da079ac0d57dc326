#include "fracspec/solver.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <random>

#ifdef FRACSPEC_HAVE_OPENMP
#include <omp.h>
#endif

namespace fracspec {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<std::size_t> schedule(std::size_t n_start, std::size_t n_max) {
  if (n_start < 4) throw Error("truncation: n_start must be at least 4");
  if (n_max < n_start) throw Error("truncation: n_max must be at least n_start");
  std::vector<std::size_t> out;
  for (std::size_t n = n_start; n <= n_max; n *= 2) out.push_back(n);
  return out;
}

Eigen::MatrixXd multiplier(const Transform& t, const RealFn& f, std::size_t N) {
  const Vec<double> c = tcp_coeffs<double>(t, f, N);
  return mult_operator(ChebSeries<double>(std::vector<double>(c.data(), c.data() + c.size())), N).matrix;
}

template <Scalar S>
ChebSeries<S> to_series(const Vec<S>& v) {
  return ChebSeries<S>(std::vector<S>(v.data(), v.data() + v.size()));
}

}  // namespace

std::shared_ptr<const LowRankKernel> OperatorCache::kernel(double mu, Side side, const KernelOptions& opts) {
  const auto key = std::make_tuple(mu, static_cast<int>(side), opts.K, opts.L, opts.tol, opts.max_rank);
  {
    std::lock_guard<std::mutex> lock(mutex_);
    if (auto it = kernels_.find(key); it != kernels_.end()) return it->second;
  }
  auto k = std::make_shared<const LowRankKernel>(make_kernel(transform_, mu, side, opts));
  std::lock_guard<std::mutex> lock(mutex_);
  return kernels_.emplace(key, std::move(k)).first->second;
}

FIOApprox OperatorCache::fio(double mu, Side side, std::size_t N, const KernelOptions& opts) {
  if (side == Side::riesz) {
    (void)riesz_factor(mu);
    return riesz_combine(build_fio(transform_, mu, Side::left, N, *kernel(mu, Side::left, opts), threads_),
                         build_fio(transform_, mu, Side::right, N, *kernel(mu, Side::right, opts), threads_));
  }
  return build_fio(transform_, mu, side, N, *kernel(mu, side, opts), threads_);
}

template <Scalar S>
Vec<S> tcp_coeffs(const Transform& t, const std::function<S(const TransformedPoint&)>& f, std::size_t N) {
  const auto c = tcp_expand<S>(t, f, std::max<std::size_t>(2 * N, 256));
  Vec<S> out = Vec<S>::Zero(static_cast<Eigen::Index>(N));
  for (std::size_t k = 0; k < std::min(N, c.size()); ++k) out(static_cast<Eigen::Index>(k)) = c.coeffs[k];
  return out;
}

std::vector<double> equispaced(std::size_t n) {
  if (n < 2) throw Error("equispaced: need at least two points");
  std::vector<double> xs(n);
  for (std::size_t k = 0; k < n; ++k) xs[k] = -1.0 + 2.0 * static_cast<double>(k) / static_cast<double>(n - 1);
  xs.back() = 1.0;
  return xs;
}

template <Scalar S>
double max_difference(const Transform& t, const ChebSeries<S>& a, const ChebSeries<S>& b,
                      std::span<const double> xs) {
  double e = 0.0;
  for (double x : xs) e = std::max(e, std::abs(tcp_eval<S>(t, a, x) - tcp_eval<S>(t, b, x)));
  return e;
}

Transform resolve_transform(const ProblemSpec& spec) {
  if (spec.transform) return *spec.transform;
  return DoubleExpTransform(select_omega(spec.singularities));
}

Eigen::MatrixXd assemble_operator(const ProblemSpec& spec, OperatorCache& cache, std::size_t N) {
  if (spec.terms.empty()) throw Error("solve: at least one term required");
  const auto n = static_cast<Eigen::Index>(N);
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, n);
  for (const auto& term : spec.terms) {
    if (!(term.mu >= 0.0)) throw Error("solve: term orders must be nonnegative");
    Eigen::MatrixXd op = term.mu == 0.0 ? Eigen::MatrixXd::Identity(n, n)
                                        : cache.fio(term.mu, term.side, N, term.kernel).A;
    if (term.b) op = op * multiplier(cache.transform(), term.b, N);
    if (term.a) op = multiplier(cache.transform(), term.a, N) * op;
    L += op;
  }
  return L;
}

Solution<double> solve_at(const ProblemSpec& spec, OperatorCache& cache, std::size_t N) {
  if (!spec.rhs) throw Error("solve: right-hand side required");
  const Eigen::MatrixXd L = assemble_operator(spec, cache, N);
  const Vec<double> f = tcp_coeffs<double>(cache.transform(), spec.rhs, N);
  auto s = solve_square<double>(L, f, spec.policy.max_condition);
  Solution<double> sol;
  sol.transform = cache.transform();
  sol.coeffs = std::move(s.coeffs);
  sol.N_final = N;
  sol.residual = s.residual;
  sol.condition = s.condition;
  sol.history.push_back({N, kInf, s.residual, s.condition});
  return sol;
}

Solution<double> solve_fie(const ProblemSpec& spec) {
  OperatorCache cache(resolve_transform(spec), spec.threads);
  return solve_fie(spec, cache);
}

Solution<double> solve_fie(const ProblemSpec& spec, OperatorCache& cache) {
  if (!spec.rhs) throw Error("solve: right-hand side required");
  if (!(spec.policy.tol > 0)) throw Error("solve: tolerance must be positive");
  const auto xs = equispaced(spec.policy.eval_points);
  Solution<double> sol;
  sol.transform = cache.transform();
  bool have = false;
  for (std::size_t N : schedule(spec.policy.n_start, spec.policy.n_max)) {
    auto s = solve_at(spec, cache, N);
    ConvergenceRecord rec{N, have ? max_difference<double>(cache.transform(), s.coeffs, sol.coeffs, xs) : kInf,
                          s.residual, s.condition};
    sol.history.push_back(rec);
    sol.coeffs = std::move(s.coeffs);
    sol.N_final = N;
    sol.residual = s.residual;
    sol.condition = s.condition;
    have = true;
    if (rec.cauchy_error <= spec.policy.tol) {
      sol.converged = true;
      if (!spec.policy.full_sweep) break;
    }
  }
  if (!sol.converged) throw ConvergenceError("solve: Cauchy tolerance not reached by n_max", sol.history);
  return sol;
}

AiryResult solve_fde_airy(double epsilon, const AiryOptions& opts) {
  if (!(epsilon > 0)) throw Error("airy: epsilon must be positive");
  const Transform T = DoubleExpTransform(opts.omega ? *opts.omega : select_omega(SingularityInfo{0.5, 1.0}));
  OperatorCache cache(T, opts.threads);
  const auto xs = equispaced(opts.policy.eval_points);
  const cplx ei = epsilon * std::polar(1.0, 0.75 * kPi);  // eps * i^{3/2}, principal branch
  const double inv_gamma_half = 1.0 / std::tgamma(0.5);

  AiryResult res;
  res.u.transform = T;
  bool have = false;
  for (std::size_t N : schedule(opts.policy.n_start, opts.policy.n_max)) {
    const auto n = static_cast<Eigen::Index>(N);
    const Eigen::MatrixXd A = cache.fio(1.5, Side::left, N).A;
    BorderedSystem<cplx> sys;
    Vec<double> basis;  // coefficients of the a-term of u
    if (opts.ansatz == AiryAnsatz::sqrt) {
      const Eigen::MatrixXd Mx = multiplier(T, [](const TransformedPoint& p) { return p.x; }, N);
      sys.core = ei * Mat<cplx>::Identity(n, n) - (Mx * A).cast<cplx>();
      sys.border_cols = -tcp_coeffs<double>(T, [](const TransformedPoint& p) { return p.x * p.pow1p(0.5); }, N).cast<cplx>();
      sys.corner = Mat<cplx>::Constant(1, 1, std::sqrt(2.0));
      basis = tcp_coeffs<double>(T, [](const TransformedPoint& p) { return p.pow1p(0.5); }, N);
    } else {
      const Eigen::MatrixXd M1 = multiplier(T, [](const TransformedPoint& p) { return p.pow1p(0.5); }, N);
      const Eigen::MatrixXd M2 = multiplier(T, [](const TransformedPoint& p) { return p.x * p.pow1p(0.5); }, N);
      sys.core = ei * M1.cast<cplx>() - (M2 * A).cast<cplx>();
      sys.border_cols = tcp_coeffs<cplx>(
          T, [&](const TransformedPoint& p) { return ei * inv_gamma_half - cplx(p.x * p.pow1p(1.5)); }, N);
      sys.corner = Mat<cplx>::Constant(1, 1, 2.0);
      basis = tcp_coeffs<double>(T, [](const TransformedPoint& p) { return p.one_plus_x(); }, N);
    }
    sys.border_rows = A.colwise().sum().cast<cplx>();
    sys.rhs = Vec<cplx>::Zero(n);
    sys.rhs_border = Vec<cplx>::Constant(1, 1.0);
    auto s = solve_bordered<cplx>(sys, opts.policy.max_condition);

    const Vec<cplx> v = Eigen::Map<const Vec<cplx>>(s.coeffs.coeffs.data(), n);
    const cplx a = s.scalars(0);
    const Vec<cplx> u = A.cast<cplx>() * v + a * basis.cast<cplx>();
    auto useries = to_series<cplx>(u);
    ConvergenceRecord rec{N, have ? max_difference<cplx>(T, useries, res.u.coeffs, xs) : kInf, s.residual,
                          s.condition};
    res.u.history.push_back(rec);
    res.u.coeffs = std::move(useries);
    res.u.N_final = N;
    res.u.residual = s.residual;
    res.u.condition = s.condition;
    res.v = std::move(s.coeffs);
    res.a = a;
    res.residual_left = std::abs(boundary_row(-1, N).apply<cplx>(res.u.coeffs.coeffs));
    res.residual_right = std::abs(boundary_row(1, N).apply<cplx>(res.u.coeffs.coeffs) - 1.0);
    have = true;
    if (rec.cauchy_error <= opts.policy.tol) {
      res.u.converged = true;
      if (!opts.policy.full_sweep) break;
    }
  }
  if (!res.u.converged) throw ConvergenceError("airy: Cauchy tolerance not reached by n_max", res.u.history);
  return res;
}

double eigen_theta(double mu1, double mu2) {
  return std::tgamma(mu1 - mu2) / std::tgamma(mu1) * std::pow(2.0, 1.0 + mu2 - mu1);
}

namespace {

void check_eigen_orders(double mu1, double mu2) {
  const double ell = std::ceil(mu1);
  if (!(mu2 >= 0.0) || !(mu1 > 1.0) || ell == mu1 || !(mu2 < ell - 1.0) || !(ell - 1.0 < mu1)) {
    throw Error("eigen: orders must satisfy 0 <= mu2 < l - 1 < mu1 < l for an integer l >= 2");
  }
}

}  // namespace

Eigen::MatrixXd eigen_operator(double mu1, double mu2, OperatorCache& cache, std::size_t N) {
  check_eigen_orders(mu1, mu2);
  const Eigen::MatrixXd A1 = cache.fio(mu1 - mu2, Side::left, N).A;
  const Eigen::MatrixXd A2 = cache.fio(mu1, Side::left, N).A;
  const Vec<double> vhat =
      tcp_coeffs<double>(cache.transform(), [mu1](const TransformedPoint& p) { return p.pow1p(mu1 - 1.0); }, N);
  return eigen_theta(mu1, mu2) * vhat * A1.colwise().sum() - A2;
}

EigenResult solve_eigen(double mu1, double mu2, const EigenOptions& opts) {
  check_eigen_orders(mu1, mu2);
  if (opts.k == 0) throw Error("eigen: k must be positive");
  const Transform T = DoubleExpTransform(opts.omega ? *opts.omega : select_omega(SingularityInfo{mu1 - 1.0, 1.0}));
  OperatorCache cache(T, opts.threads);
  EigenResult res;
  res.transform = T;
  res.theta = eigen_theta(mu1, mu2);
  std::vector<cplx> prev_rows;
  for (std::size_t N : schedule(opts.n_start, opts.n_max)) {
    const Eigen::MatrixXd E = eigen_operator(mu1, mu2, cache, N);
    Eigen::EigenSolver<Eigen::MatrixXd> es(E, true);
    if (es.info() != Eigen::Success) throw Error("eigen: eigenvalue iteration failed");
    const Vec<cplx> rho = es.eigenvalues();
    std::vector<Eigen::Index> order(static_cast<std::size_t>(rho.size()));
    for (Eigen::Index i = 0; i < rho.size(); ++i) order[static_cast<std::size_t>(i)] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return std::abs(rho(a)) > std::abs(rho(b)); });

    std::vector<EigenRow> rows;
    std::vector<Eigen::Index> picked;  // one representative per row
    std::vector<Eigen::Index> members;
    for (Eigen::Index idx : order) {
      if (rows.size() == opts.k) break;
      const cplx lam = 1.0 / rho(idx);
      const bool real = std::abs(lam.imag()) <= 1e-12 * std::abs(lam);
      if (!real && lam.imag() < 0) {
        members.push_back(idx);
        continue;
      }
      rows.push_back({real ? cplx(lam.real(), 0.0) : lam, !real});
      picked.push_back(idx);
      members.push_back(idx);
    }
    if (rows.size() < opts.k) throw Error("eigen: fewer eigenvalues than requested rows");

    const Mat<cplx> V = es.eigenvectors();
    double max_tail = 0.0;
    std::vector<double> resid;
    Mat<cplx> vecs(V.rows(), static_cast<Eigen::Index>(picked.size()));
    const Eigen::Index tail_len = std::max<Eigen::Index>(1, V.rows() / 10);
    for (std::size_t r = 0; r < picked.size(); ++r) {
      const Vec<cplx> v = V.col(picked[r]);
      vecs.col(static_cast<Eigen::Index>(r)) = v;
      max_tail = std::max(max_tail, v.tail(tail_len).cwiseAbs().maxCoeff() / v.norm());
      const cplx rh = rho(picked[r]);
      resid.push_back((E.cast<cplx>() * v - rh * v).norm() / (std::abs(rh) * v.norm()));
    }
    double cauchy = kInf;
    if (prev_rows.size() == rows.size()) {
      double s = 0.0;
      for (std::size_t r = 0; r < rows.size(); ++r) s += std::norm(rows[r].lambda - prev_rows[r]);
      cauchy = std::sqrt(s);
    }
    double lam_norm = 0.0;
    for (const auto& row : rows) lam_norm += std::norm(row.lambda);
    lam_norm = std::sqrt(lam_norm);

    res.history.push_back({N, cauchy, max_tail});
    res.rows = rows;
    res.rho.clear();
    for (Eigen::Index idx : members) res.rho.push_back(rho(idx));
    res.vectors = std::move(vecs);
    res.eigen_residuals = std::move(resid);
    res.N_final = N;
    prev_rows.clear();
    for (const auto& row : rows) prev_rows.push_back(row.lambda);
    if (cauchy <= opts.plateau_tol * lam_norm && max_tail <= opts.tail_tol) {
      res.converged = true;
      return res;
    }
  }
  throw EigenConvergenceError("eigen: no plateau by n_max", std::move(res));
}

ResolventContext::ResolventContext(double mu, std::size_t n_max, std::optional<double> omega, int threads,
                                   double gram_cutoff)
    : mu_(mu), n_max_(n_max), gram_cutoff_(gram_cutoff),
      transform_(DoubleExpTransform(omega ? *omega : select_omega(SingularityInfo{mu, 1.0}))) {
  if (!(mu > 0 && mu < 1)) throw Error("pseudospectra: mu must lie in (0, 1)");
  if (n_max < 4) throw Error("pseudospectra: n_max must be at least 4");
  // Operators on [0, 1] from those on [-1, 1]: I_[0,1]^mu = 2^{-mu} I_[-1,1]^mu.
  const double s = std::pow(2.0, -mu);
  Il_ = s * build_fio(transform_, mu, Side::left, n_max, KernelOptions{}, threads).A;
  Ir_ = s * build_fio(transform_, mu, Side::right, n_max, KernelOptions{}, threads).A;
  // w_k = int T_k psi' dy from the Chebyshev coefficients of psi'.
  const std::size_t K = 2 * n_max;
  const std::size_t M = K + 512;
  const auto ys = lobatto_points(M + 1);
  std::vector<double> dv(ys.size());
  for (std::size_t i = 0; i < ys.size(); ++i) dv[i] = derivative(transform_, ys[i]);
  const auto p = values_to_coeffs<double>(dv);
  auto iota = [](std::size_t m) { return m % 2 == 1 ? 0.0 : 2.0 / (1.0 - static_cast<double>(m) * static_cast<double>(m)); };
  std::vector<double> w(K, 0.0);
  for (std::size_t k = 0; k < K; ++k) {
    double s2 = 0.0;
    for (std::size_t j = 0; j < p.size(); ++j) s2 += p.coeffs[j] * 0.5 * (iota(j + k) + iota(j > k ? j - k : k - j));
    w[k] = s2;
  }
  const auto n = static_cast<Eigen::Index>(n_max);
  G_.resize(n, n);
  for (Eigen::Index a = 0; a < n; ++a) {
    for (Eigen::Index b = 0; b < n; ++b) {
      G_(a, b) = 0.5 * (w[static_cast<std::size_t>(a + b)] + w[static_cast<std::size_t>(std::abs(a - b))]);
    }
  }
}

Eigen::MatrixXd ResolventContext::gram(std::size_t N) const {
  if (N > n_max_) throw Error("pseudospectra: N exceeds n_max");
  const auto n = static_cast<Eigen::Index>(N);
  return G_.topLeftCorner(n, n);
}

const ResolventContext::Coordinates& ResolventContext::coordinates(std::size_t N) const {
  std::lock_guard<std::mutex> lock(coord_mutex_);
  if (auto it = coords_.find(N); it != coords_.end()) return *it->second;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram(N));
  const Eigen::VectorXd lam = es.eigenvalues();
  const double cut = gram_cutoff_ * lam.maxCoeff();
  Eigen::Index first = 0;
  while (first < lam.size() && lam(first) <= cut) ++first;
  const Eigen::Index k = lam.size() - first;
  const Eigen::MatrixXd V = es.eigenvectors().rightCols(k);
  const Eigen::VectorXd sq = lam.tail(k).cwiseSqrt();
  auto c = std::make_shared<Coordinates>();
  c->C = sq.asDiagonal() * V.transpose();
  c->Cinv = V * sq.cwiseInverse().asDiagonal();
  return *coords_.emplace(N, std::move(c)).first->second;
}

ResolventContext::Estimate ResolventContext::lanczos(cplx z, std::size_t N, std::size_t max_iter, double tol) const {
  if (N > n_max_) throw Error("pseudospectra: N exceeds n_max");
  const auto n = static_cast<Eigen::Index>(N);
  const Mat<cplx> Il = Il_.topLeftCorner(n, n).cast<cplx>();
  const Mat<cplx> Ir = Ir_.topLeftCorner(n, n).cast<cplx>();
  const Mat<cplx> Id = Mat<cplx>::Identity(n, n);
  const Eigen::PartialPivLU<Mat<cplx>> lu_l(z * Il - Id);
  const Eigen::PartialPivLU<Mat<cplx>> lu_r(std::conj(z) * Ir - Id);
  const auto& co = coordinates(N);
  const Mat<cplx> C = co.C.cast<cplx>();
  const Mat<cplx> Cinv = co.Cinv.cast<cplx>();
  auto apply = [&](const Vec<cplx>& x) -> Vec<cplx> {
    const Vec<cplx> v = lu_l.solve(Il * (Cinv * x));
    return C * lu_r.solve(Ir * v);
  };

  const Eigen::Index k = co.C.rows();
  std::mt19937_64 rng(20240607);
  std::normal_distribution<double> nd;
  Vec<cplx> q(k);
  for (Eigen::Index i = 0; i < k; ++i) q(i) = nd(rng);
  q.normalize();

  // Rayleigh-Ritz on the Krylov basis rather than the three-term tridiagonal: the
  // discrete right-sided solve is only approximately the adjoint of the left one.
  std::vector<Vec<cplx>> Q{q}, AQ;
  Estimate est;
  double theta_prev = 0.0;
  const std::size_t iters = std::min<std::size_t>(max_iter, static_cast<std::size_t>(k));
  for (std::size_t j = 0; j < iters; ++j) {
    AQ.push_back(apply(Q[j]));
    const auto m = static_cast<Eigen::Index>(AQ.size());
    Mat<cplx> H(m, m);
    for (Eigen::Index a = 0; a < m; ++a) {
      for (Eigen::Index b = 0; b < m; ++b) H(a, b) = Q[static_cast<std::size_t>(a)].dot(AQ[static_cast<std::size_t>(b)]);
    }
    const Mat<cplx> Hs = 0.5 * (H + H.adjoint());
    const double theta = Eigen::SelfAdjointEigenSolver<Mat<cplx>>(Hs, Eigen::EigenvaluesOnly).eigenvalues().maxCoeff();
    est.lambda_max = theta;
    est.iterations = j + 1;
    if (!std::isfinite(theta)) return est;
    Vec<cplx> w = AQ.back();
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& qi : Q) w -= qi.dot(w) * qi;
    }
    const double b = w.norm();
    if ((j > 0 && std::abs(theta - theta_prev) <= tol * std::abs(theta)) || b <= 1e-14 * std::abs(theta)) {
      est.converged = true;
      return est;
    }
    theta_prev = theta;
    Q.push_back(w / b);
  }
  est.converged = iters == static_cast<std::size_t>(k);
  return est;
}

double ResolventContext::dense_lambda_max(cplx z, std::size_t N) const {
  if (N > n_max_) throw Error("pseudospectra: N exceeds n_max");
  const auto n = static_cast<Eigen::Index>(N);
  const Mat<cplx> Il = Il_.topLeftCorner(n, n).cast<cplx>();
  const Mat<cplx> R = Eigen::PartialPivLU<Mat<cplx>>(z * Il - Mat<cplx>::Identity(n, n)).solve(Il);
  const auto& co = coordinates(N);
  const Mat<cplx> Y = co.C.cast<cplx>() * R * co.Cinv.cast<cplx>();
  const double s = Eigen::JacobiSVD<Mat<cplx>>(Y).singularValues()(0);
  return s * s;
}

PseudoPoint pseudospectra_point(const ResolventContext& ctx, cplx z, const PseudospectraJob& job) {
  PseudoPoint pt;
  pt.z = z;
  pt.flagged = true;
  double prev = -1.0;
  const std::size_t n_max = std::min(job.n_max, ctx.n_max());
  try {
    for (std::size_t N : schedule(job.n_start, n_max)) {
      const auto est = ctx.lanczos(z, N, job.lanczos_max_iter, job.lanczos_tol);
      if (!(est.lambda_max > 0) || !std::isfinite(est.lambda_max)) break;
      const double value = 1.0 / std::sqrt(est.lambda_max);
      pt.value = value;
      pt.N = N;
      pt.iterations = est.iterations;
      if (est.converged && prev > 0 && std::abs(value - prev) <= job.truncation_tol * value) {
        pt.flagged = false;
        break;
      }
      prev = est.converged ? value : -1.0;
    }
  } catch (const Error&) {
    pt.flagged = true;
  }
  return pt;
}

std::vector<PseudoPoint> pseudospectra(const PseudospectraJob& job) {
  if (job.n_re < 1 || job.n_im < 1) throw Error("pseudospectra: empty grid");
  if (!(job.re_hi >= job.re_lo) || !(job.im_hi >= job.im_lo)) throw Error("pseudospectra: invalid region");
  const ResolventContext ctx(job.mu, job.n_max, job.omega, job.threads);
  auto coord = [](double lo, double hi, std::size_t i, std::size_t n) {
    return n == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  };
  std::vector<PseudoPoint> out(job.n_re * job.n_im);
  const long total = static_cast<long>(out.size());
  auto work = [&](long idx) {
    const std::size_t i = static_cast<std::size_t>(idx) % job.n_re;
    const std::size_t k = static_cast<std::size_t>(idx) / job.n_re;
    const cplx z(coord(job.re_lo, job.re_hi, i, job.n_re), coord(job.im_lo, job.im_hi, k, job.n_im));
    out[static_cast<std::size_t>(idx)] = pseudospectra_point(ctx, z, job);
  };
#ifdef FRACSPEC_HAVE_OPENMP
#pragma omp parallel for schedule(dynamic) num_threads(std::max(1, job.threads))
  for (long idx = 0; idx < total; ++idx) work(idx);
#else
  for (long idx = 0; idx < total; ++idx) work(idx);
#endif
  return out;
}

template Vec<double> tcp_coeffs<double>(const Transform&, const std::function<double(const TransformedPoint&)>&, std::size_t);
template Vec<cplx> tcp_coeffs<cplx>(const Transform&, const std::function<cplx(const TransformedPoint&)>&, std::size_t);
template double max_difference<double>(const Transform&, const ChebSeries<double>&, const ChebSeries<double>&, std::span<const double>);
template double max_difference<cplx>(const Transform&, const ChebSeries<cplx>&, const ChebSeries<cplx>&, std::span<const double>);

}  // namespace fracspec
