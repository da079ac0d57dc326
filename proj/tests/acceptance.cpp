// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include <chrono>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "fracspec/solver.hpp"
#include "oracles.hpp"

using namespace fracspec;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double max_error(const Solution<double>& sol, const std::function<double(double)>& exact) {
  double err = 0.0;
  for (double x : equispaced(10000)) err = std::max(err, std::abs(sol(x) - exact(x)));
  return err;
}

// Smallest max error over the doubling schedule n_start..n_max, with the N attaining it.
std::pair<double, std::size_t> best_error(const ProblemSpec& spec, std::size_t n_start, std::size_t n_max,
                                          const std::function<double(double)>& exact) {
  OperatorCache cache(resolve_transform(spec), spec.threads);
  double best = std::numeric_limits<double>::infinity();
  std::size_t best_n = 0;
  for (std::size_t N = n_start; N <= n_max; N *= 2) {
    const double e = max_error(solve_at(spec, cache, N), exact);
    if (e < best) {
      best = e;
      best_n = N;
    }
  }
  return {best, best_n};
}

ProblemSpec abel(double mu, std::optional<KernelOptions> kernel = {}) {
  ProblemSpec s;
  Term t{mu, Side::left};
  if (kernel) t.kernel = *kernel;
  s.terms = {Term{0.0}, t};
  const double g = std::tgamma(1 + mu) / std::tgamma(1 + 2 * mu);
  s.rhs = [mu, g](const TransformedPoint& p) { return p.pow1p(mu) + g * p.pow1p(2 * mu); };
  s.singularities = {SingularityInfo{mu, 2.0}};
  return s;
}

Outcome abel_half() {
  const auto t0 = Clock::now();
  const auto [err, n] = best_error(abel(0.5), 64, 512, [](double x) { return std::sqrt(1 + x); });
  const double secs = seconds_since(t0);
  return {err <= 1e-12 && secs < 30.0, fmt("max error %.3e at N = %zu, %.1f s (limits 1e-12, 30 s)", err, n, secs)};
}

Outcome abel_small() {
  KernelOptions k;
  k.K = k.L = 120;
  k.max_rank = 50;
  k.require_tolerance = false;
  const auto t0 = Clock::now();
  const auto [err, n] = best_error(abel(0.01, k), 64, 1024, [](double x) { return std::pow(1 + x, 0.01); });
  const double secs = seconds_since(t0);
  return {err <= 1e-10 && secs < 120.0, fmt("max error %.3e at N = %zu, %.1f s (limits 1e-10, 120 s)", err, n, secs)};
}

Outcome riesz() {
  ProblemSpec s;
  s.terms = {Term{0.0}, Term{0.5, Side::riesz}};
  const double C = 2 * std::tgamma(0.5) * std::cos(kPi / 4);
  s.rhs = [C](const TransformedPoint& p) {
    const double sq = std::sqrt(0.5 * p.one_minus_x());
    const double at = std::log1p(sq) + 0.5 * (std::log(2.0) - p.log1px);
    return C * p.pow1p(0.5) + std::sqrt(2 * p.one_minus_x()) + p.one_plus_x() * (kPi / 2 + at);
  };
  s.singularities = {SingularityInfo{0.5, 5.0}};
  const auto [err, n] = best_error(s, 64, 512, [C](double x) { return C * std::sqrt(1 + x); });
  return {err <= 1e-11, fmt("max error %.3e at N = %zu (limit 1e-11)", err, n)};
}

Outcome mixed() {
  ProblemSpec s;
  Term t1{std::sqrt(2.0), Side::riesz};
  t1.a = [](const TransformedPoint& p) { return p.pow1p(2.0 / 3); };
  Term t2{kPi / 4, Side::right};
  t2.b = [](const TransformedPoint& p) { return p.pow1m(std::sqrt(3.0)); };
  Term t3{std::exp(1.0) / 3, Side::left};
  s.terms = {Term{0.0}, t1, t2, t3};
  s.rhs = [](const TransformedPoint&) { return 1.0; };
  s.singularities = {SingularityInfo{2.0 / 3, 1}, SingularityInfo{kPi / 4, 1}, SingularityInfo{std::exp(1.0) / 3, 1}};
  s.policy.n_max = 1024;
  s.policy.full_sweep = true;
  std::vector<ConvergenceRecord> hist;
  try {
    hist = solve_fie(s).history;
  } catch (const ConvergenceError& e) {
    hist = e.history();
  }
  std::string trail;
  double plateau = std::numeric_limits<double>::infinity();
  bool reached = false, rebound = false;
  for (const auto& h : hist) {
    trail += fmt(" %zu:%.1e", h.N, h.cauchy_error);
    if (reached && h.cauchy_error > 1e-10) rebound = true;
    if (h.cauchy_error <= 1e-12) reached = true;
    plateau = std::min(plateau, h.cauchy_error);
  }
  return {reached && !rebound, fmt("Cauchy errors%s; plateau %.2e (limit 1e-12), rebound above 1e-10: %s", trail.c_str(),
                                   plateau, rebound ? "yes" : "no")};
}

Outcome eigen() {
  const std::vector<cplx> ref{{1.355201481588489, 0},
                              {4.930015412112804, 3.094646626469975},
                              {8.217665634311189, 8.089668419364024},
                              {11.387725243090559, 13.804866459545323},
                              {14.564020446706387, 20.023206234983594},
                              {17.778713260368924, 26.640854355716016}};
  EigenOptions o;
  o.k = 6;
  o.n_max = 1024;
  EigenResult r;
  std::string note;
  try {
    r = solve_eigen(1.23456789, 0.123456789, o);
  } catch (const EigenConvergenceError& e) {
    r = e.partial();
    note = " (no plateau)";
  }
  if (r.rows.size() != ref.size()) return {false, fmt("expected 6 rows, got %zu", r.rows.size())};
  double worst = 0.0;
  for (std::size_t i = 0; i < ref.size(); ++i) {
    worst = std::max({worst, std::abs(r.rows[i].lambda.real() - ref[i].real()),
                      std::abs(std::abs(r.rows[i].lambda.imag()) - ref[i].imag())});
  }
  const double first = std::abs(r.rows[0].lambda.real() - ref[0].real());
  return {worst <= 1e-8 && first <= 1e-9 && note.empty(),
          fmt("first eigenvalue error %.2e (limit 1e-9), worst component error %.2e (limit 1e-8), N = %zu%s", first,
              worst, r.N_final, note.c_str())};
}

Outcome airy() {
  AiryOptions o;
  o.policy.n_start = 64;
  o.policy.n_max = 1024;
  o.policy.tol = 1e-10;
  o.policy.full_sweep = true;
  AiryResult r;
  try {
    r = solve_fde_airy(0.01, o);
  } catch (const ConvergenceError& e) {
    std::string trail;
    for (const auto& h : e.history()) trail += fmt(" %zu:%.1e", h.N, h.cauchy_error);
    return {false, "Cauchy tolerance not reached:" + trail};
  }
  std::string trail;
  bool geometric = true;
  double prev = std::numeric_limits<double>::infinity(), last = prev;
  for (const auto& h : r.u.history) {
    trail += fmt(" %zu:%.1e", h.N, h.cauchy_error);
    // strictly decreasing until the tolerance is met; the first entry has no predecessor
    if (std::isfinite(h.cauchy_error) && prev > 1e-10 && !(h.cauchy_error < prev)) geometric = false;
    prev = h.cauchy_error;
    last = h.cauchy_error;
  }
  const bool pass = geometric && last <= 1e-10 && r.residual_left <= 1e-10 && r.residual_right <= 1e-10;
  return {pass, fmt("|u(-1)| = %.1e, |u(1) - 1| = %.1e; Cauchy errors%s", r.residual_left, r.residual_right, trail.c_str())};
}

Outcome oracle_suite() {
  const auto ys = lobatto_points(33);
  double col_err = 0.0;
  for (double mu : {0.5, std::exp(1.0) / 3}) {
    const Transform t = DoubleExpTransform(select_omega(SingularityInfo{mu, 1.0}));
    for (Side side : {Side::left, Side::right}) {
      const auto op = build_fio(t, mu, side, 256);
      for (Eigen::Index n = 0; n <= 32; ++n) {
        const ChebSeries<double> col(std::vector<double>(op.A.col(n).data(), op.A.col(n).data() + op.A.rows()));
        for (double y : ys) {
          col_err = std::max(col_err, std::abs(col(y) - oracle::fractional_integral_of_Q(t, mu, side, static_cast<std::size_t>(n), y)));
        }
      }
    }
  }

  const std::size_t N = 256;
  double semi = 0.0;
  {
    const Transform t = DoubleExpTransform(select_omega(SingularityInfo{0.25, 1.0}));
    for (Side side : {Side::left, Side::right}) {
      const auto a = build_fio(t, 0.25, side, N);
      const auto b = build_fio(t, 0.5, side, N);
      for (int trial = 0; trial < 3; ++trial) {
        const Vec<double> c = tcp_coeffs<double>(
            t, [trial](const TransformedPoint& p) { return std::exp((trial + 1) * p.x) + std::cos(2.0 * trial * p.x); }, N);
        const Vec<double> d = a.A * (a.A * c) - b.A * c;
        semi = std::max(semi, d.head(N / 2).norm() / c.norm());
      }
    }
  }

  double anti = 0.0;
  {
    const Transform t = DoubleExpTransform(3.154);
    const auto op = build_fio(t, 1.0, Side::left, N);
    for (int deg = 0; deg <= 10; ++deg) {
      const Vec<double> c = tcp_coeffs<double>(t, [deg](const TransformedPoint& p) { return std::pow(p.x, deg); }, N);
      const Vec<double> img = op.A * c;
      const ChebSeries<double> s(std::vector<double>(img.data(), img.data() + img.size()));
      for (double x : equispaced(2001)) {
        const double exact = (std::pow(x, deg + 1) - std::pow(-1.0, deg + 1)) / (deg + 1);
        anti = std::max(anti, std::abs(tcp_eval<double>(t, s, x) - exact));
      }
    }
  }
  return {col_err <= 1e-8 && semi <= 1e-8 && anti <= 1e-11,
          fmt("columns 0..32 max error %.2e (limit 1e-8); semigroup %.2e (limit 1e-8); antiderivatives %.2e (limit 1e-11)",
              col_err, semi, anti)};
}

Outcome pseudospectra_suite() {
  PseudospectraJob job;
  job.n_re = 15;
  job.n_im = 15;

  // (a) Lanczos against dense SVD at moderate-norm points
  const std::size_t N = 256;
  ResolventContext ctx(job.mu, N);
  double lz = 0.0;
  for (cplx z : {cplx(-2, 5), cplx(0, 0), cplx(-1, -3), cplx(2, 6), cplx(-2, -7)}) {
    const auto est = ctx.lanczos(z, N, job.lanczos_max_iter, job.lanczos_tol);
    const double dense = ctx.dense_lambda_max(z, N);
    lz = std::max(lz, std::abs(est.lambda_max - dense) / dense);
  }

  // (b) exponentially large resolvent inside the quadrant
  ResolventContext full(job.mu, job.n_max);
  const double v8 = pseudospectra_point(full, cplx(8, 0), job).value;
  const double vref = pseudospectra_point(full, cplx(-2, 5), job).value;

  // (c) conjugate symmetry of the grid
  const auto pts = pseudospectra(job);
  double sym = 0.0;
  bool finite = true;
  for (std::size_t r = 0; r < job.n_im; ++r) {
    for (std::size_t c = 0; c < job.n_re; ++c) {
      const auto& p = pts[r * job.n_re + c];
      const auto& q = pts[(job.n_im - 1 - r) * job.n_re + c];
      finite = finite && std::isfinite(p.value) && p.value > 0;
      sym = std::max(sym, std::abs(p.value - q.value) / std::max(p.value, q.value));
    }
  }
  const bool pass = lz <= 1e-6 && v8 <= 1e-6 * vref && sym <= 1e-8 && finite;
  return {pass, fmt("(a) Lanczos vs dense max relative %.2e (limit 1e-6); (b) value(8) = %.2e, value(-2+5i) = %.4f, ratio %.1e "
                    "(limit 1e-6); (c) conjugate asymmetry %.2e (limit 1e-8) on %zux%zu grid",
                    lz, v8, vref, v8 / vref, sym, job.n_re, job.n_im)};
}

Outcome transform_suite() {
  const double w1 = select_omega(SingularityInfo{1.0 / 3.0, 1.0});
  const double w2 = select_omega(SingularityInfo{1e-5, 1.0});
  const double w3 = select_omega(SingularityInfo{});
  const bool omegas = std::abs(w1 - 4.238) < 5e-4 && std::abs(w2 - 14.646) < 5e-4 && std::abs(w3 - 3.154) < 5e-4;

  auto err_of = [](double omega, const std::function<double(const TransformedPoint&)>& f,
                   const std::function<double(double)>& fx, std::size_t degree) {
    const Transform t = DoubleExpTransform(omega);
    const auto c = tcp_expand<double>(t, f, degree);
    double err = 0.0;
    for (int k = 0; k < 20000; ++k) {
      const double x = -1.0 + 2.0 * k / 19999.0;
      err = std::max(err, std::abs(tcp_eval<double>(t, c, x) - fx(x)));
    }
    return err;
  };
  const double e1 = err_of(w1, [](const TransformedPoint& p) { return p.pow1m(1.0 / 3.0) * p.pow1p(0.5); },
                           [](double x) { return std::cbrt(1 - x) * std::sqrt(1 + x); }, 256);
  const double e2 = err_of(w2, [](const TransformedPoint& p) { return p.pow1p(1e-5); },
                           [](double x) { return std::pow(1 + x, 1e-5); }, 1024);
  const double e3 = err_of(w3, [](const TransformedPoint& p) { return std::exp(p.x); }, [](double x) { return std::exp(x); }, 128);
  return {omegas && e1 <= 1e-13 && e2 <= 1e-13 && e3 <= 1e-13,
          fmt("omega = %.3f, %.3f, %.3f; expansion errors %.2e, %.2e, %.2e (limit 1e-13)", w1, w2, w3, e1, e2, e3)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, Outcome (*)()>> criteria{
      {"abel mu=1/2", abel_half},
      {"abel mu=1e-2", abel_small},
      {"riesz", riesz},
      {"mixed-order plateau", mixed},
      {"eigenvalues", eigen},
      {"airy eps=1e-2", airy},
      {"operator oracle suite", oracle_suite},
      {"pseudospectra suite", pseudospectra_suite},
      {"transform suite", transform_suite},
  };
  int failures = 0;
  for (const auto& [name, fn] : criteria) {
    Outcome o;
    const auto t0 = Clock::now();
    try {
      o = fn();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failures;
    std::printf("%s  %-22s %s [%.1f s]\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str(), seconds_since(t0));
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
