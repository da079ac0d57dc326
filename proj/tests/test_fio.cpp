#include <doctest.h>

#include "fracspec/fio.hpp"
#include "oracles.hpp"

using namespace fracspec;

namespace {

LowRankKernel unit_kernel(double mu, Side side) {
  LowRankKernel k;
  k.sigma = {1.0};
  k.fcols = {ChebSeries<double>({1.0})};
  k.gcols = {ChebSeries<double>({1.0})};
  k.mu = mu;
  k.side = side;
  k.K = 0;
  k.L = 0;
  return k;
}

Eigen::VectorXd tcp_vector(const Transform& t, const std::function<double(const TransformedPoint&)>& f, std::size_t N) {
  const auto c = tcp_expand<double>(t, f, 2 * N);
  Eigen::VectorXd v(N);
  for (std::size_t k = 0; k < N; ++k) v(k) = c.coeffs[k];
  return v;
}

double max_value_error(const Transform& t, const Eigen::VectorXd& c, const std::function<double(double)>& exact) {
  const ChebSeries<double> s(std::vector<double>(c.data(), c.data() + c.size()));
  double err = 0.0;
  for (int k = 0; k <= 2000; ++k) {
    const double x = -1.0 + k / 1000.0;
    err = std::max(err, std::abs(tcp_eval<double>(t, s, x) - exact(x)));
  }
  return err;
}

ChebSeries<double> column(const Eigen::MatrixXd& A, Eigen::Index n) {
  return ChebSeries<double>(std::vector<double>(A.col(n).data(), A.col(n).data() + A.rows()));
}

}  // namespace

TEST_CASE("initial moments for g = 1, mu = 1") {
  const auto left = initial_moments(1.0, unit_kernel(1.0, Side::left), 0, Side::left);
  CHECK(left.phi0.degree() == 0);
  CHECK(left.phi0.coeffs[0] == 0.0);
  CHECK(left.phi1.coeffs[0] == doctest::Approx(0.5).epsilon(1e-15));
  REQUIRE(left.phi2.size() >= 2);
  CHECK(left.phi2.coeffs[0] == doctest::Approx(-2.0 / 3.0).epsilon(1e-14));
  CHECK(left.phi2.coeffs[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-14));

  const auto right = initial_moments(1.0, unit_kernel(1.0, Side::right), 0, Side::right);
  CHECK(right.phi2.coeffs[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
  CHECK(right.phi2.coeffs[1] == doctest::Approx(1.0 / 3.0).epsilon(1e-14));
}

TEST_CASE("one recurrence step against quadrature") {
  for (Side side : {Side::left, Side::right}) {
    const auto k = unit_kernel(1.0, side);
    const auto m = initial_moments(1.0, k, 0, side);
    const auto ops = build_ultra_ops(8);
    const double bnd = boundary_value(1.0, 3, k.gcols[0], side);
    const auto phi3 = recurrence_step(2, m.phi1, m.phi2, bnd, ops, side);
    for (std::size_t i = 3; i < phi3.size(); ++i) CHECK(std::abs(phi3.coeffs[i]) < 1e-14);
    CHECK(clenshaw_eval(phi3, side == Side::left ? 1.0 : -1.0) == doctest::Approx(bnd).epsilon(1e-13));
    for (int p = 0; p <= 10; ++p) {
      const double y = -1.0 + 0.2 * p;
      const double ref = oracle::moment_polynomial(1.0, 3, y, side, [](double) { return 1.0; });
      CHECK(std::abs(phi3(y) - ref) < 1e-12);
    }
  }
}

TEST_CASE("moment tables against quadrature") {
  const double mu = 0.5;
  const Transform t = DoubleExpTransform(select_omega(SingularityInfo{mu, 1.0}));
  for (Side side : {Side::left, Side::right}) {
    const auto kernel = make_kernel(t, mu, side);
    for (std::size_t j : {std::size_t{0}, kernel.rank() / 2, kernel.rank() - 1}) {
      const auto table = build_moment_table(mu, kernel, j, 40, side);
      REQUIRE(table.columns.size() == 41);
      CHECK(table.columns[0].degree() == 0);
      CHECK(table.columns[0].coeffs[0] == 0.0);
      for (std::size_t n = 1; n <= 40; ++n) {
        const auto& c = table.columns[n];
        double nrm = 0.0, high = 0.0;
        for (std::size_t i = 0; i < c.size(); ++i) {
          nrm = std::max(nrm, std::abs(c.coeffs[i]));
          if (i >= n) high = std::max(high, std::abs(c.coeffs[i]));
        }
        CHECK(high <= 1e-13 * nrm);
      }
      const auto& g = kernel.gcols[j];
      for (std::size_t n : {1u, 2u, 3u, 7u, 12u, 20u}) {
        for (double y : {-1.0, -0.7, 0.0, 0.45, 1.0}) {
          const double ref = oracle::moment_polynomial(mu, n, y, side, [&](double tt) { return g(2 * tt - 1); });
          CHECK(std::abs(table.columns[n](y) - ref) < 1e-11);
        }
      }
    }
  }
}

TEST_CASE("column zero and classical integrals") {
  const std::size_t N = 256;
  SUBCASE("column zero is the integral of one") {
    for (Side side : {Side::left, Side::right}) {
      const double mu = 0.5;
      const Transform t = DoubleExpTransform(select_omega(SingularityInfo{mu, 1.0}));
      const auto op = build_fio(t, mu, side, N);
      const auto want = endpoint_power_coeffs(t, mu, side, N);
      double err = 0.0;
      for (std::size_t k = 0; k < N; ++k) err = std::max(err, std::abs(op.A(k, 0) - want[k] / std::tgamma(1.5)));
      CHECK(err < 1e-14);
      const double x0 = 0.3;
      const double exact = std::pow(side == Side::left ? 1 + x0 : 1 - x0, mu) / std::tgamma(1 + mu);
      CHECK(tcp_eval<double>(t, column(op.A, 0), x0) == doctest::Approx(exact).epsilon(1e-13));
    }
  }
  SUBCASE("mu = 1 maps x to (x^2 - 1) / 2") {
    const Transform t = DoubleExpTransform(3.154);
    const auto op = build_fio(t, 1.0, Side::left, N);
    const Eigen::VectorXd c = tcp_vector(t, [](const TransformedPoint& p) { return p.x; }, N);
    CHECK(max_value_error(t, op.A * c, [](double x) { return 0.5 * (x * x - 1); }) < 1e-12);
  }
  SUBCASE("mu = 1/2 maps sqrt(1+x) to Gamma(3/2) (1+x)") {
    const Transform t = DoubleExpTransform(select_omega(SingularityInfo{0.5, 1.0}));
    const auto op = build_fio(t, 0.5, Side::left, N);
    const Eigen::VectorXd c = tcp_vector(t, [](const TransformedPoint& p) { return p.pow1p(0.5); }, N);
    CHECK(max_value_error(t, op.A * c, [](double x) { return std::tgamma(1.5) * (1 + x); }) < 1e-12);
  }
  SUBCASE("antiderivatives of monomials up to degree 10") {
    const Transform t = DoubleExpTransform(3.154);
    const auto op = build_fio(t, 1.0, Side::left, N);
    for (int d = 0; d <= 10; ++d) {
      const Eigen::VectorXd c = tcp_vector(t, [d](const TransformedPoint& p) { return std::pow(p.x, d); }, N);
      const double err = max_value_error(t, op.A * c, [d](double x) {
        return (std::pow(x, d + 1) - std::pow(-1.0, d + 1)) / (d + 1);
      });
      CHECK(err < 1e-11);
    }
  }
}

TEST_CASE("lower bandwidth") {
  const double mu = 0.5;
  const Transform t = DoubleExpTransform(select_omega(SingularityInfo{mu, 1.0}));
  for (Side side : {Side::left, Side::right}) {
    const auto op = build_fio(t, mu, side, 300);
    const double mx = op.A.cwiseAbs().maxCoeff();
    double outside = 0.0;
    for (Eigen::Index j = 0; j < op.A.cols(); ++j)
      for (Eigen::Index i = j + static_cast<Eigen::Index>(op.lower_bandwidth) + 1; i < op.A.rows(); ++i)
        outside = std::max(outside, std::abs(op.A(i, j)));
    CHECK(outside <= 1e-13 * mx);
    CHECK(op.profile.lower <= op.lower_bandwidth);
    CHECK(op.lower_bandwidth == op.kernel_K + 1);
  }
}

TEST_CASE("columns agree with adaptive quadrature of the defining integral") {
  const auto ys = lobatto_points(33);
  for (double mu : {0.5, 2.718281828459045 / 3}) {
    const Transform t = DoubleExpTransform(select_omega(SingularityInfo{mu, 1.0}));
    for (Side side : {Side::left, Side::right}) {
      const auto op = build_fio(t, mu, side, 256);
      double err = 0.0;
      for (std::size_t n = 0; n <= 32; ++n) {
        const auto col = column(op.A, static_cast<Eigen::Index>(n));
        for (double y : ys) err = std::max(err, std::abs(col(y) - oracle::fractional_integral_of_Q(t, mu, side, n, y)));
      }
      MESSAGE("mu = " << mu << " side = " << to_string(side) << " max error " << err);
      CHECK(err < 1e-8);
    }
  }
}

TEST_CASE("algebraic transform columns agree with quadrature") {
  const auto ys = lobatto_points(33);
  const Transform t = AlgebraicTransform(0.5);
  const auto op = build_fio(t, 0.5, Side::left, 64);
  double err = 0.0;
  for (std::size_t n = 0; n <= 20; ++n) {
    const auto col = column(op.A, static_cast<Eigen::Index>(n));
    for (double y : ys) err = std::max(err, std::abs(col(y) - oracle::fractional_integral_of_Q(t, 0.5, Side::left, n, y)));
  }
  CHECK(err < 1e-8);
}

TEST_CASE("semigroup property") {
  const Transform t = DoubleExpTransform(select_omega(SingularityInfo{0.25, 1.0}));
  const std::size_t N = 256;
  for (Side side : {Side::left, Side::right}) {
    const auto a = build_fio(t, 0.25, side, N);
    const auto b = build_fio(t, 0.5, side, N);
    for (int trial = 0; trial < 3; ++trial) {
      const Eigen::VectorXd c = tcp_vector(
          t, [trial](const TransformedPoint& p) { return std::exp((trial + 1) * p.x) + std::cos(2.0 * trial * p.x); }, N);
      const Eigen::VectorXd d = a.A * (a.A * c) - b.A * c;
      CHECK(d.head(N / 2).norm() <= 1e-8 * c.norm());
    }
  }
}

TEST_CASE("Riesz operator") {
  CHECK(riesz_factor(0.5) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
  const Transform t = DoubleExpTransform(select_omega(SingularityInfo{0.5, 5.0}));
  CHECK_THROWS_AS((void)build_riesz(3.0, t, 32), Error);
  CHECK_THROWS_AS((void)build_riesz(1.0 + 1e-10, t, 32), Error);

  const std::size_t N = 256;
  const auto op = build_riesz(0.5, t, N);
  CHECK(op.side == Side::riesz);
  const double C = 2 * std::tgamma(0.5) * std::cos(kPi / 4);
  const Eigen::VectorXd c = tcp_vector(t, [C](const TransformedPoint& p) { return C * p.pow1p(0.5); }, N);
  const double err = max_value_error(t, op.A * c, [](double x) {
    if (x <= -1.0) return 2.0;
    const double sq = std::sqrt(0.5 * (1 - x));
    return std::sqrt(2 * (1 - x)) + (1 + x) * (kPi / 2 + std::log1p(sq) + 0.5 * std::log(2 / (1 + x)));
  });
  CHECK(err < 1e-11);

  const auto l = build_fio(t, 0.5, Side::left, 64);
  const auto r = build_fio(t, 0.5, Side::right, 64);
  const auto combined = riesz_combine(l, r);
  CHECK((combined.A - (l.A + r.A) / std::sqrt(2.0)).cwiseAbs().maxCoeff() < 1e-15);
}
