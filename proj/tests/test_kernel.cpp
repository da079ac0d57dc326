#include <doctest.h>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include "fracspec/kernel.hpp"

using namespace fracspec;
using mp = boost::multiprecision::cpp_bin_float_100;

namespace {

mp psi_mp(double omega, mp y) { return tanh(boost::math::constants::pi<mp>() / 2 * sinh(mp(omega) * y)); }

double max_reconstruction_error(const LowRankKernel& k, const Transform& t, int grid) {
  double err = 0.0;
  for (int i = 0; i <= grid; ++i) {
    for (int j = 0; j <= grid; ++j) {
      const double y = -1.0 + 2.0 * i / grid;
      const double tt = double(j) / grid;
      err = std::max(err, std::abs(k(y, tt) - eval_G(t, k.mu, k.side, y, tt)));
    }
  }
  return err;
}

}  // namespace

TEST_CASE("eval_G closed forms") {
  const Transform t = DoubleExpTransform(4.0);
  for (double y : {-0.5, 0.0, 0.3, 0.9}) {
    CHECK(eval_G(t, 0.5, Side::left, y, 1.0) == doctest::Approx(std::pow(forward(t, y) + 1.0, 0.5)).epsilon(1e-13));
    CHECK(eval_G(t, 0.5, Side::right, y, 1.0) == doctest::Approx(std::exp(0.5 * log_one_minus(t, y))).epsilon(1e-13));
  }
  CHECK_THROWS_AS((void)eval_G(t, 0.5, Side::left, 1.5, 0.2), Error);
  CHECK_THROWS_AS((void)eval_G(t, 0.5, Side::left, 0.5, -0.2), Error);
}

TEST_CASE("eval_G t = 0 limit against 100-digit difference quotient") {
  const double omega = 4.0;
  const Transform t = DoubleExpTransform(omega);
  for (double y : {-0.8, -0.3, 0.0, 0.6}) {
    const mp h("1e-30");
    const mp yl(y);
    const mp q_left = (psi_mp(omega, yl) - psi_mp(omega, yl - (1 + yl) * h)) / h;
    const mp q_right = (psi_mp(omega, yl + (1 - yl) * h) - psi_mp(omega, yl)) / h;
    CHECK(eval_G(t, 0.5, Side::left, y, 0.0) == doctest::Approx(static_cast<double>(sqrt(q_left))).epsilon(1e-13));
    CHECK(eval_G(t, 0.5, Side::right, y, 0.0) == doctest::Approx(static_cast<double>(sqrt(q_right))).epsilon(1e-13));
  }
}

TEST_CASE("eval_G against the naive form in 100 digits") {
  const double omega = 4.0;
  const Transform t = DoubleExpTransform(omega);
  for (double y : {0.5, -0.9, 0.0, 0.99}) {
    for (double tt : {0.5, 1e-3, 1e-9, 0.999}) {
      const mp yl(y), tl(tt);
      const double left = static_cast<double>(pow((psi_mp(omega, yl) - psi_mp(omega, yl - (1 + yl) * tl)) / tl, mp(0.5)));
      const double right = static_cast<double>(pow((psi_mp(omega, yl + (1 - yl) * tl) - psi_mp(omega, yl)) / tl, mp(0.5)));
      CHECK(std::abs(eval_G(t, 0.5, Side::left, y, tt) - left) <= 1e-13 * left);
      CHECK(std::abs(eval_G(t, 0.5, Side::right, y, tt) - right) <= 1e-13 * right);
    }
  }
}

TEST_CASE("G vanishes to rounding near y = -1 for mu = 1/2") {
  const Transform t = DoubleExpTransform(4.0);
  double mx = 0.0;
  for (double y = -1.0; y <= -0.961; y += 1e-4) mx = std::max(mx, eval_G(t, 0.5, Side::left, y, 0.5));
  CHECK(mx < 2 * kMachineEps * 2.0);
  double scale = 0.0;
  for (int i = 0; i <= 200; ++i) scale = std::max(scale, eval_G(t, 0.5, Side::left, -1.0 + i / 100.0, 0.5));
  CHECK(scale == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("algebraic factorization is exact rank one") {
  const auto k1 = algebraic_factorization(1.0, 1.0);
  REQUIRE(k1.rank() == 1);
  for (double y : {-1.0, -0.2, 0.7, 1.0}) {
    CHECK(k1.sigma[0] * k1.fcols[0](y) * k1.gcols[0](0.3) == doctest::Approx(1.0 + y).epsilon(1e-14));
  }
  const auto k = algebraic_factorization(0.5, 0.5);
  CHECK(k.rank() == 1);
  CHECK(max_reconstruction_error(k, AlgebraicTransform(0.5), 50) < 1e-13);
}

TEST_CASE("ACA rank and reconstruction") {
  KernelOptions o;
  o.K = o.L = 80;
  const auto k1 = aca_approximate(DoubleExpTransform(select_omega(SingularityInfo{1.0, 1.0})), 1.0, Side::left, o);
  CHECK(k1.rank() == 28);

  const Transform t = DoubleExpTransform(select_omega(SingularityInfo{0.5, 1.0}));
  KernelOptions o2;
  o2.K = o2.L = 100;
  const auto kh = aca_approximate(t, 0.5, Side::left, o2);
  CHECK(kh.rank() <= 30);
  CHECK(kh.residual <= 1e-13);
  double gmax = 0.0;
  for (int i = 0; i <= 100; ++i)
    for (int j = 0; j <= 100; ++j) gmax = std::max(gmax, eval_G(t, 0.5, Side::left, -1 + 0.02 * i, 0.01 * j));
  CHECK(max_reconstruction_error(kh, t, 100) <= 10 * 1e-13 * gmax);

  const auto kr = aca_approximate(t, 0.5, Side::right, o2);
  CHECK(max_reconstruction_error(kr, t, 100) <= 10 * 1e-13 * gmax);

  const auto ka = aca_approximate(AlgebraicTransform(0.5), 0.5, Side::left, o2);
  CHECK(ka.rank() == 1);
}

TEST_CASE("ranks grow as mu decreases") {
  std::size_t prev = 0;
  for (double mu : {1.0, 0.1, 0.01}) {
    const Transform t = DoubleExpTransform(select_omega(SingularityInfo{mu, 1.0}));
    KernelOptions o;
    o.K = o.L = table_degree(mu);
    const auto k = aca_approximate(t, mu, Side::left, o);
    CHECK(k.rank() >= prev);
    prev = k.rank();
  }
  CHECK(table_rank(1.0) == 28);
  CHECK(table_degree(1e-2) == 120);
  CHECK(default_kernel_degree(1.0) == 100);
}

TEST_CASE("ACA reports failure at the rank cap") {
  KernelOptions o;
  o.K = o.L = 60;
  o.max_rank = 3;
  try {
    (void)aca_approximate(DoubleExpTransform(3.154), 0.5, Side::left, o);
    FAIL("expected AcaError");
  } catch (const AcaError& e) {
    CHECK(e.rank() == 3);
    CHECK(e.achieved_residual() > 1e-13);
  }
  o.require_tolerance = false;
  CHECK(aca_approximate(DoubleExpTransform(3.154), 0.5, Side::left, o).rank() == 3);
}
