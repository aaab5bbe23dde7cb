#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

#include "evoscalar/error.hpp"
#include "evoscalar/specfun.hpp"

using namespace evo::specfun;
using mp = boost::multiprecision::cpp_bin_float_50;

namespace {

// E_{1/2}(x) = exp(x^2) erfc(-x), in 50 digits.
double ml_half_oracle(double x) {
  mp xm(x);
  return static_cast<double>(exp(xm * xm) * boost::math::erfc(-xm));
}

// Direct power series in 50 digits; only used where it converges comfortably.
double ml_series_oracle(double alpha, double delta, double x) {
  using mp100 = boost::multiprecision::cpp_bin_float_100;
  mp100 sum = 0, zk = 1;
  const double peak = std::pow(std::fabs(x), 1.0 / alpha) + 2.0;
  for (int k = 0; k < 20000; ++k) {
    mp100 arg = mp100(alpha) * k + mp100(delta);
    mp100 term = 0;
    if (!(arg <= 0 && arg == floor(arg))) term = zk / boost::math::tgamma(arg);
    sum += term;
    if (alpha * k + delta > peak && abs(term) < 1e-40) break;
    zk *= mp100(x);
  }
  return static_cast<double>(sum);
}

double multinomial_oracle(const std::vector<double>& a, double b, const std::vector<double>& z) {
  // m = 2 only: sum_{l1,l2} (l1+l2)!/(l1! l2!) z1^l1 z2^l2 / Gamma(b + a1 l1 + a2 l2)
  mp sum = 0;
  for (int l1 = 0; l1 < 60; ++l1) {
    for (int l2 = 0; l2 < 60; ++l2) {
      mp coef = boost::math::tgamma(mp(l1 + l2 + 1)) / (boost::math::tgamma(mp(l1 + 1)) * boost::math::tgamma(mp(l2 + 1)));
      mp arg = mp(b) + mp(a[0]) * l1 + mp(a[1]) * l2;
      sum += coef * pow(mp(z[0]), l1) * pow(mp(z[1]), l2) / boost::math::tgamma(arg);
    }
  }
  return static_cast<double>(sum);
}

}  // namespace

TEST_CASE("gamma values and poles") {
  CHECK(evo::specfun::gamma(1.0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(evo::specfun::gamma(5.0) == doctest::Approx(24.0).epsilon(1e-15));
  CHECK(evo::specfun::gamma(0.5) == doctest::Approx(std::sqrt(std::numbers::pi)).epsilon(1e-14));
  CHECK(evo::specfun::gamma(-0.5) == doctest::Approx(-2.0 * std::sqrt(std::numbers::pi)).epsilon(1e-14));
  CHECK_THROWS_AS(evo::specfun::gamma(0.0), evo::InputError);
  CHECK_THROWS_AS(evo::specfun::gamma(-3.0), evo::InputError);
  CHECK(rgamma(-2.0) == 0.0);
  for (double x : {0.1, 1.7, 33.3, 99.9, 100.5, 150.25, 169.5}) {
    double ref = static_cast<double>(boost::math::lgamma(mp(x)));
    CHECK(std::fabs(log_gamma(x) - ref) <= 1e-13 * std::max(1.0, std::fabs(ref)));
    double g = static_cast<double>(boost::math::tgamma(mp(x)));
    CHECK(std::fabs(evo::specfun::gamma(x) - g) <= 1e-13 * g);
  }
}

TEST_CASE("Mittag-Leffler closed forms") {
  CHECK(mittag_leffler(MLParams{1, 1}, 1.0) == doctest::Approx(std::exp(1.0)).epsilon(1e-14));
  CHECK(mittag_leffler(MLParams{2, 1}, -std::numbers::pi * std::numbers::pi) == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(std::fabs(mittag_leffler(MLParams{0.5, 1}, -1.0) - 0.4275835761558070) < 1e-13);
  for (double x = -20; x <= 20; x += 0.25) {
    double e = mittag_leffler(MLParams{1, 1}, x);
    CHECK(std::fabs(e - std::exp(x)) / std::exp(x) < 1e-10);
  }
  for (double x = 0; x <= 10; x += 0.05) {
    CHECK(std::fabs(mittag_leffler(MLParams{2, 1}, -x * x) - std::cos(x)) < 1e-10);
  }
  for (double x = -30; x <= 5; x += 0.5) {
    double ref = ml_half_oracle(x);
    CHECK(std::fabs(mittag_leffler(MLParams{0.5, 1}, x) - ref) <= 1e-10 * std::fabs(ref));
  }
  // E_{1,2}(z) = (e^z - 1)/z
  for (double x : {-50.0, -3.0, 0.5, 4.0}) {
    double ref = std::expm1(x) / x;
    CHECK(std::fabs(mittag_leffler(MLParams{1, 2}, x) - ref) <= 1e-10 * std::fabs(ref));
  }
}

TEST_CASE("Mittag-Leffler at the origin") {
  for (double a = 0.25; a <= 1.951; a += 0.1) {
    for (double d : {0.5, 1.0, 2.0}) {
      CHECK(std::fabs(mittag_leffler(MLParams{a, d}, 0.0) * evo::specfun::gamma(d) - 1.0) < 1e-12);
    }
  }
}

TEST_CASE("Mittag-Leffler against extended-precision series") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> ua(0.2, 1.9), ud(0.3, 2.0), ux(-5.0, 5.0);
  for (int i = 0; i < 60; ++i) {
    double a = ua(rng), d = ud(rng), x = ux(rng);
    double ref = ml_series_oracle(a, d, x);
    double got = mittag_leffler(MLParams{a, d}, x);
    CHECK_MESSAGE(std::fabs(got - ref) <= 1e-10 * std::fabs(ref) + 1e-15, "a=", a, " d=", d, " x=", x);
  }
}

TEST_CASE("Mittag-Leffler on sector rays for large |z|") {
  // Along the negative axis the value decays like -1/(z Gamma(d-a)); the
  // imaginary axis for a < 1 is checked through conjugate symmetry and the
  // two independent large-|z| routes.
  for (double a : {0.3, 0.7, 1.2, 1.8}) {
    for (double r : {10.0, 100.0, 1000.0}) {
      auto v = mittag_leffler_detail(MLParams{a, 1.0}, cplx(-r, 0.0));
      CHECK(std::isfinite(v.value.real()));
      CHECK(v.error_estimate <= 1e-6 * std::abs(v.value) + 1e-14);
      if (a < 1.0) {
        auto up = mittag_leffler(MLParams{a, 1.0}, cplx(0.0, r));
        auto dn = mittag_leffler(MLParams{a, 1.0}, cplx(0.0, -r));
        CHECK(std::abs(up - std::conj(dn)) <= 1e-9 * std::abs(up));
      }
    }
  }
  // E_{1/2}(-1000) via the oracle.
  double ref = ml_half_oracle(-1000.0);
  CHECK(std::fabs(mittag_leffler(MLParams{0.5, 1}, -1000.0) - ref) <= 1e-6 * ref);
}

TEST_CASE("Mittag-Leffler parameter errors") {
  CHECK_THROWS_AS(mittag_leffler(MLParams{0.0, 1.0}, 1.0), evo::InputError);
  CHECK_THROWS_AS(mittag_leffler(MLParams{-1.0, 1.0}, 1.0), evo::InputError);
  CHECK_THROWS_AS(ml_bound_constant(MLParams{2.0, 1.0}, 10, 10), evo::InputError);
  CHECK_THROWS_AS(ml_bound_constant_ray(MLParams{0.5, 1.0}, 0.5, 10, 10), evo::InputError);
}

TEST_CASE("complete monotonicity proxy") {
  for (double b : {0.3, 0.6, 0.9, 1.0}) {
    double prev = 1.0;
    for (double t : bound_grid(1e4, 400)) {
      double v = mittag_leffler(MLParams{b, 1.0}, -t);
      CHECK(v >= 0.0);
      CHECK(v <= prev + 1e-14);
      prev = v;
    }
  }
}

TEST_CASE("bound constant") {
  CHECK(ml_bound_constant(MLParams{1, 1}, 1e4, 10000) == doctest::Approx(1.0).epsilon(1e-12));
  double c = ml_bound_constant(MLParams{0.5, 0.5}, 1e2, 1000);
  double fine = ml_bound_constant(MLParams{0.5, 0.5}, 1e2, 10000);
  CHECK(std::isfinite(c));
  CHECK(std::fabs(c - fine) <= 0.01 * fine);
}

TEST_CASE("multinomial Mittag-Leffler") {
  std::vector<double> z0{0.0, 0.0};
  CHECK(multinomial_ml(MultiMLParams{{0.3, 0.6}, 0.9}, z0) == doctest::Approx(rgamma(0.9)).epsilon(1e-15));
  std::vector<double> z{-0.5, -0.25};
  double ref = multinomial_oracle({0.3, 0.6}, 0.9, z);
  CHECK(std::fabs(multinomial_ml(MultiMLParams{{0.3, 0.6}, 0.9}, z) - ref) <= 1e-12 * std::fabs(ref));
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> ua(0.2, 1.5), uz(-3, 3);
  for (int i = 0; i < 20; ++i) {
    double a = ua(rng), b = ua(rng), x = uz(rng);
    std::vector<double> zz{x};
    CHECK(std::fabs(multinomial_ml(MultiMLParams{{a}, b}, zz) - mittag_leffler(MLParams{a, b}, x)) < 1e-10);
  }
  std::vector<double> bad{1.0};
  CHECK_THROWS_AS(multinomial_ml(MultiMLParams{{0.3, 0.6}, 0.9}, bad), evo::InputError);
}
