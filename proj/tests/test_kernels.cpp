#include <doctest.h>

#include <cmath>
#include <sstream>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "evoscalar/error.hpp"
#include "evoscalar/kernels.hpp"
#include "evoscalar/specfun.hpp"

using namespace evo::kernels;

namespace {

std::vector<Kernel> cp_catalog() {
  return {make_constant(1.0),          make_power_law(0.3),          make_power_law(0.7),
          make_caputo_dual(0.4),       make_rayleigh_stokes(0.5, 1), make_rayleigh_stokes(0.3, 2.0),
          make_multi_term(0.9, {0.5}, {1.0}), make_multi_term(1.0, {0.6, 0.3}, {0.5, 2.0})};
}

std::vector<double> log_times(double lo, double hi, int n) {
  std::vector<double> t;
  for (int i = 0; i < n; ++i) t.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1)));
  return t;
}

// Rayleigh-Stokes partner: its transform is 1/(1 + gamma s^beta).
double rs_partner(double beta, double gamma, double t) {
  return std::pow(t, beta - 1.0) / gamma *
         evo::specfun::mittag_leffler(evo::specfun::MLParams{beta, beta}, -std::pow(t, beta) / gamma);
}

}  // namespace

TEST_CASE("kernel_eval closed forms") {
  CHECK(kernel_eval(make_power_law(0.5), 1.0) == doctest::Approx(0.5641895835477563).epsilon(1e-14));
  CHECK(kernel_eval(make_constant(1.0), 7.3) == 1.0);
  CHECK(kernel_eval(make_rayleigh_stokes(0.5, 2.0), 4.0) == doctest::Approx(1.5641895835477563).epsilon(1e-14));
  CHECK_THROWS_AS(kernel_eval(make_power_law(0.5), 0.0), evo::InputError);
  CHECK_THROWS_AS(kernel_eval(make_caputo_dual(0.5), 0.0), evo::InputError);
  CHECK(kernel_eval(make_power_law(1.5), 0.0) == 0.0);
  CHECK_THROWS_AS(make_caputo_dual(1.0), evo::InputError);
  CHECK_THROWS_AS(make_power_law(0.0), evo::InputError);
}

TEST_CASE("cumulative integrals against quadrature") {
  boost::math::quadrature::tanh_sinh<double> q;
  for (const Kernel& k : cp_catalog()) {
    for (double t : {0.05, 0.7, 3.0}) {
      double oracle = q.integrate([&](double u) { return kernel_eval(k, u); }, 0.0, t);
      CHECK_MESSAGE(std::fabs(cumulative_integral(k, t) - oracle) <= 1e-8 * std::fabs(oracle), describe(k), " t=", t);
      double oracle2 = q.integrate([&](double u) { return (t - u) * kernel_eval(k, u); }, 0.0, t);
      CHECK_MESSAGE(std::fabs(second_integral(k, t) - oracle2) <= 1e-8 * std::fabs(oracle2), describe(k), " t=", t);
    }
  }
  CHECK(cumulative_integral(make_rayleigh_stokes(0.5, 2.0), 4.0) ==
        doctest::Approx(4.0 + 2.0 * 2.0 / std::tgamma(1.5)).epsilon(1e-14));
}

TEST_CASE("multi-term series and transform inversion agree") {
  Kernel k = make_multi_term(0.8, {0.4}, {1.5});
  const auto& m = std::get<MultiTerm>(k.kind);
  for (double t : {0.05, 0.3, 1.0, 1.5}) {
    auto f_hat = [&](std::complex<double> s) { return 1.0 / (std::pow(s, 0.8) + 1.5 * std::pow(s, 0.4)); };
    double inv = talbot_inverse(f_hat, t);
    double ser = kernel_eval(k, t);
    CHECK_MESSAGE(std::fabs(inv - ser) <= 1e-8 * std::fabs(ser), "t=", t);
  }
  (void)m;
  // m = 1 with a single lower term is a two-parameter Mittag-Leffler kernel:
  // 1/(s^b + c s^{b1}) = s^{-b1}/(s^{b-b1} + c) -> t^{b-1} E_{b-b1,b}(-c t^{b-b1}).
  Kernel one = make_multi_term(0.9, {0.5}, {2.0});
  for (double t : {0.2, 2.0, 20.0}) {
    double ref = std::pow(t, -0.1) * evo::specfun::mittag_leffler(evo::specfun::MLParams{0.4, 0.9}, -2.0 * std::pow(t, 0.4));
    CHECK(std::fabs(kernel_eval(one, t) - ref) <= 1e-8 * std::fabs(ref));
  }
}

TEST_CASE("completely positive catalog samples") {
  auto times = log_times(1e-4, 50.0, 200);
  for (const Kernel& k : cp_catalog()) {
    CHECK(k.cp_flag);
    CHECK_MESSAGE(check_cp_samples(k, times), describe(k));
    // cumulative integral nondecreasing with nonincreasing increments
    double prev = 0.0, prev_inc = std::numeric_limits<double>::infinity();
    for (int i = 1; i <= 200; ++i) {
      double c = cumulative_integral(k, 0.05 * i);
      CHECK(c >= prev);
      CHECK(c - prev <= prev_inc * (1 + 1e-10));
      prev_inc = c - prev;
      prev = c;
    }
  }
  CHECK_FALSE(make_power_law(1.5).cp_flag);
}

TEST_CASE("cumulative integral matches trapezoid away from the origin") {
  for (const Kernel& k : cp_catalog()) {
    const double dt = 1e-3, a = 0.5, b = 2.0;
    double trap = 0.0;
    for (double t = a; t < b - 1e-12; t += dt) trap += 0.5 * dt * (kernel_eval(k, t) + kernel_eval(k, t + dt));
    double exact = cumulative_integral(k, b) - cumulative_integral(k, a);
    CHECK(std::fabs(trap - exact) < dt);
  }
}

TEST_CASE("tabulated kernels") {
  evo::fraccalc::RealSignal one{0.0, 0.01, std::vector<double>(301, 1.0)};
  Kernel k = make_tabulated(one);
  CHECK(std::fabs(cumulative_integral(k, 3.0) - 3.0) < 0.01);
  CHECK(second_integral(k, 2.0) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(k.cp_flag);
  CHECK_THROWS_AS(kernel_eval(k, 3.5), evo::InputError);

  std::istringstream in("t,k\n0,3\n0.5,2\n1.0,1.5\n");
  Kernel t = load_tabulated(in);
  CHECK(kernel_eval(t, 0.25) == doctest::Approx(2.5));
  CHECK(cumulative_integral(t, 1.0) == doctest::Approx(1.25 + 0.875));
  CHECK(t.cp_flag);
  std::istringstream bad_header("x,y\n0,1\n1,2\n");
  CHECK_THROWS_AS(load_tabulated(bad_header), evo::InputError);
  std::istringstream not_increasing("t,k\n0,1\n0,2\n");
  CHECK_THROWS_AS(load_tabulated(not_increasing), evo::InputError);
  std::istringstream rising("t,k\n0,1\n1,2\n2,3\n");
  CHECK_FALSE(load_tabulated(rising).cp_flag);
}

TEST_CASE("sonine_solve reproduces the analytic partner") {
  for (double beta : {0.2, 0.5, 0.8}) {
    const double dt = 1e-3;
    Kernel big = sonine_solve(make_caputo_dual(beta), 2.0, dt);
    const auto& tab = std::get<Tabulated>(big.kind);
    double worst = 0.0;
    for (std::size_t i = 10; i < tab.signal.size(); ++i) {
      double t = tab.signal.time(i);
      double exact = std::pow(t, beta - 1.0) / std::tgamma(beta);
      worst = std::max(worst, std::fabs(tab.signal.values[i] - exact) / exact);
    }
    CHECK_MESSAGE(worst < 10 * std::pow(dt, std::min(beta, 1 - beta)), "beta=", beta, " worst=", worst);
    CHECK(big.cp_flag);
  }
}

TEST_CASE("sonine_solve of the Rayleigh-Stokes kernel") {
  const double dt = 1e-3;
  Kernel k = make_rayleigh_stokes(0.5, 1.0);
  Kernel big = sonine_solve(k, 2.0, dt);
  CHECK(big.cp_flag);
  const auto& tab = std::get<Tabulated>(big.kind);
  double worst = 0.0;
  for (std::size_t i = 20; i < tab.signal.size(); ++i) {
    double t = tab.signal.time(i);
    double exact = rs_partner(0.5, 1.0, t);
    worst = std::max(worst, std::fabs(tab.signal.values[i] - exact) / exact);
  }
  CHECK(worst < 0.02);
  SonineReport rep = sonine_verify(SoninePair{k, big}, 2.0, dt, 1e-4);
  CHECK_MESSAGE(rep.pass, "deviation ", rep.max_deviation, " at t=", rep.worst_t);
}

TEST_CASE("sonine_verify on analytic pairs") {
  SonineReport ok = sonine_verify(SoninePair{make_caputo_dual(0.4), make_power_law(0.4)}, 2.0, 1e-3, 1e-6);
  CHECK_MESSAGE(ok.pass, ok.max_deviation);
  SonineReport bad = sonine_verify(SoninePair{make_constant(1.0), make_constant(1.0)}, 2.0, 1e-2, 1e-4);
  CHECK_FALSE(bad.pass);
  CHECK(bad.max_deviation == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("sonine_solve rejects delta-like partners") {
  CHECK_THROWS_AS(sonine_solve(make_constant(1.0), 1.0, 1e-3), evo::NumericalError);
  CHECK_THROWS_AS(sonine_solve(make_power_law(1.5), 1.0, 1e-3), evo::NumericalError);
}

TEST_CASE("Laplace transforms satisfy the Sonine relation") {
  std::complex<double> s(1.3, 0.7);
  auto prod = kernel_laplace(make_caputo_dual(0.3), s) * kernel_laplace(make_power_law(0.3), s);
  CHECK(std::abs(prod - 1.0 / s) < 1e-14);
}
