#include <doctest.h>

#include <cmath>
#include <random>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "evoscalar/error.hpp"
#include "evoscalar/fraccalc.hpp"
#include "evoscalar/specfun.hpp"

using namespace evo::fraccalc;
using evo::specfun::MLParams;
using evo::specfun::mittag_leffler;

namespace {

RealSignal sample(double dt, double t_end, double (*f)(double)) {
  RealSignal s{0.0, dt, {}};
  const auto n = static_cast<std::size_t>(std::llround(t_end / dt)) + 1;
  for (std::size_t i = 0; i < n; ++i) s.values.push_back(f(dt * static_cast<double>(i)));
  return s;
}

RealSignal sample_pow(double dt, double t_end, double mu) {
  RealSignal s{0.0, dt, {}};
  const auto n = static_cast<std::size_t>(std::llround(t_end / dt)) + 1;
  for (std::size_t i = 0; i < n; ++i) s.values.push_back(std::pow(dt * static_cast<double>(i), mu));
  return s;
}

double max_err_rl_power(double beta, double mu, double dt) {
  RealSignal out = rl_integral(beta, sample_pow(dt, 1.0, mu));
  double c = std::tgamma(mu + 1) / std::tgamma(mu + beta + 1);
  double e = 0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    e = std::max(e, std::fabs(out.values[i] - c * std::pow(out.time(i), mu + beta)));
  }
  return e;
}

double max_err_caputo_power(double beta, double mu, double dt) {
  RealSignal f = sample_pow(dt, 1.0, mu);
  std::vector<double> init{mu == 0 ? 1.0 : 0.0};
  if (beta > 1) init.push_back(mu == 1 ? 1.0 : 0.0);
  CaputoResult r = caputo_derivative(beta, f, init);
  // Integer powers below the order are annihilated.
  double c = mu <= std::floor(beta) ? 0.0 : std::tgamma(mu + 1) / std::tgamma(mu + 1 - beta);
  double e = 0;
  for (std::size_t i = 1; i < r.signal.size(); ++i) {
    double t = r.signal.time(i);
    e = std::max(e, std::fabs(r.signal.values[i] - c * std::pow(t, mu - beta)));
  }
  return e;
}

}  // namespace

TEST_CASE("rl_integral of order one is integration") {
  RealSignal one = sample(0.01, 1.0, [](double) { return 1.0; });
  RealSignal out = rl_integral(1.0, one);
  for (std::size_t i = 0; i < out.size(); ++i) CHECK(out.values[i] == doctest::Approx(out.time(i)).epsilon(1e-12));
}

TEST_CASE("rl_integral half order of one against quadrature") {
  boost::math::quadrature::tanh_sinh<double> q;
  // int_0^1 (1-s)^{-1/2} ds, written with u = 1 - s so the singularity sits at 0.
  double oracle = q.integrate([](double u) { return 1.0 / std::sqrt(u); }, 0.0, 1.0) / std::tgamma(0.5);
  RealSignal out = rl_integral(0.5, sample(1e-3, 1.0, [](double) { return 1.0; }));
  CHECK(std::fabs(out.values.back() - oracle) < 1e-12);
  CHECK(std::fabs(out.values.back() - 1.1283791670955126) < 1e-12);
}

TEST_CASE("rl_integral semigroup") {
  const double dt = 1e-3;
  RealSignal f = sample(dt, 1.0, [](double t) { return t * t; });
  RealSignal twice = rl_integral(0.5, rl_integral(0.5, f));
  RealSignal once = rl_integral(1.0, f);
  double e2 = 0, e1 = 0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    double t = f.time(i);
    double exact = std::pow(t, 3.0) * 2.0 / std::tgamma(4.0);
    e2 = std::max(e2, std::fabs(twice.values[i] - exact));
    e1 = std::max(e1, std::fabs(once.values[i] - exact));
  }
  CHECK(e2 < 5 * dt);
  CHECK(e1 < 5 * dt);
}

TEST_CASE("power-function law and convergence order") {
  for (double beta : {0.3, 0.5, 0.9}) {
    for (double mu : {0.0, 1.0, 2.0}) {
      double e1 = max_err_rl_power(beta, mu, 2e-3);
      double e2 = max_err_rl_power(beta, mu, 1e-3);
      CHECK(e2 < 5e-3);
      if (mu > 0) CHECK(std::log2(e1 / e2) >= 0.9);
    }
  }
  for (double beta : {0.3, 0.5, 0.9, 1.4}) {
    for (double mu : {1.0, 2.0}) {
      double e1 = max_err_caputo_power(beta, mu, 2e-3);
      double e2 = max_err_caputo_power(beta, mu, 1e-3);
      CHECK(e2 < 1e-2);
      if (e1 > 1e-12) CHECK_MESSAGE(std::log2(e1 / e2) >= 0.9, "beta=", beta, " mu=", mu);
    }
  }
}

TEST_CASE("caputo of constants and of t") {
  RealSignal c = sample(0.01, 1.0, [](double) { return 3.0; });
  std::vector<double> init{3.0};
  CaputoResult r = caputo_derivative(0.4, c, init);
  for (double v : r.signal.values) CHECK(std::fabs(v) < 1e-12);
  CHECK(r.origin_extrapolated);

  RealSignal lin = sample(1e-3, 1.0, [](double t) { return t; });
  std::vector<double> z{0.0};
  CaputoResult d = caputo_derivative(0.5, lin, z);
  CHECK(std::fabs(d.signal.values.back() - 1.0 / std::tgamma(1.5)) < 1e-10);
  CHECK(d.signal.values[0] == d.signal.values[1]);
}

TEST_CASE("Caputo eigenfunction identity") {
  const double beta = 0.6, lambda = 2.0;
  for (double dt : {1e-2, 2e-3}) {
    const auto n = static_cast<std::size_t>(std::llround(2.0 / dt)) + 1;
    RealSignal f{0.0, dt, std::vector<double>(n)};
    for (std::size_t i = 0; i < n; ++i) f.values[i] = mittag_leffler(MLParams{beta, 1.0}, -lambda * std::pow(f.time(i), beta));
    std::vector<double> init{1.0};
    CaputoResult r = caputo_derivative(beta, f, init);
    double worst = 0;
    for (std::size_t i = 1; i < n; ++i) {
      double target = -lambda * f.values[i];
      worst = std::max(worst, std::fabs(r.signal.values[i] - target) / std::fabs(target));
    }
    CHECK_MESSAGE(worst < 10 * std::pow(dt, 2 - beta), "dt=", dt, " worst=", worst);
  }
}

TEST_CASE("linearity") {
  std::mt19937 rng(11);
  std::normal_distribution<double> nd;
  const std::size_t n = 200;
  RealSignal f{0.0, 0.01, std::vector<double>(n)}, g = f, h = f;
  for (std::size_t i = 0; i < n; ++i) {
    f.values[i] = nd(rng);
    g.values[i] = nd(rng);
    h.values[i] = 2.5 * f.values[i] - 1.5 * g.values[i];
  }
  auto a = rl_integral(0.7, f), b = rl_integral(0.7, g), c = rl_integral(0.7, h);
  for (std::size_t i = 0; i < n; ++i) CHECK(std::fabs(c.values[i] - (2.5 * a.values[i] - 1.5 * b.values[i])) < 1e-12);
  std::vector<double> fi{f.values[0]}, gi{g.values[0]}, hi{h.values[0]};
  auto da = caputo_derivative(0.7, f, fi), db = caputo_derivative(0.7, g, gi), dc = caputo_derivative(0.7, h, hi);
  for (std::size_t i = 0; i < n; ++i) {
    double ref = 2.5 * da.signal.values[i] - 1.5 * db.signal.values[i];
    CHECK(std::fabs(dc.signal.values[i] - ref) < 1e-9 * (1 + std::fabs(ref)));
  }
}

TEST_CASE("complex rl_integral matches componentwise") {
  ComplexSignal z{0.0, 0.01, {}};
  RealSignal re{0.0, 0.01, {}}, im{0.0, 0.01, {}};
  for (int i = 0; i < 50; ++i) {
    z.values.emplace_back(std::sin(0.1 * i), std::cos(0.2 * i));
    re.values.push_back(std::sin(0.1 * i));
    im.values.push_back(std::cos(0.2 * i));
  }
  auto zc = rl_integral(0.4, z);
  auto rr = rl_integral(0.4, re), ii = rl_integral(0.4, im);
  for (int i = 0; i < 50; ++i) {
    CHECK(zc.values[i].real() == doctest::Approx(rr.values[i]));
    CHECK(zc.values[i].imag() == doctest::Approx(ii.values[i]));
  }
}

TEST_CASE("fraccalc parameter errors") {
  RealSignal f{0.0, 0.1, {1, 2, 3}};
  CHECK_THROWS_AS(rl_integral(0.0, f), evo::InputError);
  RealSignal shifted{0.5, 0.1, {1, 2, 3}};
  CHECK_THROWS_AS(rl_integral(0.5, shifted), evo::InputError);
  std::vector<double> one{1.0}, two{1.0, 0.0};
  CHECK_THROWS_AS(caputo_derivative(1.0, f, one), evo::InputError);
  CHECK_THROWS_AS(caputo_derivative(2.5, f, two), evo::InputError);
  CHECK_THROWS_AS(caputo_derivative(1.5, f, one), evo::InputError);
  CHECK_THROWS_AS(caputo_derivative(0.5, f, two), evo::InputError);
  RealSignal bad{0.0, 0.1, {1, NAN, 3}};
  CHECK_THROWS_AS(rl_integral(0.5, bad), evo::InputError);
}
