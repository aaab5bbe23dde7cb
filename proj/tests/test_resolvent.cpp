#include <doctest.h>

#include <cmath>
#include <random>

#include "evoscalar/error.hpp"
#include "evoscalar/resolvent.hpp"
#include "evoscalar/specfun.hpp"

using namespace evo::resolvent;
using namespace evo::kernels;
using evo::specfun::MLParams;
using evo::specfun::mittag_leffler;

namespace {

double ml_error(double beta, double lambda, double dt, double T = 5.0) {
  auto s = resolvent_scalar({make_power_law(beta), lambda, T, dt});
  double e = 0.0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    double t = s.time(i);
    e = std::max(e, std::fabs(s.values[i] - mittag_leffler(MLParams{beta, 1.0}, -lambda * std::pow(t, beta))));
  }
  return e;
}

}  // namespace

TEST_CASE("constant kernel reduces to exponential decay") {
  auto s = resolvent_scalar({make_constant(1.0), 1.0, 1.0, 1e-3});
  CHECK(std::fabs(s.values.back() - std::exp(-1.0)) < 1e-3);
  CHECK(s.values.front() == 1.0);
}

TEST_CASE("lambda zero gives one") {
  auto s = resolvent_scalar({make_power_law(0.5), 0.0, 2.0, 1e-2});
  for (double v : s.values) CHECK(v == 1.0);
}

TEST_CASE("power-law resolvent matches Mittag-Leffler") {
  CHECK(ml_error(0.5, 1.0, 1e-3) < 1e-3);
  for (double beta : {0.3, 0.5, 0.8}) {
    for (double lambda : {0.1, 1.0, 10.0}) {
      double e = ml_error(beta, lambda, 2e-3, 2.0);
      CHECK_MESSAGE(e < 5 * std::pow(2e-3, beta), "beta=", beta, " lambda=", lambda, " e=", e);
    }
  }
}

TEST_CASE("grid convergence order") {
  for (double beta : {0.5, 0.8}) {
    for (double lambda : {1.0, 10.0}) {
      double e1 = ml_error(beta, lambda, 4e-3, 2.0);
      double e2 = ml_error(beta, lambda, 2e-3, 2.0);
      CHECK_MESSAGE(std::log2(e1 / e2) >= 0.5, "beta=", beta, " lambda=", lambda);
    }
  }
}

TEST_CASE("bounds, positivity and monotonicity in lambda") {
  std::vector<Kernel> ks{make_constant(1.0), make_power_law(0.3), make_power_law(0.7), make_caputo_dual(0.4),
                         make_rayleigh_stokes(0.5, 1.0), make_multi_term(0.9, {0.5}, {1.0})};
  std::vector<double> lambdas{0.0, 0.5, 2.0, 10.0, 60.0};
  for (const auto& k : ks) {
    auto sols = resolvent_batch(k, lambdas, 2.0, 2e-3);
    for (std::size_t j = 0; j < lambdas.size(); ++j) {
      for (std::size_t i = 0; i < sols[j].size(); ++i) {
        CHECK(sols[j].values[i] >= -1e-12);
        CHECK(sols[j].values[i] <= 1.0 + 1e-12);
        if (j > 0) CHECK(sols[j].values[i] <= sols[j - 1].values[i] + 1e-12);
      }
      auto rep = bound_check_signal(k, lambdas[j], sols[j]);
      CHECK_MESSAGE(rep.pass, describe(k), " lambda=", lambdas[j], " violation=", rep.max_violation);
    }
  }
}

TEST_CASE("bound check examples") {
  CHECK(resolvent_bound_check({make_constant(1.0), 2.0, 5.0, 1e-3}).pass);
  auto fine = resolvent_bound_check({make_power_law(0.7), 10.0, 2.0, 5e-4});
  auto coarse = resolvent_bound_check({make_power_law(0.7), 10.0, 2.0, 2e-3});
  CHECK(fine.pass);
  CHECK(coarse.pass);
  auto eq = resolvent_bound_check({make_power_law(0.5), 0.0, 1.0, 1e-2});
  CHECK(eq.pass);
  CHECK(eq.max_violation == 0.0);
  CHECK_THROWS_AS(resolvent_bound_check({make_power_law(1.5), 1.0, 1.0, 1e-2}), evo::InputError);
}

TEST_CASE("batch equals sequential") {
  std::vector<double> lambdas{3.0, 0.1, 7.5, 1.0};
  auto batch = resolvent_batch(make_power_law(0.6), lambdas, 1.0, 1e-2, 3);
  for (std::size_t j = 0; j < lambdas.size(); ++j) {
    auto one = resolvent_scalar({make_power_law(0.6), lambdas[j], 1.0, 1e-2});
    CHECK(one.values == batch[j].values);
  }
}

TEST_CASE("resolvent parameter errors") {
  CHECK_THROWS_AS(resolvent_scalar({make_constant(1.0), -1.0, 1.0, 1e-2}), evo::InputError);
  CHECK_THROWS_AS(resolvent_scalar({make_constant(1.0), 1.0, 0.0, 1e-2}), evo::InputError);
  CHECK_THROWS_AS(resolvent_scalar({make_constant(1.0), 1.0, 1.0, 0.0}), evo::InputError);
}
