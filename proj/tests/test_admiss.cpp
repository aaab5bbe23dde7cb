#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>
#include <sstream>

#include "evoscalar/admiss.hpp"
#include "evoscalar/error.hpp"

using namespace evo::admiss;

namespace {

const TripleKind kHeat{Family::Heat, 1.0};

std::string reason_of(double p0, double lambda, double eta, const TripleKind& k) {
  try {
    subcritical_construct(p0, lambda, eta, k);
  } catch (const evo::InputError& e) {
    return e.reason();
  }
  return "ok";
}

}  // namespace

TEST_CASE("admissibility examples") {
  CHECK_FALSE(is_admissible({2, 4, 2, kHeat}, 2.0));
  CHECK(is_admissible({1, 2, 2, kHeat}, 2.0));
  CHECK(is_admissible({1.2, 4, 2, {Family::WaveType, 1.5}}, 1.0));
  CHECK(check_admissible({2, 4, 2, kHeat}, 2.0).reason.find(">=") != std::string::npos);
  CHECK(check_admissible({1, 2, 2, kHeat}, 2.0).reason.empty());
}

TEST_CASE("admissibility never throws on bad input") {
  CHECK_FALSE(is_admissible({1, 2, 2, kHeat}, -1.0));
  CHECK_FALSE(is_admissible({0.5, 2, 2, kHeat}, 1.0));
  CHECK_FALSE(is_admissible({1, 1.5, 2, kHeat}, 1.0));
  CHECK_FALSE(is_admissible({1, 2, 2.5, kHeat}, 1.0));
  CHECK_FALSE(is_admissible({1, 2, 1.0, kHeat}, 1.0));
  CHECK_FALSE(is_admissible({1, 4, 2, {Family::HeatType, 1.2}}, 1.0));
  CHECK_FALSE(is_admissible({1, 4, 2, {Family::WaveType, 0.5}}, 1.0));
  CHECK_FALSE(is_admissible({2.5, 4, 2, {Family::WaveType, 1.5}}, 1.0));
}

TEST_CASE("admissibility is monotone in r") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int trial = 0; trial < 500; ++trial) {
    const double p = 1.0 + 1e-3 + U(rng) * (1.0 - 1e-3);
    const double q = 2.0 + 10.0 * U(rng);
    const double lambda = 0.1 + 5.0 * U(rng);
    const TripleKind k = trial % 2 ? kHeat : TripleKind{Family::HeatType, 0.1 + 0.8 * U(rng)};
    const double r1 = 1.0 + 5.0 * U(rng);
    const double r2 = r1 * (1.0 + U(rng));
    // Smaller r (larger 1/r) can only help.
    if (is_admissible({r2, q, p, k}, lambda)) CHECK(is_admissible({r1, q, p, k}, lambda));
  }
}

TEST_CASE("region examples") {
  CHECK(region_sample(1.5, 6.0, kHeat, 50).empty);
  CHECK_FALSE(region_sample(2.0, 10.0, kHeat, 50).empty);
  const TripleKind w{Family::WaveType, 1.5};
  const Region hi = region_sample(2.0, 1.0, w, 60);
  const Region lo = region_sample(2.0, 0.5, w, 60);
  CHECK_FALSE(hi.empty);
  CHECK_FALSE(lo.empty);
  std::set<std::pair<int, int>> a, b;
  for (std::size_t i = 0; i < hi.points.size(); ++i) {
    if (hi.points[i].admissible) a.insert({int(i), 0});
    if (lo.points[i].admissible) b.insert({int(i), 0});
  }
  CHECK(a != b);
  for (const auto& pt : hi.points) {
    if (pt.admissible) CHECK(pt.inv_r > 0.5);
  }
}

TEST_CASE("heat emptiness matches the analytic threshold") {
  for (int i = 0; i < 50; ++i) {
    const double p0 = 1.02 + 0.96 * i / 49.0;
    const double thr = 2.0 * p0 / (2.0 - p0);
    for (double f : {0.5, 0.99, 1.0, 1.01, 2.0}) {
      const Region reg = region_sample(p0, f * thr, kHeat, 40);
      CHECK(reg.scan_empty == reg.analytic_empty);
      CHECK(reg.empty == (f >= 1.0));
    }
    const TripleKind ht{Family::HeatType, 0.5};
    const Region reg = region_sample(p0, 1.01 * thr / 0.5, ht, 40);
    CHECK(reg.empty);
    CHECK_FALSE(region_sample(p0, 0.99 * thr / 0.5, ht, 40).empty);
  }
}

TEST_CASE("region csv") {
  std::ostringstream os;
  write_region_csv(os, region_sample(2.0, 1.0, kHeat, 2));
  const std::string csv = os.str();
  CHECK(csv.rfind("inv_q,inv_r,admissible\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);
  CHECK_THROWS_AS(region_sample(2.5, 1.0, kHeat, 10), evo::InputError);
  CHECK_THROWS_AS(region_sample(2.0, 1.0, kHeat, 1), evo::InputError);
}

TEST_CASE("subcritical construction examples") {
  const Subcritical s = subcritical_construct(2.0, 1.0, 2.0, kHeat);
  CHECK(s.rho == doctest::Approx(1.5));
  CHECK(s.r == doctest::Approx(3.0));
  CHECK(s.q == doctest::Approx(4.0));
  CHECK(reason_of(2.0, 2.0, 2.0, kHeat) == "supercritical");
  const Subcritical h = subcritical_construct(2.0, 1.0, 2.0, {Family::HeatType, 0.5});
  CHECK(h.rho == doctest::Approx(3.0));
  CHECK(h.r == doctest::Approx(6.0));
  CHECK(h.q == doctest::Approx(4.0));
  CHECK(reason_of(1.5, 1.0, 1.2, kHeat) == "q-below-2");
  CHECK(reason_of(1.5, 7.0, 1.1, kHeat) == "precondition");
  CHECK(reason_of(2.0, 1.0, 2.0, {Family::WaveType, 1.5}) == "parameter");
  CHECK(reason_of(2.0, 1.0, 0.9, kHeat) == "parameter");
}

TEST_CASE("constructed triples are admissible") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  int built = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const double p0 = 1.2 + 0.8 * U(rng);
    const TripleKind k = trial % 2 ? kHeat : TripleKind{Family::HeatType, 0.1 + 0.8 * U(rng)};
    const double lambda = 0.1 + 2.0 * U(rng);
    const double lo = std::max(1.0, 2.0 / p0), hi = 1.0 + p0 / lambda;
    if (lo >= hi) continue;
    const double eta = lo + (hi - lo) * (0.05 + 0.9 * U(rng));
    try {
      const Subcritical s = subcritical_construct(p0, lambda, eta, k);
      CHECK(is_admissible({s.r, s.q, p0, k}, lambda));
      CHECK(s.rho <= s.r);
      CHECK(s.rho >= s.rho_lo);
      CHECK(s.rho < s.rho_hi);
      ++built;
    } catch (const evo::InputError& e) {
      CHECK(std::string(e.reason()) == "precondition");
    }
  }
  CHECK(built > 50);
}
