#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "evoscalar/error.hpp"
#include "evoscalar/spectra.hpp"

using namespace evo::spectra;

namespace {

// Direct lattice count of 0 < |k|^2 < s in dimension 2 or 3.
double brute_torus(int n, double s) {
  int r = static_cast<int>(std::sqrt(s)) + 1;
  double count = 0;
  for (int a = -r; a <= r; ++a) {
    for (int b = (n >= 2 ? -r : 0); b <= (n >= 2 ? r : 0); ++b) {
      for (int c = (n >= 3 ? -r : 0); c <= (n >= 3 ? r : 0); ++c) {
        double q = double(a) * a + double(b) * b + double(c) * c;
        if (q > 0 && q < s) count += 1;
      }
    }
  }
  return count;
}

}  // namespace

TEST_CASE("counting examples") {
  SpectralModel t1(TorusLaplacian{1});
  CHECK(counting_function(t1, 100.0) == 18.0);
  CHECK(counting_function(t1, 0.0) == 0.0);
  CHECK(counting_function(t1, 1.0) == 0.0);
  SpectralModel g(GeometricSpectrum{2, 1.0});
  CHECK(counting_function(g, 10.0) == 7.0);
  for (double lambda : {0.5, 1.0, 1.7, 3.0}) {
    SpectralModel p(PrescribedExponent{lambda});
    for (double s : {0.5, 1.0, 2.5, 17.3, 93.4}) {
      double direct = 0;
      for (int j = 1; std::pow(j, 1.0 / lambda) < s; ++j) direct += 1;
      CHECK(counting_function(p, s) == direct);
    }
  }
}

TEST_CASE("torus counts match lattice enumeration") {
  SpectralModel t2(TorusLaplacian{2});
  SpectralModel t3(TorusLaplacian{3});
  std::mt19937 rng(5);
  std::uniform_real_distribution<double> u(0.0, 400.0);
  for (int i = 0; i < 40; ++i) {
    double s = u(rng);
    CHECK(counting_function(t2, s) == brute_torus(2, s));
    CHECK(counting_function(t3, s) == brute_torus(3, s));
  }
  CHECK(counting_function(t2, 25.0) == brute_torus(2, 25.0));
  CHECK(t2.mode_count() <= kDefaultTruncation);
  CHECK(t2.nominal_lambda() == 1.0);
}

TEST_CASE("counting function is a nondecreasing staircase") {
  for (const SpectralModel& m : {SpectralModel(TorusLaplacian{2}), SpectralModel(GeometricSpectrum{3, 0.7}),
                                 SpectralModel(PrescribedExponent{1.3})}) {
    double prev = 0.0;
    for (int i = 0; i <= 2000; ++i) {
      double s = 0.05 * i;
      double n = counting_function(m, s);
      CHECK(n >= prev);
      CHECK(n == std::floor(n));
      prev = n;
    }
  }
  // jumps equal multiplicities
  SpectralModel t2(TorusLaplacian{2});
  for (std::size_t i = 1; i < 30; ++i) {
    const Level& l = t2.levels()[i];
    double jump = counting_function(t2, l.eigenvalue + 1e-9) - counting_function(t2, l.eigenvalue);
    CHECK(jump == static_cast<double>(l.multiplicity));
  }
}

TEST_CASE("prescribed exponent realizes the trace condition tightly") {
  for (double lambda : {0.3, 1.0, 1.7, 4.0}) {
    SpectralModel p(PrescribedExponent{lambda}, 1000000000000ULL);
    for (double s = 2.0; s < 1e6 && s < p.horizon(); s *= 1.37) {
      CHECK(std::fabs(std::log(counting_function(p, s)) - lambda * std::log(s)) <= std::log(2.0));
    }
  }
  SpectralModel scaled(PrescribedExponent{2.0, 1e-3});
  CHECK(counting_function(scaled, 1.0) == 999.0 * 999.0 + 2 * 999.0);  // ceil(1e6) - 1
}

TEST_CASE("trace exponent fits") {
  CHECK(std::fabs(fit_trace_exponent(SpectralModel(TorusLaplacian{1}), 1e2, 1e4, 40).lambda_hat - 0.5) < 0.05);
  CHECK(std::fabs(fit_trace_exponent(SpectralModel(TorusLaplacian{2}), 1e2, 1e4, 40).lambda_hat - 1.0) < 0.1);
  CHECK(std::fabs(fit_trace_exponent(SpectralModel(PrescribedExponent{1.7}), 1e2, 1e3, 40).lambda_hat - 1.7) < 0.017);
  SpectralModel geo(GeometricSpectrum{2, 0.5}, 1ULL << 40);
  CHECK(std::fabs(fit_trace_exponent(geo, 1e2, 1e4, 40).lambda_hat - 2.0) < 0.2);
}

TEST_CASE("explicit copy of the torus reproduces its fit") {
  SpectralModel t2(TorusLaplacian{2});
  std::ostringstream os;
  os.precision(17);
  os << "eigenvalue,multiplicity\n";
  for (const Level& l : t2.levels()) os << l.eigenvalue << "," << l.multiplicity << "\n";
  std::istringstream in(os.str());
  SpectralModel e = load_explicit(in, 1.0);
  TraceFit a = fit_trace_exponent(t2, 1e2, 1e4, 30);
  TraceFit b = fit_trace_exponent(e, 1e2, 1e4, 30);
  CHECK(a.lambda_hat == b.lambda_hat);
  CHECK(a.r_squared == b.r_squared);
}

TEST_CASE("explicit input validation") {
  std::istringstream unsorted("eigenvalue,multiplicity\n4,1\n1,2\n1,3\n");
  SpectralModel m = load_explicit(unsorted, 1.0);
  CHECK(m.levels().size() == 2);
  CHECK(m.levels()[0].multiplicity == 5);
  CHECK(counting_function(m, 2.0) == 5.0);
  std::istringstream bad_header("lambda,mult\n1,1\n");
  CHECK_THROWS_AS(load_explicit(bad_header, 1.0), evo::InputError);
  std::istringstream fractional("eigenvalue,multiplicity\n1,1.5\n");
  CHECK_THROWS_AS(load_explicit(fractional, 1.0), evo::InputError);
  std::istringstream negative("eigenvalue,multiplicity\n-1,1\n");
  CHECK_THROWS_AS(load_explicit(negative, 1.0), evo::InputError);
  std::istringstream ok("eigenvalue,multiplicity\n1,1\n");
  CHECK_THROWS_AS(load_explicit(ok, 0.0), evo::InputError);
}

TEST_CASE("catalog exponents") {
  CHECK(catalog_exponent("euclidean_laplacian", {{"n", 3}}) == 1.5);
  CHECK(catalog_exponent("heisenberg_sublaplacian", {{"n", 2}}) == 3.0);
  CHECK(catalog_exponent("cartan_D2", {}) == 4.5);
  CHECK(catalog_exponent("engel_D1", {}) == 3.0);
  CHECK(catalog_exponent("compact_sublaplacian", {{"Q", 4}}) == 2.0);
  CHECK(catalog_exponent("rockland", {{"Q", 6}, {"nu", 4}}) == 1.5);
  CHECK(catalog_exponent("subcoercive", {{"Qstar", 5}, {"m", 2}}) == 2.5);
  CHECK(catalog_exponent("vladimirov", {{"mu", 0.25}}) == 4.0);
  CHECK(catalog_names().size() == 8);
  CHECK_THROWS_AS(catalog_exponent("hyperbolic_laplacian", {}), evo::InputError);
  CHECK_THROWS_AS(catalog_exponent("rockland", {{"Q", 6}}), evo::InputError);
}

TEST_CASE("horizon and degenerate fits") {
  SpectralModel g(GeometricSpectrum{2, 1.0}, 100);
  CHECK(g.horizon() == 64.0);
  CHECK_THROWS_AS(counting_function(g, 65.0), evo::InputError);
  CHECK_THROWS_AS(fit_trace_exponent(SpectralModel(TorusLaplacian{1}), 0.5, 10.0, 10), evo::NumericalError);
  CHECK_THROWS_AS(fit_trace_exponent(SpectralModel(TorusLaplacian{1}), 2.0, 10.0, 4), evo::InputError);
  CHECK_THROWS_AS(SpectralModel(GeometricSpectrum{1, 1.0}), evo::InputError);
  CHECK_THROWS_AS(SpectralModel(PrescribedExponent{-1.0}), evo::InputError);
}
