#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace evo::admiss {

enum class Family { Heat, HeatType, WaveType };

struct TripleKind {
  Family family = Family::Heat;
  double beta = 1.0;  // HeatType: (0,1); WaveType: (1,2); ignored for Heat
};

struct TripleSpec {
  double r = 1.0;
  double q = 2.0;
  double p = 2.0;
  TripleKind kind;
};

// Strict inequalities are decided with this absolute margin so that exact
// boundary cases (e.g. lambda = 2 p0/(2 - p0)) are not admitted by rounding.
inline constexpr double kStrictMargin = 1e-12;

struct Verdict {
  bool admissible = false;
  std::string reason;  // empty when admissible
};

Verdict check_admissible(const TripleSpec& t, double lambda);
bool is_admissible(const TripleSpec& t, double lambda);

std::string describe(const TripleKind& k);

struct RegionPoint {
  double inv_q = 0.0;
  double inv_r = 0.0;
  bool admissible = false;
};

struct Region {
  std::vector<RegionPoint> points;  // every scanned point
  std::size_t admissible_count = 0;
  bool scan_empty = true;
  bool analytic_empty = false;
  bool empty = true;  // scan and analytic test agree on emptiness
};

// Scans 1/q = i/(2 res), 1/r = j/res, i, j = 1..res, with p = p0.
Region region_sample(double p0, double lambda, const TripleKind& kind, int resolution);

// Analytic emptiness of the region for data exponent p0.
bool analytic_empty(double p0, double lambda, const TripleKind& kind);

void write_region_csv(std::ostream& out, const Region& region);

struct Subcritical {
  double rho = 0.0;
  double r = 0.0;
  double q = 0.0;
  double rho_lo = 0.0;  // admissible rho interval [rho_lo, rho_hi)
  double rho_hi = 0.0;
};

// r = eta rho, q = eta p0 with rho the midpoint of its interval
// ([1, p0/(lambda(eta-1))) for Heat, [1/beta, p0/(beta lambda(eta-1))) for HeatType).
Subcritical subcritical_construct(double p0, double lambda, double eta, const TripleKind& kind);

}  // namespace evo::admiss
