#include "evoscalar/admiss.hpp"

#include <cmath>
#include <ostream>
#include <sstream>

#include "evoscalar/error.hpp"

namespace evo::admiss {

namespace {

bool lt(double a, double b) { return a < b - kStrictMargin; }

std::string kind_error(const TripleKind& k) {
  switch (k.family) {
    case Family::Heat:
      return {};
    case Family::HeatType:
      return k.beta > 0.0 && k.beta < 1.0 ? std::string() : "beta must lie in (0,1) for the heat type";
    case Family::WaveType:
      return k.beta > 1.0 && k.beta < 2.0 ? std::string() : "beta must lie in (1,2) for the wave type";
  }
  return "unknown kind";
}

double effective_lambda(double lambda, const TripleKind& k) {
  return k.family == Family::Heat ? lambda : k.beta * lambda;
}

}  // namespace

std::string describe(const TripleKind& k) {
  std::ostringstream os;
  switch (k.family) {
    case Family::Heat:
      return "heat";
    case Family::HeatType:
      os << "heat-type(beta=" << k.beta << ")";
      break;
    case Family::WaveType:
      os << "wave-type(beta=" << k.beta << ")";
      break;
  }
  return os.str();
}

Verdict check_admissible(const TripleSpec& t, double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) return {false, "lambda must be > 0"};
  if (auto e = kind_error(t.kind); !e.empty()) return {false, e};
  if (!(t.p > 1.0 && t.p <= 2.0)) return {false, "p outside (1,2]"};
  if (!(t.q >= 2.0) || !std::isfinite(t.q)) return {false, "q outside [2,inf)"};
  const bool wave = t.kind.family == Family::WaveType;
  if (!(t.r >= 1.0) || !std::isfinite(t.r)) return {false, "r outside [1,inf)"};
  if (wave && !(t.r < 2.0)) return {false, "r outside [1,2) for the wave type"};
  const double s = effective_lambda(lambda, t.kind) * (1.0 / t.p - 1.0 / t.q);
  const double inv_r = 1.0 / t.r;
  if (!lt(s, inv_r)) return {false, "lambda (1/p - 1/q) >= 1/r"};
  if (wave && !lt(1.0 - s, inv_r)) return {false, "1 - beta lambda (1/p - 1/q) >= 1/r"};
  return {true, {}};
}

bool is_admissible(const TripleSpec& t, double lambda) { return check_admissible(t, lambda).admissible; }

bool analytic_empty(double p0, double lambda, const TripleKind& kind) {
  if (!(p0 > 1.0 && p0 <= 2.0)) throw InputError(reason::kExponent, "region: p0 must lie in (1,2]");
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw InputError(reason::kParameter, "region: lambda must be > 0");
  if (auto e = kind_error(kind); !e.empty()) throw InputError(reason::kParameter, "region: " + e);
  // Best corner is q = 2, r = 1 (for the wave type 1/q slightly below 1/2 when p0 = 2).
  if (p0 == 2.0) return false;
  const double s = effective_lambda(lambda, kind) * (1.0 / p0 - 0.5);
  return !lt(s, 1.0);
}

Region region_sample(double p0, double lambda, const TripleKind& kind, int resolution) {
  if (resolution < 2) throw InputError(reason::kParameter, "region: resolution must be >= 2");
  Region out;
  out.analytic_empty = analytic_empty(p0, lambda, kind);
  out.points.reserve(static_cast<std::size_t>(resolution) * resolution);
  for (int i = 1; i <= resolution; ++i) {
    const double inv_q = 0.5 * i / resolution;
    for (int j = 1; j <= resolution; ++j) {
      const double inv_r = static_cast<double>(j) / resolution;
      const bool ok = is_admissible({1.0 / inv_r, 1.0 / inv_q, p0, kind}, lambda);
      out.points.push_back({inv_q, inv_r, ok});
      if (ok) ++out.admissible_count;
    }
  }
  out.scan_empty = out.admissible_count == 0;
  out.empty = out.scan_empty && out.analytic_empty;
  return out;
}

void write_region_csv(std::ostream& out, const Region& region) {
  out << "inv_q,inv_r,admissible\n";
  auto old = out.precision(12);
  for (const auto& pt : region.points) out << pt.inv_q << "," << pt.inv_r << "," << (pt.admissible ? 1 : 0) << "\n";
  out.precision(old);
}

Subcritical subcritical_construct(double p0, double lambda, double eta, const TripleKind& kind) {
  if (kind.family == Family::WaveType) {
    throw InputError(reason::kParameter, "subcritical_construct: only heat and heat-type kinds are supported");
  }
  if (auto e = kind_error(kind); !e.empty()) throw InputError(reason::kParameter, "subcritical_construct: " + e);
  if (!(p0 > 1.0 && p0 <= 2.0)) throw InputError(reason::kExponent, "subcritical_construct: p0 must lie in (1,2]");
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw InputError(reason::kParameter, "subcritical_construct: lambda must be > 0");
  }
  if (!(eta > 1.0) || !std::isfinite(eta)) throw InputError(reason::kParameter, "subcritical_construct: eta must be > 1");
  if (!lt(eta, 1.0 + p0 / lambda)) {
    std::ostringstream os;
    os << "subcritical_construct: eta = " << eta << " >= 1 + p0/lambda = " << 1.0 + p0 / lambda;
    throw InputError(reason::kSupercritical, os.str());
  }
  const double lam = effective_lambda(lambda, kind);
  if (p0 < 2.0 && !lt(lam, 2.0 * p0 / (2.0 - p0))) {
    std::ostringstream os;
    os << "subcritical_construct: lambda = " << lam << " >= 2 p0/(2 - p0) = " << 2.0 * p0 / (2.0 - p0);
    throw InputError(reason::kPrecondition, os.str());
  }
  Subcritical s;
  s.q = eta * p0;
  if (s.q < 2.0) {
    std::ostringstream os;
    os << "subcritical_construct: q = eta p0 = " << s.q << " < 2";
    throw InputError(reason::kTargetBelowTwo, os.str());
  }
  s.rho_lo = kind.family == Family::Heat ? 1.0 : 1.0 / kind.beta;
  s.rho_hi = p0 / (lam * (eta - 1.0));
  if (!lt(s.rho_lo, s.rho_hi)) {
    std::ostringstream os;
    os << "subcritical_construct: rho interval [" << s.rho_lo << ", " << s.rho_hi << ") is empty";
    throw InputError(reason::kEmptyInterval, os.str());
  }
  s.rho = 0.5 * (s.rho_lo + s.rho_hi);
  s.r = eta * s.rho;
  if (!(s.rho <= s.r)) throw InputError(reason::kPrecondition, "subcritical_construct: rho exceeds r");
  if (!is_admissible({s.r, s.q, p0, kind}, lambda)) {
    throw NumericalError(reason::kAccuracy, "subcritical_construct: constructed triple is not admissible");
  }
  return s;
}

}  // namespace evo::admiss
