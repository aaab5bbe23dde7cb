#include "evoscalar/specfun.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>

#include <boost/math/special_functions/gamma.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_complex.hpp>

#include "evoscalar/error.hpp"

namespace evo::specfun {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr int kMaxSeriesTerms = 100000;

bool is_nonpositive_integer(double x) { return x <= 0.0 && x == std::floor(x); }

// sin(pi x) with argument reduction so that integers give exact zeros.
double sin_pi(double x) {
  double r = std::remainder(x, 2.0);  // r in [-1, 1]
  if (r == 0.0 || std::fabs(r) == 1.0) return 0.0;
  if (r > 0.5) return std::sin(kPi * (1.0 - r));
  if (r < -0.5) return -std::sin(kPi * (1.0 + r));
  return std::sin(kPi * r);
}

// log|1/Gamma(x)| and its sign. Returns -inf magnitude at the poles.
double log_abs_rgamma(double x, int& sign) {
  if (is_nonpositive_integer(x)) {
    sign = 0;
    return -std::numeric_limits<double>::infinity();
  }
  if (x > 0.0) {
    sign = 1;
    return -log_gamma(x);
  }
  // 1/Gamma(x) = sin(pi x) Gamma(1-x) / pi
  double s = sin_pi(x);
  sign = s > 0 ? 1 : -1;
  return std::log(std::fabs(s)) + log_gamma(1.0 - x) - std::log(kPi);
}

std::string fmt_params(const MLParams& p, cplx z) {
  std::ostringstream os;
  os.precision(17);
  os << "alpha=" << p.alpha << " delta=" << p.delta << " z=(" << z.real() << "," << z.imag() << ")";
  return os.str();
}

struct Candidate {
  cplx value;
  double error = std::numeric_limits<double>::infinity();
  MLRoute route = MLRoute::Taylor;
  bool valid = false;
};

// ---------------------------------------------------------------------------
// Power series in double precision.

Candidate taylor_double(const MLParams& p, cplx z) {
  Candidate c;
  c.route = MLRoute::Taylor;
  const double az = std::abs(z);
  const double lz = std::log(az);
  const double theta = std::arg(z);
  const bool real_arg = z.imag() == 0.0;
  const double peak = std::pow(az, 1.0 / p.alpha) + 1.0;

  // Guard against overflow at the peak term.
  {
    double kpk = std::max(0.0, (peak - p.delta) / p.alpha);
    double x = p.alpha * kpk + p.delta;
    if (x > 0.0 && kpk * lz - log_gamma(x) > 690.0) return c;
  }

  cplx sum = 0.0;
  double abs_sum = 0.0;
  double rounding = 0.0;
  double last = 0.0;
  int k = 0;
  for (; k < kMaxSeriesTerms; ++k) {
    const double x = p.alpha * k + p.delta;
    cplx term;
    double expo = 0.0;
    if (k == 0) {
      term = rgamma(x);
    } else {
      int sg = 0;
      double lr = log_abs_rgamma(x, sg);
      if (sg == 0) {
        term = 0.0;
      } else {
        expo = k * lz + lr;
        double mag = std::exp(expo);
        if (real_arg) {
          double s = (z.real() < 0.0 && (k % 2 == 1)) ? -1.0 : 1.0;
          term = s * sg * mag;
        } else {
          term = static_cast<double>(sg) * std::polar(mag, k * theta);
        }
      }
    }
    sum += term;
    const double at = std::abs(term);
    abs_sum += at;
    rounding += at * (4.0 + std::fabs(expo) + (real_arg ? 0.0 : k * std::fabs(theta)));
    last = at;
    if (x > peak && k > 0) {
      if (at <= 1e-16 * std::abs(sum) || at <= 1e-22 * abs_sum) break;
    }
  }
  if (k >= kMaxSeriesTerms || !std::isfinite(abs_sum)) return c;
  c.value = sum;
  c.error = kEps * rounding + last;
  c.valid = std::isfinite(sum.real()) && std::isfinite(sum.imag());
  return c;
}

// ---------------------------------------------------------------------------
// Residue contributions of the poles s_j = |z|^{1/a} exp(i(theta + 2 pi j)/a)
// lying in |arg s| < pi, plus the "ambiguity" magnitude of poles close to the
// branch cut along the negative axis.

struct PoleSum {
  cplx value = 0.0;
  double ambiguity = 0.0;
};

PoleSum pole_contributions(const MLParams& p, cplx z) {
  PoleSum out;
  const double a = p.alpha;
  const double theta = std::arg(z);
  const double rho = std::pow(std::abs(z), 1.0 / a);
  const double band = 0.5;  // angular band around the cut treated as ambiguous
  int jmin = static_cast<int>(std::ceil((-(a * kPi + band * a) - theta) / (2 * kPi)));
  int jmax = static_cast<int>(std::floor(((a * kPi + band * a) - theta) / (2 * kPi)));
  for (int j = jmin; j <= jmax; ++j) {
    double phase = (theta + 2 * kPi * j) / a;
    cplx s = std::polar(rho, phase);
    cplx res = (1.0 / a) * std::pow(s, 1.0 - p.delta) * std::exp(s);
    if (std::fabs(phase) < kPi) out.value += res;
    if (std::fabs(phase) > kPi - band) out.ambiguity += std::abs(res);
  }
  return out;
}

// Asymptotic expansion  E = sum_poles - sum_{k>=1} z^{-k} / Gamma(delta - alpha k).
Candidate asymptotic(const MLParams& p, cplx z) {
  Candidate c;
  c.route = MLRoute::Asymptotic;
  const double az = std::abs(z);
  if (az < 1.0) return c;
  const double lz = std::log(az);
  PoleSum poles = pole_contributions(p, z);
  if (!std::isfinite(poles.value.real()) || !std::isfinite(poles.value.imag())) return c;

  cplx series = 0.0;
  cplx zinv = 1.0 / z;
  cplx zpow = 1.0;
  double prev_env = std::numeric_limits<double>::infinity();
  double err = std::numeric_limits<double>::infinity();
  for (int k = 1; k < 2000; ++k) {
    zpow *= zinv;
    const double x = p.delta - p.alpha * k;
    // Envelope |1/Gamma(x)| <= Gamma(1-x)/pi for x < 0.
    double lenv = (x > 0.0) ? -log_gamma(x) : log_gamma(1.0 - x) - std::log(kPi);
    double env = std::exp(-k * lz + lenv);
    if (env > prev_env) {
      err = prev_env;
      break;
    }
    series -= zpow * rgamma(x);
    prev_env = env;
    cplx total = poles.value + series;
    if (env < 1e-17 * std::abs(total)) {
      err = env;
      break;
    }
  }
  c.value = poles.value + series;
  c.error = err + poles.ambiguity + kEps * (std::abs(poles.value) + std::abs(series));
  c.valid = std::isfinite(c.value.real()) && std::isfinite(c.value.imag()) && std::isfinite(c.error);
  return c;
}

// ---------------------------------------------------------------------------
// Inversion of the Laplace transform s^{a-d}/(s^a - z) at t = 1 along an
// optimal parabolic contour; admissible regions are selected between the
// singularities (origin and poles) following the error balancing of the
// trapezoidal rule on parabolic contours.

struct ContourParams {
  double mu = 0.0;
  double h = 0.0;
  double n = std::numeric_limits<double>::infinity();
};

ContourParams optimal_param_bounded(double t, double phi_j, double phi_j1, double pj, double qj,
                                    double log_epsilon) {
  const double log_eps = std::log(kEps);
  const double fac = 1.01;
  const double f_max = std::exp(log_epsilon - log_eps);
  double sq_phi_j = std::sqrt(phi_j);
  const double threshold = 2.0 * std::sqrt((log_epsilon - log_eps) / t);
  double sq_phi_j1 = std::min(std::sqrt(phi_j1), threshold - sq_phi_j);
  double sq_bar_j = 0.0, sq_bar_j1 = 0.0, f_bar = 1.0;
  bool admissible = false;

  if (pj < 1e-14 && qj < 1e-14) {
    sq_bar_j = sq_phi_j;
    sq_bar_j1 = sq_phi_j1;
    admissible = true;
  } else if (pj < 1e-14) {
    sq_bar_j = sq_phi_j;
    double f_min = sq_phi_j > 0 ? fac * std::pow(sq_phi_j / (sq_phi_j1 - sq_phi_j), qj) : fac;
    if (f_min < f_max) {
      f_bar = f_min + f_min / f_max * (f_max - f_min);
      double fq = std::pow(f_bar, -1.0 / qj);
      sq_bar_j1 = (2 * sq_phi_j1 - fq * sq_phi_j) / (2 + fq);
      admissible = true;
    }
  } else if (qj < 1e-14) {
    sq_bar_j1 = sq_phi_j1;
    double f_min = fac * std::pow(sq_phi_j1 / (sq_phi_j1 - sq_phi_j), pj);
    if (f_min < f_max) {
      f_bar = f_min + f_min / f_max * (f_max - f_min);
      double fp = std::pow(f_bar, -1.0 / pj);
      sq_bar_j = (2 * sq_phi_j + fp * sq_phi_j1) / (2 - fp);
      admissible = true;
    }
  } else {
    double f_min = fac * (sq_phi_j + sq_phi_j1) / std::pow(sq_phi_j1 - sq_phi_j, std::max(pj, qj));
    if (f_min < f_max) {
      f_min = std::max(f_min, 1.5);
      f_bar = f_min + f_min / f_max * (f_max - f_min);
      double fp = std::pow(f_bar, -1.0 / pj);
      double fq = std::pow(f_bar, -1.0 / qj);
      double w = -phi_j1 * t / log_epsilon;
      double den = 2 + w - (1 + w) * fp + fq;
      sq_bar_j = ((2 + w + fq) * sq_phi_j + fp * sq_phi_j1) / den;
      sq_bar_j1 = (-(1 + w) * fq * sq_phi_j + (2 + w - (1 + w) * fp) * sq_phi_j1) / den;
      admissible = true;
    }
  }
  ContourParams out;
  if (!admissible) return out;
  log_epsilon -= std::log(f_bar);
  double w = -sq_bar_j1 * sq_bar_j1 * t / log_epsilon;
  out.mu = std::pow(((1 + w) * sq_bar_j + sq_bar_j1) / (2 + w), 2);
  out.h = -2 * kPi / log_epsilon * (sq_bar_j1 - sq_bar_j) / ((1 + w) * sq_bar_j + sq_bar_j1);
  out.n = std::ceil(std::sqrt(1 - log_epsilon / t / out.mu) / out.h);
  if (!(out.h > 0) || !std::isfinite(out.n)) out = ContourParams{};
  return out;
}

ContourParams optimal_param_unbounded(double t, double phi_j, double pj, double log_epsilon) {
  const double sq_phi_j = std::sqrt(phi_j);
  double phibar = phi_j > 0 ? phi_j * 1.01 : 0.01;
  double sq_phibar = std::sqrt(phibar);
  const double f_min = 1, f_max = 10, f_tar = 5;
  double nj = 0, a_coef = 0, sq_mu = 0;
  for (int iter = 0; iter < 200; ++iter) {
    double phi_t = phibar * t;
    double le = log_epsilon / phi_t;
    nj = std::ceil(phi_t / kPi * (1 - 3 * le / 2 + std::sqrt(1 - 2 * le)));
    a_coef = kPi * nj / phi_t;
    sq_mu = sq_phibar * std::fabs(4 - a_coef) / std::fabs(7 - std::sqrt(1 + 12 * a_coef));
    double fbar = std::pow((sq_phibar - sq_phi_j) / sq_mu, -pj);
    bool stop = (pj < 1e-14) || (f_min < fbar && fbar < f_max);
    if (stop) break;
    sq_phibar = std::pow(f_tar, -1.0 / pj) * sq_mu + sq_phi_j;
    phibar = sq_phibar * sq_phibar;
  }
  ContourParams out;
  out.mu = sq_mu * sq_mu;
  out.h = (-3 * a_coef - 2 + 2 * std::sqrt(1 + 12 * a_coef)) / (4 - a_coef) / nj;
  out.n = nj;
  const double log_eps = std::log(kEps);
  const double threshold = (log_epsilon - log_eps) / t;
  if (out.mu > threshold) {
    double q = std::fabs(pj) < 1e-14 ? 0.0 : std::pow(f_tar, -1.0 / pj) * std::sqrt(out.mu);
    phibar = std::pow(q + std::sqrt(phi_j), 2);
    if (phibar < threshold) {
      double w = std::sqrt(log_eps / (log_eps - log_epsilon));
      double u = std::sqrt(-phibar * t / log_eps);
      out.mu = threshold;
      out.n = std::ceil(w * log_epsilon / 2 / kPi / (u * w - 1));
      out.h = std::sqrt(log_eps / (log_eps - log_epsilon)) / out.n;
    } else {
      out = ContourParams{};
    }
  }
  if (!(out.h > 0) || !(out.n > 0)) out = ContourParams{};
  return out;
}

Candidate contour(const MLParams& p, cplx z) {
  Candidate c;
  c.route = MLRoute::Contour;
  const double t = 1.0;
  const double a = p.alpha, b = p.delta;
  double log_epsilon = std::log(1e-15);
  const double theta = std::arg(z);

  // Poles of s^{a-b}/(s^a - z) on the principal sheet.
  int kmin = static_cast<int>(std::ceil(-a / 2 - theta / 2 / kPi));
  int kmax = static_cast<int>(std::floor(a / 2 - theta / 2 / kPi));
  struct Sing {
    cplx s;
    double phi;
  };
  std::vector<Sing> poles;
  const double rho = std::pow(std::abs(z), 1.0 / a);
  for (int k = kmin; k <= kmax; ++k) {
    cplx s = std::polar(rho, (theta + 2 * k * kPi) / a);
    double phi = (s.real() + std::abs(s)) / 2;
    if (phi > 1e-15) poles.push_back({s, phi});
  }
  std::sort(poles.begin(), poles.end(), [](const Sing& x, const Sing& y) { return x.phi < y.phi; });

  std::vector<cplx> sing{0.0};
  std::vector<double> phi{0.0};
  for (auto& s : poles) {
    sing.push_back(s.s);
    phi.push_back(s.phi);
  }
  const std::size_t j1 = sing.size();
  std::vector<double> pp(j1, 1.0), qq(j1, 1.0);
  pp[0] = std::max(0.0, -2 * (a - b + 1));
  qq[j1 - 1] = std::numeric_limits<double>::infinity();
  phi.push_back(std::numeric_limits<double>::infinity());

  std::vector<std::size_t> regions;
  for (std::size_t j = 0; j < j1; ++j) {
    if (phi[j] < (log_epsilon - std::log(kEps)) / t && phi[j] < phi[j + 1]) regions.push_back(j);
  }
  if (regions.empty()) return c;

  ContourParams best;
  std::size_t best_region = 0;
  for (int relax = 0; relax < 12; ++relax) {
    best = ContourParams{};
    for (std::size_t j : regions) {
      ContourParams cp = (j + 1 < j1)
                             ? optimal_param_bounded(t, phi[j], phi[j + 1], pp[j], qq[j], log_epsilon)
                             : optimal_param_unbounded(t, phi[j], pp[j], log_epsilon);
      if (cp.n < best.n) {
        best = cp;
        best_region = j;
      }
    }
    if (best.n <= 200) break;
    log_epsilon += std::log(10.0);
  }
  if (!std::isfinite(best.n) || best.n > 5000) return c;

  const int n = static_cast<int>(best.n);
  cplx integral = 0.0;
  double abs_integral = 0.0;
  for (int k = -n; k <= n; ++k) {
    double u = best.h * k;
    cplx s = best.mu * std::pow(cplx(1.0, u), 2);  // mu (1 + i u)^2
    cplx ds = cplx(-2 * best.mu * u, 2 * best.mu);
    cplx f = std::pow(s, a - b) / (std::pow(s, a) - z) * ds;
    cplx term = std::exp(s * t) * f;
    integral += term;
    abs_integral += std::abs(term);
  }
  integral *= best.h / (2 * kPi * cplx(0, 1));
  abs_integral *= best.h / (2 * kPi);

  cplx residues = 0.0;
  for (std::size_t j = best_region + 1; j < j1; ++j) {
    cplx s = sing[j];
    residues += (1.0 / a) * std::pow(s, 1.0 - b) * std::exp(s * t);
  }
  c.value = integral + residues;
  c.error = std::exp(log_epsilon) + 10 * kEps * abs_integral + kEps * std::abs(residues);
  c.valid = std::isfinite(c.value.real()) && std::isfinite(c.value.imag());
  return c;
}

// ---------------------------------------------------------------------------
// Power series in 50-digit arithmetic for the cancellation-dominated band.

Candidate taylor_extended(const MLParams& p, cplx z) {
  using boost::multiprecision::cpp_bin_float_50;
  using boost::multiprecision::cpp_complex_50;
  Candidate c;
  c.route = MLRoute::ExtendedTaylor;
  const double az = std::abs(z);
  const double lz = std::log(az);
  const double peak = std::pow(az, 1.0 / p.alpha) + 1.0;

  // Feasibility: peak term below 1e35 and a bounded number of terms.
  {
    double kpk = std::max(1.0, (peak - p.delta) / p.alpha);
    double x = p.alpha * kpk + p.delta;
    if (x > 0.0 && (kpk * lz - log_gamma(x)) > 35.0 * std::log(10.0)) return c;
    if (kpk > 3000) return c;
  }

  const cpp_bin_float_50 alpha(p.alpha), delta(p.delta);
  const cpp_complex_50 zz(cpp_bin_float_50(z.real()), cpp_bin_float_50(z.imag()));
  cpp_complex_50 sum(0), zk(1);
  cpp_bin_float_50 abs_sum(0);
  int k = 0;
  double last = 0.0;
  for (; k < 6000; ++k) {
    cpp_bin_float_50 x = alpha * k + delta;
    cpp_bin_float_50 rg(0);
    if (!(x <= 0 && x == floor(x))) rg = 1 / boost::math::tgamma(x);
    cpp_complex_50 term = zk * rg;
    sum += term;
    cpp_bin_float_50 at = abs(term);
    abs_sum += at;
    last = static_cast<double>(at);
    if (static_cast<double>(x) > peak && k > 0) {
      if (at <= 1e-48 * abs(sum) || at <= 1e-60 * abs_sum) break;
    }
    zk *= zz;
  }
  if (k >= 6000) return c;
  c.value = cplx(static_cast<double>(sum.real()), static_cast<double>(sum.imag()));
  c.error = 1e-46 * static_cast<double>(abs_sum) * std::max(1, k) + last + kEps * std::abs(c.value);
  c.valid = true;
  return c;
}

}  // namespace

// ---------------------------------------------------------------------------

double log_gamma(double x) {
  if (!(x > 0.0)) throw InputError(reason::kParameter, "log_gamma requires x > 0");
  if (x < 100.0) return std::log(std::tgamma(x));
  // Stirling series; truncation error below 1e-20 for x >= 100.
  const double xi = 1.0 / x;
  const double xi2 = xi * xi;
  double series = xi * (1.0 / 12 - xi2 * (1.0 / 360 - xi2 * (1.0 / 1260 - xi2 / 1680)));
  return (x - 0.5) * std::log(x) - x + 0.5 * std::log(2 * kPi) + series;
}

double gamma(double x) {
  if (is_nonpositive_integer(x)) {
    std::ostringstream os;
    os << "gamma: pole at x=" << x;
    throw InputError(reason::kPole, os.str());
  }
  if (x > 0.0) return std::tgamma(x);
  // Reflection: Gamma(x) = pi / (sin(pi x) Gamma(1 - x)).
  return kPi / (sin_pi(x) * std::tgamma(1.0 - x));
}

double rgamma(double x) {
  if (is_nonpositive_integer(x)) return 0.0;
  if (x > 0.0 && x < 170.0) return 1.0 / std::tgamma(x);
  int sg = 0;
  double l = log_abs_rgamma(x, sg);
  return sg * std::exp(l);
}

MLEvaluation mittag_leffler_detail(const MLParams& p, cplx z, double rel_tol) {
  if (!(p.alpha > 0.0) || !std::isfinite(p.alpha) || !std::isfinite(p.delta)) {
    throw InputError(reason::kParameter, "mittag_leffler: alpha must be > 0 (" + fmt_params(p, z) + ")");
  }
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
    throw InputError(reason::kParameter, "mittag_leffler: non-finite argument");
  }
  if (z == cplx(0.0)) return {cplx(rgamma(p.delta)), 0.0, MLRoute::Origin};

  auto good = [&](const Candidate& c) { return c.valid && c.error <= rel_tol * std::abs(c.value); };
  std::vector<Candidate> tried;

  const double az = std::abs(z);
  if (std::pow(az, 1.0 / p.alpha) < 80.0) {
    Candidate c = taylor_double(p, z);
    if (good(c)) return {c.value, c.error, c.route};
    tried.push_back(c);
  }
  if (az >= 1.0) {
    Candidate c = asymptotic(p, z);
    if (good(c)) return {c.value, c.error, c.route};
    tried.push_back(c);
  }
  {
    Candidate c = contour(p, z);
    if (good(c)) return {c.value, c.error, c.route};
    tried.push_back(c);
  }
  {
    Candidate c = taylor_extended(p, z);
    if (good(c)) return {c.value, c.error, c.route};
    tried.push_back(c);
  }
  // Relaxed pass: best relative error within 1e-6, else best absolute error
  // within 1e-14 (values that are themselves below the double resolution).
  const Candidate* pick = nullptr;
  for (const auto& c : tried) {
    if (!c.valid || c.error > 1e-6 * std::abs(c.value)) continue;
    if (!pick || c.error / std::abs(c.value) < pick->error / std::abs(pick->value)) pick = &c;
  }
  if (!pick) {
    for (const auto& c : tried) {
      if (!c.valid || c.error > 1e-14) continue;
      if (!pick || c.error < pick->error) pick = &c;
    }
  }
  if (pick) {
    MLEvaluation out{pick->value, pick->error, pick->route};
    // Completely monotone case: a negative result is rounding noise around zero.
    if (z.imag() == 0.0 && z.real() < 0.0 && p.alpha <= 1.0 && p.delta >= p.alpha && out.value.real() < 0.0) {
      out.value = 0.0;
    }
    return out;
  }
  throw NumericalError(reason::kAccuracy, "mittag_leffler: accuracy not attained (" + fmt_params(p, z) + ")");
}

cplx mittag_leffler(const MLParams& p, cplx z) { return mittag_leffler_detail(p, z).value; }

double mittag_leffler(const MLParams& p, double x) {
  return mittag_leffler_detail(p, cplx(x, 0.0)).value.real();
}

std::vector<double> bound_grid(double t_max, int n_samples) {
  std::vector<double> grid;
  grid.reserve(static_cast<std::size_t>(n_samples));
  grid.push_back(0.0);
  const int m = n_samples - 1;
  const double lo = std::log(t_max * 1e-8), hi = std::log(t_max);
  for (int i = 0; i < m; ++i) {
    double f = m == 1 ? 1.0 : static_cast<double>(i) / (m - 1);
    grid.push_back(std::exp(lo + f * (hi - lo)));
  }
  return grid;
}

double ml_bound_constant_ray(const MLParams& p, double theta, double t_max, int n_samples) {
  if (!(p.alpha > 0.0 && p.alpha < 2.0)) {
    throw InputError(reason::kParameter, "ml_bound_constant: alpha must lie in (0,2)");
  }
  if (!(t_max > 0.0) || n_samples < 2) {
    throw InputError(reason::kParameter, "ml_bound_constant: need t_max > 0 and n_samples >= 2");
  }
  if (std::fabs(theta) < kPi * p.alpha / 2) {
    throw InputError(reason::kParameter, "ml_bound_constant: ray lies outside the sector |arg z| >= pi*alpha/2");
  }
  double sup = 0.0;
  const cplx dir = std::polar(1.0, theta);
  for (double t : bound_grid(t_max, n_samples)) {
    cplx v = mittag_leffler_detail(p, t * dir).value;
    sup = std::max(sup, (1.0 + t) * std::abs(v));
  }
  return sup;
}

double ml_bound_constant(const MLParams& p, double t_max, int n_samples) {
  return ml_bound_constant_ray(p, kPi, t_max, n_samples);
}

// ---------------------------------------------------------------------------

namespace {

template <class F>
void for_each_composition(int k, std::size_t m, std::vector<int>& parts, std::size_t pos, int remaining, F&& f) {
  if (pos + 1 == m) {
    parts[pos] = remaining;
    f(parts);
    return;
  }
  for (int l = 0; l <= remaining; ++l) {
    parts[pos] = l;
    for_each_composition(k, m, parts, pos + 1, remaining - l, f);
  }
}

}  // namespace

cplx multinomial_ml(const MultiMLParams& p, std::span<const cplx> z) {
  const std::size_t m = p.a.size();
  if (m == 0) throw InputError(reason::kParameter, "multinomial_ml: need at least one exponent");
  if (z.size() != m) throw InputError(reason::kDimension, "multinomial_ml: argument count differs from m");
  for (double ai : p.a) {
    if (!(ai > 0.0)) throw InputError(reason::kParameter, "multinomial_ml: exponents must be > 0");
  }
  if (m == 1) return mittag_leffler(MLParams{p.a[0], p.b}, z[0]);

  bool all_zero = std::all_of(z.begin(), z.end(), [](cplx v) { return v == cplx(0.0); });
  if (all_zero) return rgamma(p.b);

  std::vector<double> log_abs(m), args(m);
  for (std::size_t i = 0; i < m; ++i) {
    log_abs[i] = z[i] == cplx(0.0) ? -std::numeric_limits<double>::infinity() : std::log(std::abs(z[i]));
    args[i] = std::arg(z[i]);
  }

  cplx sum = 0.0;
  double abs_sum = 0.0;
  long long n_terms = 0;
  double prev_level = std::numeric_limits<double>::infinity();
  std::vector<int> parts(m, 0);
  for (int k = 0;; ++k) {
    cplx level = 0.0;
    double level_abs = 0.0;
    const double lk = std::lgamma(k + 1.0);
    for_each_composition(k, m, parts, 0, k, [&](const std::vector<int>& l) {
      double x = p.b;
      double lmag = lk;
      double phase = 0.0;
      bool zero = false;
      for (std::size_t i = 0; i < m; ++i) {
        x += p.a[i] * l[i];
        if (l[i] > 0) {
          if (!std::isfinite(log_abs[i])) {
            zero = true;
            break;
          }
          lmag += l[i] * log_abs[i] - std::lgamma(l[i] + 1.0);
          phase += l[i] * args[i];
        }
      }
      ++n_terms;
      if (zero) return;
      int sg = 0;
      double lr = log_abs_rgamma(x, sg);
      if (sg == 0) return;
      cplx term = static_cast<double>(sg) * std::polar(std::exp(lmag + lr), phase);
      level += term;
      level_abs += std::abs(term);
    });
    sum += level;
    abs_sum += level_abs;
    if (k > 2 && level_abs < prev_level && level_abs <= 1e-16 * std::max(std::abs(sum), 1e-300)) break;
    if (k > 2 && level_abs == 0.0 && prev_level == 0.0) break;
    prev_level = level_abs;
    if (n_terms > kMaxSeriesTerms || !std::isfinite(abs_sum)) {
      throw NumericalError(reason::kConvergence, "multinomial_ml: terms did not decay within the term cap");
    }
  }
  if (kEps * abs_sum * 64 > 1e-8 * std::abs(sum)) {
    throw NumericalError(reason::kConvergence, "multinomial_ml: cancellation exceeds the accuracy budget");
  }
  return sum;
}

double multinomial_ml(const MultiMLParams& p, std::span<const double> z) {
  std::vector<cplx> zc(z.begin(), z.end());
  return multinomial_ml(p, std::span<const cplx>(zc)).real();
}

}  // namespace evo::specfun
