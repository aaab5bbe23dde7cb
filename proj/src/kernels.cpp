#include "evoscalar/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <sstream>

#include "evoscalar/error.hpp"
#include "evoscalar/specfun.hpp"
#include "evoscalar/textio.hpp"

namespace evo::kernels {

namespace {

using cplx = std::complex<double>;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

[[noreturn]] void horizon_error(double t, double end) {
  std::ostringstream os;
  os << "tabulated kernel: t=" << t << " beyond table end " << end;
  throw InputError(reason::kHorizon, os.str());
}

// Sum sigma_i t^{beta-beta_i} below this uses the multinomial series; above
// it the Talbot inversion is both accurate (~1e-12) and much cheaper.
constexpr double kSeriesReach = 0.1;

// order 0: k, 1: int k, 2: double integral.
double multi_term_value(const MultiTerm& m, double t, int order) {
  if (t == 0.0) {
    if (order > 0) return 0.0;
    if (m.beta < 1.0) throw InputError(reason::kSingularity, "multi-term kernel is singular at t=0");
    return 1.0;
  }
  double reach = 0.0;
  for (std::size_t i = 0; i < m.betas.size(); ++i) reach += m.sigmas[i] * std::pow(t, m.beta - m.betas[i]);
  if (reach <= kSeriesReach) {
    specfun::MultiMLParams p;
    std::vector<double> z;
    for (std::size_t i = 0; i < m.betas.size(); ++i) {
      p.a.push_back(m.beta - m.betas[i]);
      z.push_back(-m.sigmas[i] * std::pow(t, m.beta - m.betas[i]));
    }
    p.b = m.beta + order;
    try {
      return std::pow(t, m.beta - 1.0 + order) * specfun::multinomial_ml(p, z);
    } catch (const NumericalError&) {
      // fall through to the transform inversion
    }
  }
  auto f_hat = [&](cplx s) {
    cplx den = std::pow(s, m.beta);
    for (std::size_t i = 0; i < m.betas.size(); ++i) den += m.sigmas[i] * std::pow(s, m.betas[i]);
    return 1.0 / (den * std::pow(s, static_cast<double>(order)));
  };
  return talbot_inverse(f_hat, t);
}

const Tabulated& require_tables(const Tabulated& tab) {
  if (tab.knots.empty()) throw InputError(reason::kPrecondition, "tabulated kernel must be built with make_tabulated");
  return tab;
}

// Integral tables evaluated at x: order 1 or 2.
double tabulated_integral(const Tabulated& tab, double x, int order) {
  require_tables(tab);
  if (x <= 0.0) return 0.0;
  const double end = tab.knots.back();
  if (x > end) {
    if (x - end > 1e-9 * tab.signal.dt) horizon_error(x, end);
    x = end;
  }
  auto it = std::upper_bound(tab.knots.begin(), tab.knots.end(), x);
  std::size_t j = static_cast<std::size_t>(std::max<std::ptrdiff_t>(0, (it - tab.knots.begin()) - 1));
  if (j + 1 >= tab.knots.size()) j = tab.knots.size() - 2;
  const double len = tab.knots[j + 1] - tab.knots[j];
  const double h = x - tab.knots[j];
  const double a = tab.fl[j], slope = (tab.fr[j] - tab.fl[j]) / len;
  if (order == 1) return tab.c1[j] + a * h + slope * h * h / 2.0;
  return tab.c2[j] + tab.c1[j] * h + a * h * h / 2.0 + slope * h * h * h / 6.0;
}

double tabulated_eval(const Tabulated& tab, double t) {
  const auto& v = tab.signal.values;
  const double dt = tab.signal.dt, t0 = tab.signal.t0;
  const double last = t0 + dt * static_cast<double>(v.size() - 1);
  const double end = tab.layout == Layout::Cell ? last + dt / 2.0 : last;
  if (t > end + 1e-9 * dt) horizon_error(t, end);
  if (t <= t0) return v.front();
  if (t >= last) return v.back();
  double u = (t - t0) / dt;
  auto i = static_cast<std::size_t>(std::floor(u));
  if (i + 1 >= v.size()) return v.back();
  double f = u - static_cast<double>(i);
  return v[i] + f * (v[i + 1] - v[i]);
}

void require(bool ok, const char* what) {
  if (!ok) throw InputError(reason::kParameter, what);
}

}  // namespace

Kernel make_constant(double c) {
  require(std::isfinite(c) && c > 0.0, "Constant kernel: c must be > 0");
  return Kernel{Constant{c}, true};
}

Kernel make_power_law(double beta) {
  require(std::isfinite(beta) && beta > 0.0, "PowerLaw kernel: beta must be > 0");
  return Kernel{PowerLaw{beta}, beta <= 1.0};
}

Kernel make_caputo_dual(double beta) {
  require(std::isfinite(beta) && beta > 0.0, "CaputoDual kernel: beta must be > 0");
  if (beta >= 1.0) throw InputError(reason::kDivergentIntegral, "CaputoDual kernel: t^{-beta} is not integrable at 0 for beta >= 1");
  return Kernel{CaputoDual{beta}, true};
}

Kernel make_rayleigh_stokes(double beta, double gamma) {
  require(std::isfinite(beta) && beta > 0.0, "RayleighStokes kernel: beta must be > 0");
  if (beta >= 1.0) throw InputError(reason::kDivergentIntegral, "RayleighStokes kernel: need beta < 1 for integrability");
  require(std::isfinite(gamma) && gamma >= 0.0, "RayleighStokes kernel: gamma must be >= 0");
  return Kernel{RayleighStokes{beta, gamma}, true};
}

Kernel make_multi_term(double beta, std::vector<double> betas, std::vector<double> sigmas) {
  require(std::isfinite(beta) && beta > 0.0 && beta <= 1.0, "MultiTerm kernel: need 0 < beta <= 1");
  require(!betas.empty(), "MultiTerm kernel: need at least one lower-order term");
  if (betas.size() != sigmas.size()) throw InputError(reason::kDimension, "MultiTerm kernel: betas and sigmas differ in length");
  for (std::size_t i = 0; i < betas.size(); ++i) {
    require(betas[i] > 0.0 && betas[i] < beta, "MultiTerm kernel: need 0 < beta_i < beta");
    require(std::isfinite(sigmas[i]) && sigmas[i] > 0.0, "MultiTerm kernel: sigma_i must be > 0");
  }
  return Kernel{MultiTerm{beta, std::move(betas), std::move(sigmas)}, true};
}

Kernel make_tabulated(fraccalc::RealSignal signal, Layout layout) {
  fraccalc::validate(signal);
  require(signal.t0 >= 0.0, "tabulated kernel: t0 must be >= 0");
  const double dt = signal.dt;
  if (layout == Layout::Cell && std::fabs(signal.t0 - dt / 2.0) > 1e-9 * dt) {
    throw InputError(reason::kGridMismatch, "tabulated kernel: cell layout needs t0 = dt/2");
  }
  Tabulated tab;
  const auto& v = signal.values;
  const std::size_t n = v.size();
  if (layout == Layout::Node) {
    if (signal.t0 > 0.0) {
      tab.knots.push_back(0.0);
      tab.fl.push_back(v[0]);
      tab.fr.push_back(v[0]);
    }
    for (std::size_t i = 0; i < n; ++i) tab.knots.push_back(signal.time(i));
    for (std::size_t i = 0; i + 1 < n; ++i) {
      tab.fl.push_back(v[i]);
      tab.fr.push_back(v[i + 1]);
    }
  } else {
    for (std::size_t i = 0; i <= n; ++i) tab.knots.push_back(dt * static_cast<double>(i));
    tab.fl = v;
    tab.fr = v;
  }
  tab.c1.assign(tab.knots.size(), 0.0);
  tab.c2.assign(tab.knots.size(), 0.0);
  for (std::size_t j = 0; j + 1 < tab.knots.size(); ++j) {
    const double len = tab.knots[j + 1] - tab.knots[j];
    const double a = tab.fl[j], slope = (tab.fr[j] - tab.fl[j]) / len;
    tab.c1[j + 1] = tab.c1[j] + a * len + slope * len * len / 2.0;
    tab.c2[j + 1] = tab.c2[j] + tab.c1[j] * len + a * len * len / 2.0 + slope * len * len * len / 6.0;
  }
  bool cp = true;
  for (std::size_t i = 0; i < n; ++i) {
    if (v[i] < 0.0 || (i > 0 && v[i] > v[i - 1] * (1.0 + 1e-12) + 1e-300)) cp = false;
  }
  tab.signal = std::move(signal);
  tab.layout = layout;
  return Kernel{std::move(tab), cp};
}

Kernel load_tabulated(std::istream& in) {
  std::vector<double> ts, ks;
  for (auto [t, k] : textio::read_two_columns(in, "t,k", "kernel table")) {
    ts.push_back(t);
    ks.push_back(k);
  }
  if (ts.size() < 2) throw InputError(reason::kFormat, "kernel table: need at least two rows");
  const double dt = ts[1] - ts[0];
  for (std::size_t i = 1; i < ts.size(); ++i) {
    if (!(ts[i] > ts[i - 1])) throw InputError(reason::kFormat, "kernel table: t must be strictly increasing");
    if (std::fabs((ts[i] - ts[i - 1]) - dt) > 1e-6 * dt) {
      throw InputError(reason::kGridMismatch, "kernel table: t must be uniformly spaced");
    }
  }
  fraccalc::RealSignal sig{ts[0], (ts.back() - ts[0]) / static_cast<double>(ts.size() - 1), ks};
  return make_tabulated(std::move(sig), Layout::Node);
}

Kernel load_tabulated_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError(reason::kFormat, "kernel table: cannot open " + path);
  return load_tabulated(in);
}

std::string describe(const Kernel& k) {
  std::ostringstream os;
  std::visit(overloaded{
                 [&](const Constant& c) { os << "Constant(" << c.c << ")"; },
                 [&](const PowerLaw& p) { os << "PowerLaw(" << p.beta << ")"; },
                 [&](const CaputoDual& p) { os << "CaputoDual(" << p.beta << ")"; },
                 [&](const RayleighStokes& p) { os << "RayleighStokes(" << p.beta << "," << p.gamma << ")"; },
                 [&](const MultiTerm& p) {
                   os << "MultiTerm(" << p.beta;
                   for (std::size_t i = 0; i < p.betas.size(); ++i) os << ";" << p.betas[i] << ":" << p.sigmas[i];
                   os << ")";
                 },
                 [&](const Tabulated& p) {
                   os << "Tabulated(" << p.signal.size() << "," << (p.layout == Layout::Node ? "node" : "cell") << ")";
                 },
             },
             k.kind);
  return os.str();
}

bool singular_at_origin(const Kernel& k) {
  return std::visit(overloaded{
                        [](const Constant&) { return false; },
                        [](const PowerLaw& p) { return p.beta < 1.0; },
                        [](const CaputoDual&) { return true; },
                        [](const RayleighStokes& p) { return p.gamma > 0.0; },
                        [](const MultiTerm& p) { return p.beta < 1.0; },
                        [](const Tabulated&) { return false; },
                    },
                    k.kind);
}

double kernel_eval(const Kernel& k, double t) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw InputError(reason::kParameter, "kernel_eval: t must be >= 0");
  if (t == 0.0 && singular_at_origin(k)) {
    throw InputError(reason::kSingularity, "kernel_eval: " + describe(k) + " is singular at t=0");
  }
  return std::visit(overloaded{
                        [&](const Constant& c) { return c.c; },
                        [&](const PowerLaw& p) {
                          if (t == 0.0) return p.beta == 1.0 ? 1.0 : 0.0;
                          return std::pow(t, p.beta - 1.0) * specfun::rgamma(p.beta);
                        },
                        [&](const CaputoDual& p) { return std::pow(t, -p.beta) * specfun::rgamma(1.0 - p.beta); },
                        [&](const RayleighStokes& p) {
                          if (p.gamma == 0.0) return 1.0;
                          return 1.0 + p.gamma * std::pow(t, -p.beta) * specfun::rgamma(1.0 - p.beta);
                        },
                        [&](const MultiTerm& p) { return multi_term_value(p, t, 0); },
                        [&](const Tabulated& p) { return tabulated_eval(p, t); },
                    },
                    k.kind);
}

double cumulative_integral(const Kernel& k, double t) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw InputError(reason::kParameter, "cumulative_integral: t must be >= 0");
  if (t == 0.0) return 0.0;
  return std::visit(overloaded{
                        [&](const Constant& c) { return c.c * t; },
                        [&](const PowerLaw& p) { return std::pow(t, p.beta) * specfun::rgamma(p.beta + 1.0); },
                        [&](const CaputoDual& p) { return std::pow(t, 1.0 - p.beta) * specfun::rgamma(2.0 - p.beta); },
                        [&](const RayleighStokes& p) {
                          return t + p.gamma * std::pow(t, 1.0 - p.beta) * specfun::rgamma(2.0 - p.beta);
                        },
                        [&](const MultiTerm& p) { return multi_term_value(p, t, 1); },
                        [&](const Tabulated& p) { return tabulated_integral(p, t, 1); },
                    },
                    k.kind);
}

double second_integral(const Kernel& k, double t) {
  if (!(t >= 0.0) || !std::isfinite(t)) throw InputError(reason::kParameter, "second_integral: t must be >= 0");
  if (t == 0.0) return 0.0;
  return std::visit(overloaded{
                        [&](const Constant& c) { return c.c * t * t / 2.0; },
                        [&](const PowerLaw& p) { return std::pow(t, p.beta + 1.0) * specfun::rgamma(p.beta + 2.0); },
                        [&](const CaputoDual& p) { return std::pow(t, 2.0 - p.beta) * specfun::rgamma(3.0 - p.beta); },
                        [&](const RayleighStokes& p) {
                          return t * t / 2.0 + p.gamma * std::pow(t, 2.0 - p.beta) * specfun::rgamma(3.0 - p.beta);
                        },
                        [&](const MultiTerm& p) { return multi_term_value(p, t, 2); },
                        [&](const Tabulated& p) { return tabulated_integral(p, t, 2); },
                    },
                    k.kind);
}

std::complex<double> kernel_laplace(const Kernel& k, std::complex<double> s) {
  return std::visit(overloaded{
                        [&](const Constant& c) -> cplx { return c.c / s; },
                        [&](const PowerLaw& p) -> cplx { return std::pow(s, -p.beta); },
                        [&](const CaputoDual& p) -> cplx { return std::pow(s, p.beta - 1.0); },
                        [&](const RayleighStokes& p) -> cplx { return 1.0 / s + p.gamma * std::pow(s, p.beta - 1.0); },
                        [&](const MultiTerm& p) -> cplx {
                          cplx den = std::pow(s, p.beta);
                          for (std::size_t i = 0; i < p.betas.size(); ++i) den += p.sigmas[i] * std::pow(s, p.betas[i]);
                          return 1.0 / den;
                        },
                        [&](const Tabulated&) -> cplx {
                          throw InputError(reason::kPrecondition, "kernel_laplace: not available for tabulated kernels");
                        },
                    },
                    k.kind);
}

bool check_cp_samples(const Kernel& k, const std::vector<double>& times) {
  double prev = std::numeric_limits<double>::infinity();
  for (double t : times) {
    double v = kernel_eval(k, t);
    if (v < 0.0 || v > prev * (1.0 + 1e-12)) return false;
    prev = v;
  }
  return true;
}

Kernel sonine_solve(const Kernel& k, double T, double dt) {
  if (!(dt > 0.0) || !(T >= dt) || !std::isfinite(T)) {
    throw InputError(reason::kParameter, "sonine_solve: need 0 < dt <= T");
  }
  const auto n = static_cast<std::size_t>(std::llround(T / dt));
  std::vector<double> w(n + 1, 0.0);
  double prev = 0.0;
  for (std::size_t j = 1; j <= n; ++j) {
    double c = cumulative_integral(k, dt * static_cast<double>(j));
    w[j] = c - prev;
    prev = c;
  }
  if (!(std::fabs(w[1]) > 1e-300) || !std::isfinite(w[1])) {
    throw NumericalError(reason::kIllPosed, "sonine_solve: leading quadrature weight underflows");
  }
  std::vector<double> big(n);
  for (std::size_t i = 1; i <= n; ++i) {
    double acc = 1.0;
    for (std::size_t m = 1; m < i; ++m) acc -= big[m - 1] * w[i - m + 1];
    big[i - 1] = acc / w[1];
    if (!std::isfinite(big[i - 1])) throw NumericalError(reason::kIllPosed, "sonine_solve: non-finite partner value");
  }
  // A partner of a kernel with finite k(0+) is a measure with an atom at 0;
  // the discrete solution then puts O(1) mass into the first cell.
  if (big[0] * dt > 0.5) {
    throw NumericalError(reason::kIllPosed,
                         "sonine_solve: partner of " + describe(k) + " is delta-like (first cell carries mass " +
                             std::to_string(big[0] * dt) + ")");
  }
  fraccalc::RealSignal sig{dt / 2.0, dt, std::move(big)};
  return make_tabulated(std::move(sig), Layout::Cell);
}

namespace {

// int_0^{h M} a(u) b(t - u) du with exact moments of a and b interpolated
// linearly on M sub-intervals.
double half_convolution(const Kernel& a, const Kernel& b, double t, double half, int m) {
  const double h = half / m;
  double acc = 0.0;
  double c1_prev = 0.0, c2_prev = 0.0;
  double b_prev = kernel_eval(b, t);
  for (int j = 1; j <= m; ++j) {
    const double u = h * j;
    const double c1 = cumulative_integral(a, u);
    const double c2 = second_integral(a, u);
    const double b_cur = kernel_eval(b, t - u);
    const double m0 = c1 - c1_prev;
    const double m1 = h * c1 - (c2 - c2_prev);  // int a(u) (u - u_{j-1}) du
    acc += b_prev * m0 + (b_cur - b_prev) / h * m1;
    c1_prev = c1;
    c2_prev = c2;
    b_prev = b_cur;
  }
  return acc;
}

// int_0^t a(s) b(t - s) ds for tabulated a: exact on each segment of a,
// using the moments of b.
double tabulated_convolution(const Tabulated& a, const Kernel& b, double t) {
  require_tables(a);
  if (t > a.knots.back() + 1e-9 * a.signal.dt) horizon_error(t, a.knots.back());
  double acc = 0.0;
  for (std::size_t j = 0; j + 1 < a.knots.size() && a.knots[j] < t; ++j) {
    const double x0 = a.knots[j];
    const double x1 = std::min(a.knots[j + 1], t);
    const double len = a.knots[j + 1] - x0;
    const double slope = (a.fr[j] - a.fl[j]) / len;
    const double vh = t - x0, vl = std::max(t - x1, 0.0);
    const double cl = cumulative_integral(b, vl), ch = cumulative_integral(b, vh);
    const double m0 = ch - cl;
    const double m1 = (vl - vh) * cl + second_integral(b, vh) - second_integral(b, vl);  // int (s - x0) b(t-s) ds
    acc += a.fl[j] * m0 + slope * m1;
  }
  return acc;
}

}  // namespace

double convolve_at(const Kernel& a, const Kernel& b, double t, int sub_intervals) {
  if (!(t > 0.0)) return 0.0;
  if (sub_intervals < 1) throw InputError(reason::kParameter, "convolve_at: sub_intervals must be >= 1");
  const auto* ta = std::get_if<Tabulated>(&a.kind);
  const auto* tb = std::get_if<Tabulated>(&b.kind);
  if (ta && !tb) return tabulated_convolution(*ta, b, t);
  if (tb && !ta) return tabulated_convolution(*tb, a, t);
  const double half = t / 2.0;
  return half_convolution(a, b, t, half, sub_intervals) + half_convolution(b, a, t, half, sub_intervals);
}

SonineReport sonine_verify(const SoninePair& pair, double T, double dt, double tol) {
  if (!(dt > 0.0) || !(T >= dt)) throw InputError(reason::kParameter, "sonine_verify: need 0 < dt <= T");
  SonineReport rep;
  const auto n = static_cast<std::size_t>(std::llround(T / dt));
  for (std::size_t i = 1; i <= n; ++i) {
    const double t = dt * static_cast<double>(i);
    const double dev = std::fabs(convolve_at(pair.K, pair.k, t) - 1.0);
    if (dev > rep.max_deviation || !std::isfinite(dev)) {
      rep.max_deviation = std::isfinite(dev) ? dev : std::numeric_limits<double>::infinity();
      rep.worst_t = t;
    }
  }
  rep.pass = rep.max_deviation < tol;
  return rep;
}

}  // namespace evo::kernels
