#include "evoscalar/fraccalc.hpp"

#include <cmath>
#include <sstream>

#include "evoscalar/error.hpp"
#include "evoscalar/linsolve.hpp"
#include "evoscalar/specfun.hpp"

namespace evo::fraccalc {

namespace {

bool finite_value(double v) { return std::isfinite(v); }
bool finite_value(const std::complex<double>& v) { return std::isfinite(v.real()) && std::isfinite(v.imag()); }

// L1 approximation of the Caputo derivative of order 0 < g < 1 at every grid
// point; out[0] is left at zero.
std::vector<double> l1_scheme(double order, std::span<const double> h, double dt) {
  const std::size_t n = h.size();
  std::vector<double> b(n);
  for (std::size_t j = 0; j < n; ++j) {
    b[j] = std::pow(j + 1.0, 1.0 - order) - std::pow(static_cast<double>(j), 1.0 - order);
  }
  const double c = std::pow(dt, -order) * specfun::rgamma(2.0 - order);
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 1; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j < i; ++j) acc += b[j] * (h[i - j] - h[i - j - 1]);
    out[i] = c * acc;
  }
  return out;
}

// Adds starting corrections sum_j w_{n,j} h_j, j = 1..m, chosen so that the
// corrected L1 scheme differentiates t^{sigma_k} exactly.
void add_starting_corrections(double order, std::span<const double> sigma, std::span<const double> h, double dt,
                              std::vector<double>& out) {
  const std::size_t n = h.size();
  const std::size_t m = sigma.size();
  if (m == 0 || n <= m + 1) return;

  std::vector<std::vector<double>> l1_powers(m);
  for (std::size_t k = 0; k < m; ++k) {
    std::vector<double> p(n);
    for (std::size_t i = 0; i < n; ++i) p[i] = std::pow(dt * static_cast<double>(i), sigma[k]);
    l1_powers[k] = l1_scheme(order, p, dt);
  }
  std::vector<double> a(m * m);
  for (std::size_t k = 0; k < m; ++k) {
    for (std::size_t j = 0; j < m; ++j) a[k * m + j] = std::pow(dt * static_cast<double>(j + 1), sigma[k]);
  }
  for (std::size_t i = 1; i < n; ++i) {
    const double t = dt * static_cast<double>(i);
    std::vector<double> rhs(m);
    for (std::size_t k = 0; k < m; ++k) {
      double exact = std::exp(std::lgamma(sigma[k] + 1.0)) * specfun::rgamma(sigma[k] + 1.0 - order) *
                     std::pow(t, sigma[k] - order);
      rhs[k] = exact - l1_powers[k][i];
    }
    std::vector<double> w = linsolve::solve_dense(a, rhs, m);
    for (std::size_t j = 0; j < m; ++j) out[i] += w[j] * h[j + 1];
  }
}

}  // namespace

template <class T>
void validate(const SampledSignal<T>& f) {
  if (!(f.dt > 0.0) || !std::isfinite(f.dt)) throw InputError(reason::kParameter, "signal: dt must be > 0");
  if (f.values.size() < 2) throw InputError(reason::kParameter, "signal: need at least two samples");
  for (const auto& v : f.values) {
    if (!finite_value(v)) throw InputError(reason::kParameter, "signal: non-finite sample");
  }
}

template <class T>
SampledSignal<T> rl_integral(double beta, const SampledSignal<T>& f) {
  if (!(beta > 0.0) || !std::isfinite(beta)) throw InputError(reason::kParameter, "rl_integral: beta must be > 0");
  validate(f);
  if (f.t0 != 0.0) throw InputError(reason::kParameter, "rl_integral: grid must start at t0 = 0");
  const std::size_t n = f.size();
  const double scale = std::pow(f.dt, beta) * specfun::rgamma(beta + 1.0);
  std::vector<double> w(n);
  for (std::size_t m = 1; m < n; ++m) {
    w[m] = scale * (std::pow(static_cast<double>(m), beta) - std::pow(m - 1.0, beta));
  }
  SampledSignal<T> out{f.t0, f.dt, std::vector<T>(n, T{})};
  for (std::size_t i = 1; i < n; ++i) {
    T acc{};
    for (std::size_t j = 0; j < i; ++j) acc += f.values[j] * w[i - j];
    out.values[i] = acc;
  }
  return out;
}

template void validate(const RealSignal&);
template void validate(const ComplexSignal&);
template RealSignal rl_integral(double, const RealSignal&);
template ComplexSignal rl_integral(double, const ComplexSignal&);

CaputoResult caputo_derivative(double beta, const RealSignal& f, std::span<const double> init,
                               const CaputoOptions& opt) {
  if (!(beta > 0.0 && beta < 2.0) || beta == 1.0) {
    throw InputError(reason::kParameter, "caputo_derivative: beta must lie in (0,2) and not be an integer");
  }
  validate(f);
  if (f.t0 != 0.0) throw InputError(reason::kParameter, "caputo_derivative: grid must start at t0 = 0");
  const std::size_t need = beta < 1.0 ? 1 : 2;
  if (init.size() != need) {
    std::ostringstream os;
    os << "caputo_derivative: expected " << need << " initial value(s), got " << init.size();
    throw InputError(reason::kDimension, os.str());
  }
  if (opt.corrections < 0) throw InputError(reason::kParameter, "caputo_derivative: corrections must be >= 0");

  const std::size_t n = f.size();
  const double dt = f.dt;
  std::vector<double> h(n);
  double order = beta;
  if (beta < 1.0) {
    for (std::size_t i = 0; i < n; ++i) h[i] = f.values[i] - init[0];
  } else {
    // Reduce to order beta-1 acting on g' with g = f - f(0) - f'(0) t, g'(0) = 0.
    order = beta - 1.0;
    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i) g[i] = f.values[i] - init[0] - init[1] * f.time(i);
    h[0] = 0.0;
    for (std::size_t i = 1; i + 1 < n; ++i) h[i] = (g[i + 1] - g[i - 1]) / (2.0 * dt);
    if (n >= 3) {
      h[n - 1] = (3.0 * g[n - 1] - 4.0 * g[n - 2] + g[n - 3]) / (2.0 * dt);
    } else {
      h[n - 1] = (g[n - 1] - g[n - 2]) / dt;
    }
  }

  std::vector<double> d = l1_scheme(order, h, dt);
  // A mismatch between f(0) and init[0] contributes h_0 t^{-order}/Gamma(1-order).
  if (h[0] != 0.0) {
    const double c = specfun::rgamma(1.0 - order);
    for (std::size_t i = 1; i < n; ++i) d[i] += h[0] * c * std::pow(f.time(i), -order);
  }
  // Correction exponents: t (where L1 is already exact) plus the k*beta below
  // the scheme order 2-order, kept apart so the weight system stays well
  // conditioned.
  std::vector<double> sigma;
  if (opt.corrections > 0) sigma.push_back(1.0);
  for (int k = 1; k <= opt.corrections; ++k) {
    double s = k * beta - (beta < 1.0 ? 0.0 : 1.0);
    bool apart = s > 0.0 && s < 2.0 - order;
    for (double e : sigma) apart = apart && std::fabs(s - e) > 0.15;
    if (apart) sigma.push_back(s);
  }
  std::vector<double> hc(h);
  hc[0] = 0.0;
  add_starting_corrections(order, sigma, hc, dt, d);

  CaputoResult res;
  res.signal = RealSignal{f.t0, dt, std::move(d)};
  res.signal.values[0] = res.signal.values[1];
  res.origin_extrapolated = true;
  return res;
}

}  // namespace evo::fraccalc
