#include <algorithm>
#include <cmath>
#include <functional>
#include <ostream>
#include <set>
#include <sstream>

#include "evoscalar/error.hpp"
#include "evoscalar/evolve.hpp"

namespace evo::evolve {

namespace {

constexpr int kSupGrid = 200;

// psi(t; v), nonincreasing in v with psi(t; 0) = 1.
std::function<double(double)> make_psi(const PropagatorKind& kind, double t) {
  if (std::holds_alternative<Heat>(kind)) return [t](double v) { return std::exp(-t * v); };
  if (const auto* vc = std::get_if<VariableCoeff>(&kind)) {
    const double A = integrated_coefficient(vc->alpha, t);
    return [A](double v) { return std::exp(-A * v); };
  }
  if (std::holds_alternative<SchrodingerType>(kind)) {
    throw InputError(reason::kPrecondition, "bound_function: no real psi for the Schrodinger type");
  }
  const double I = kernels::cumulative_integral(kind_kernel(kind), t);
  return [I](double v) { return 1.0 / (1.0 + v * I); };
}

BoundValue sup_levels(const spectra::SpectralModel& m, double a, const std::function<double(double)>& psi) {
  double total = 0.0;
  for (const auto& l : m.levels()) {
    if (l.eigenvalue > 0.0) total += static_cast<double>(l.multiplicity);
  }
  const double cap = std::pow(total, a);
  BoundValue best;
  double count = 0.0;
  for (const auto& l : m.levels()) {
    if (l.eigenvalue <= 0.0) continue;
    // N(v) reaches count + mult just above this level
    count += static_cast<double>(l.multiplicity);
    const double ps = psi(l.eigenvalue);
    const double val = std::pow(count, a) * ps;
    if (val > best.value) best = {val, l.eigenvalue};
    if (cap * ps < best.value) break;
  }
  return best;
}

// Prescribed exponent: the sup over v of ceil((v/u)^lambda - 1)^a psi(v) is
// the max over integers j of j^a psi(u j^{1/lambda}).
BoundValue sup_prescribed(const spectra::SpectralModel& m, const spectra::PrescribedExponent& pe, double a,
                          const std::function<double(double)>& psi) {
  const double jmax = static_cast<double>(m.truncation());
  auto eig = [&](double j) { return pe.unit * std::pow(j, 1.0 / pe.lambda); };
  auto f = [&](double x) {
    const double j = std::exp(x);
    return std::pow(j, a) * psi(eig(j));
  };
  const double xmax = std::log(jmax);
  std::vector<double> xs(kSupGrid), fs(kSupGrid);
  std::size_t arg = 0;
  for (int i = 0; i < kSupGrid; ++i) {
    xs[i] = xmax * i / (kSupGrid - 1);
    fs[i] = f(xs[i]);
    if (fs[i] > fs[arg]) arg = static_cast<std::size_t>(i);
  }
  double lo = xs[arg == 0 ? 0 : arg - 1], hi = xs[std::min<std::size_t>(arg + 1, kSupGrid - 1)];
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = hi - g * (hi - lo), d = lo + g * (hi - lo);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < 200 && hi - lo > 1e-13 * std::max(1.0, std::fabs(hi)); ++it) {
    if (fc > fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - g * (hi - lo);
      fc = f(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + g * (hi - lo);
      fd = f(d);
    }
  }
  const double jstar = std::exp(0.5 * (lo + hi));
  BoundValue best;
  for (double j : {std::floor(jstar) - 1, std::floor(jstar), std::ceil(jstar), std::ceil(jstar) + 1, 1.0, jmax,
                   std::round(std::exp(xs[arg]))}) {
    if (j < 1.0 || j > jmax) continue;
    const double val = std::pow(j, a) * psi(eig(j));
    if (val > best.value) best = {val, eig(j)};
  }
  return best;
}

}  // namespace

BoundValue bound_sup(const spectra::SpectralModel& m, const PropagatorKind& kind, double p, double q, double t) {
  validate(kind);
  if (!(p > 1.0 && p <= 2.0) || !(q >= 2.0) || std::isinf(q)) {
    throw InputError(reason::kExponent, "bound_function: need 1 < p <= 2 <= q < infinity");
  }
  if (!(t > 0.0) || !std::isfinite(t)) throw InputError(reason::kParameter, "bound_function: t must be > 0");
  const double a = 1.0 / p - 1.0 / q;
  if (a == 0.0) return {1.0, 0.0};
  if (1.0 / m.nominal_lambda() < a - 1e-12) {
    std::ostringstream os;
    os << "bound_function: 1/lambda = " << 1.0 / m.nominal_lambda() << " < 1/p - 1/q = " << a;
    throw InputError(reason::kUnboundedSup, os.str());
  }
  auto psi = make_psi(kind, t);
  if (const auto* pe = std::get_if<spectra::PrescribedExponent>(&m.kind())) return sup_prescribed(m, *pe, a, psi);
  return sup_levels(m, a, psi);
}

double bound_function(const spectra::SpectralModel& m, const PropagatorKind& kind, double p, double q, double t) {
  return bound_sup(m, kind, p, q, t).value;
}

DecayResult decay_slope(const spectra::SpectralModel& m, const PropagatorKind& kind, double p, double q,
                        const FieldOnTorus& w0, double t_a, double t_b, int n_times) {
  const auto* torus = std::get_if<spectra::TorusLaplacian>(&m.kind());
  if (!torus) throw InputError(reason::kPrecondition, "decay_slope: model must be a TorusLaplacian");
  validate(w0);
  if (w0.n != torus->n) throw InputError(reason::kDimension, "decay_slope: field dimension differs from the model");
  if (!(t_a > 0.0) || !(t_b > t_a)) throw InputError(reason::kWindow, "decay_slope: need 0 < t_a < t_b");
  if (n_times < 3) throw InputError(reason::kParameter, "decay_slope: n_times must be >= 3");
  auto coeffs = forward_fft(w0);
  const double norm_p = lp_norm(w0, p);
  if (!(norm_p > 0.0)) throw InputError(reason::kWindow, "decay_slope: w0 is zero");
  if (std::abs(coeffs[0]) > 1e-10 * lp_norm(w0, INFINITY)) {
    throw InputError(reason::kPrecondition, "decay_slope: w0 must have zero mean");
  }
  coeffs[0] = 0.0;
  const auto ev = fft_eigenvalues(w0.n, w0.N);
  Propagator prop(kind, t_b, t_b / 2000.0);
  std::set<double> distinct(ev.begin(), ev.end());
  std::vector<double> levels(distinct.begin(), distinct.end());
  prop.prepare(levels);

  DecayResult res;
  double lambda1 = 0.0;
  for (const auto& l : m.levels()) {
    if (l.eigenvalue > 0.0) {
      lambda1 = l.eigenvalue;
      break;
    }
  }
  res.gap_time = 1.0 / lambda1;
  res.pre_gap = t_b <= res.gap_time;
  std::vector<double> xs, ys;
  for (int i = 0; i < n_times; ++i) {
    const double t = t_a * std::pow(t_b / t_a, static_cast<double>(i) / (n_times - 1));
    std::vector<cplx> c(coeffs.size());
    for (std::size_t j = 0; j < c.size(); ++j) {
      if (coeffs[j] != 0.0) c[j] = prop.value(t, ev[j]) * coeffs[j];
    }
    const double lq = lp_norm(inverse_fft(w0.n, w0.N, c), q);
    if (!(lq > 1e-250) || !std::isfinite(lq)) {
      throw NumericalError(reason::kWindow, "decay_slope: norm underflow inside the window; shorten it");
    }
    DecayRow row{t, lq, bound_function(m, kind, p, q, t), lq / norm_p};
    res.envelope_constant = std::max(res.envelope_constant, row.ratio / row.bound);
    xs.push_back(std::log(t));
    ys.push_back(std::log(row.ratio));
    res.rows.push_back(row);
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= static_cast<double>(xs.size());
  my /= static_cast<double>(xs.size());
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  res.slope = sxy / sxx;
  return res;
}

void write_decay_csv(std::ostream& out, const DecayResult& r) {
  out << "t,Lq_norm,bound_B,ratio\n";
  auto old = out.precision(12);
  for (const auto& row : r.rows) out << row.t << "," << row.lq_norm << "," << row.bound << "," << row.ratio << "\n";
  out.precision(old);
}

}  // namespace evo::evolve
