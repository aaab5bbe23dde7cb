#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include "evoscalar/error.hpp"
#include "evoscalar/evolve.hpp"
#include "evoscalar/resolvent.hpp"
#include "evoscalar/specfun.hpp"

namespace evo::evolve {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require(bool ok, const std::string& msg) {
  if (!ok) throw InputError(reason::kParameter, msg);
}

double ml(double alpha, double delta, double x) { return specfun::mittag_leffler(specfun::MLParams{alpha, delta}, x); }

// Quadrature nodes only need absolute accuracy; a looser relative target
// keeps E_{beta,beta} off the extended-precision route near its zeros.
double ml_quadrature(double alpha, double delta, double x) {
  return specfun::mittag_leffler_detail(specfun::MLParams{alpha, delta}, x, 1e-9).value.real();
}

// 1 - e^{-u}(1+u) without cancellation.
double one_minus_exp_poly(double u) {
  if (u < 1e-3) return u * u * (0.5 - u / 3.0 + u * u / 8.0);
  return -std::expm1(-u) - u * std::exp(-u);
}

}  // namespace

double integrated_coefficient(const fraccalc::RealSignal& a, double t) {
  const double end = a.time(a.size() - 1);
  if (t > end * (1.0 + 1e-12)) {
    std::ostringstream os;
    os << "variable coefficient: t = " << t << " beyond the sampled range " << end;
    throw InputError(reason::kHorizon, os.str());
  }
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < a.size(); ++i) {
    const double lo = a.time(i), hi = a.time(i + 1);
    if (t <= lo) break;
    const double top = std::min(t, hi);
    const double frac = (top - lo) / a.dt;
    const double v_top = a.values[i] + frac * (a.values[i + 1] - a.values[i]);
    acc += 0.5 * (top - lo) * (a.values[i] + v_top);
  }
  return acc;
}

void validate(const PropagatorKind& kind) {
  std::visit(overloaded{
                 [](const Heat&) {},
                 [](const HeatType& k) { require(k.beta > 0.0 && k.beta < 1.0, "HeatType: beta must lie in (0,1)"); },
                 [](const WaveType& k) { require(k.beta > 1.0 && k.beta < 2.0, "WaveType: beta must lie in (1,2)"); },
                 [](const SchrodingerType& k) {
                   require(k.beta > 0.0 && k.beta < 1.0, "SchrodingerType: beta must lie in (0,1)");
                 },
                 [](const RayleighStokes& k) {
                   require(k.beta > 0.0 && k.beta < 1.0, "RayleighStokes: beta must lie in (0,1)");
                   require(k.gamma > 0.0 && std::isfinite(k.gamma), "RayleighStokes: gamma must be > 0");
                 },
                 [](const VariableCoeff& k) {
                   fraccalc::validate(k.alpha);
                   require(k.alpha.t0 == 0.0, "VariableCoeff: alpha must be sampled from t = 0");
                   for (double v : k.alpha.values) require(v >= 0.0, "VariableCoeff: alpha must be nonnegative");
                 },
                 [](const MultiTerm& k) {
                   for (std::size_t i = 0; i + 1 < k.betas.size(); ++i) {
                     require(k.betas[i] > k.betas[i + 1], "MultiTerm: beta_i must be strictly decreasing");
                   }
                   (void)kernels::make_multi_term(k.beta, k.betas, k.sigmas);
                 },
                 [](const GeneralKernel&) {},
             },
             kind);
}

std::string describe(const PropagatorKind& kind) {
  std::ostringstream os;
  std::visit(overloaded{
                 [&](const Heat&) { os << "Heat"; },
                 [&](const HeatType& k) { os << "HeatType(" << k.beta << ")"; },
                 [&](const WaveType& k) { os << "WaveType(" << k.beta << ")"; },
                 [&](const SchrodingerType& k) { os << "SchrodingerType(" << k.beta << ")"; },
                 [&](const RayleighStokes& k) { os << "RayleighStokes(" << k.beta << "," << k.gamma << ")"; },
                 [&](const VariableCoeff& k) { os << "VariableCoeff(" << k.alpha.size() << " samples)"; },
                 [&](const MultiTerm& k) {
                   os << "MultiTerm(" << k.beta;
                   for (std::size_t i = 0; i < k.betas.size(); ++i) os << ";" << k.betas[i] << ":" << k.sigmas[i];
                   os << ")";
                 },
                 [&](const GeneralKernel& k) { os << "GeneralKernel(" << kernels::describe(k.k) << ")"; },
             },
             kind);
  return os.str();
}

bool has_kernel(const PropagatorKind& kind) {
  return !std::holds_alternative<SchrodingerType>(kind) && !std::holds_alternative<VariableCoeff>(kind);
}

kernels::Kernel kind_kernel(const PropagatorKind& kind) {
  return std::visit(
      overloaded{
          [](const Heat&) { return kernels::make_constant(1.0); },
          [](const HeatType& k) { return kernels::make_power_law(k.beta); },
          [](const WaveType& k) { return kernels::make_power_law(k.beta); },
          [&](const SchrodingerType&) -> kernels::Kernel {
            throw InputError(reason::kPrecondition, "SchrodingerType has no real scalar kernel");
          },
          [&](const VariableCoeff&) -> kernels::Kernel {
            throw InputError(reason::kPrecondition, "VariableCoeff has no convolution kernel");
          },
          [](const RayleighStokes& k) { return kernels::make_rayleigh_stokes(k.beta, k.gamma); },
          [](const MultiTerm& k) { return kernels::make_multi_term(k.beta, k.betas, k.sigmas); },
          [](const GeneralKernel& k) { return k.k; },
      },
      kind);
}

Propagator::Propagator(PropagatorKind kind, double t_max, double dt) : kind_(std::move(kind)), t_max_(t_max), dt_(dt) {
  validate(kind_);
  require(t_max_ > 0.0 && std::isfinite(t_max_), "propagator: t_max must be > 0");
  require(dt_ > 0.0 && dt_ <= t_max_, "propagator: need 0 < dt <= t_max");
  if (std::holds_alternative<RayleighStokes>(kind_) || std::holds_alternative<MultiTerm>(kind_) ||
      std::holds_alternative<GeneralKernel>(kind_)) {
    kernel_ = std::make_shared<const kernels::Kernel>(kind_kernel(kind_));
  }
}

void Propagator::prepare(std::span<const double> lambdas) const {
  if (!kernel_) return;
  std::vector<double> todo;
  {
    std::lock_guard<std::mutex> lock(*mutex_);
    std::set<double> seen;
    for (double l : lambdas) {
      require(l >= 0.0 && std::isfinite(l), "propagator: lambda must be >= 0");
      if (!cache_.count(l) && seen.insert(l).second) todo.push_back(l);
    }
  }
  if (todo.empty()) return;
  const double T = dt_ * std::ceil(t_max_ / dt_ - 1e-9);
  auto sols = resolvent::resolvent_batch(*kernel_, todo, T, dt_);
  std::lock_guard<std::mutex> lock(*mutex_);
  for (std::size_t i = 0; i < todo.size(); ++i) cache_.emplace(todo[i], std::move(sols[i]));
}

const fraccalc::RealSignal& Propagator::table(double lambda) const {
  {
    std::lock_guard<std::mutex> lock(*mutex_);
    auto it = cache_.find(lambda);
    if (it != cache_.end()) return it->second;
  }
  double one[1] = {lambda};
  prepare(one);
  std::lock_guard<std::mutex> lock(*mutex_);
  return cache_.at(lambda);
}

cplx Propagator::value(double t, double lambda) const {
  require(t >= 0.0 && std::isfinite(t), "propagator: t must be >= 0");
  require(lambda >= 0.0 && std::isfinite(lambda), "propagator: lambda must be >= 0");
  if (t == 0.0 || lambda == 0.0) {
    if (!std::holds_alternative<VariableCoeff>(kind_)) return 1.0;
  }
  return std::visit(
      overloaded{
          [&](const Heat&) -> cplx { return std::exp(-t * lambda); },
          [&](const HeatType& k) -> cplx { return ml(k.beta, 1.0, -std::pow(t, k.beta) * lambda); },
          [&](const WaveType& k) -> cplx { return ml(k.beta, 1.0, -std::pow(t, k.beta) * lambda); },
          [&](const SchrodingerType& k) -> cplx {
            return specfun::mittag_leffler(specfun::MLParams{k.beta, 1.0}, cplx(0.0, std::pow(t, k.beta) * lambda));
          },
          [&](const VariableCoeff& k) -> cplx { return std::exp(-lambda * integrated_coefficient(k.alpha, t)); },
          [&](const auto&) -> cplx {
            const auto& s = table(lambda);
            const double x = t / s.dt;
            const std::size_t last = s.size() - 1;
            if (x > static_cast<double>(last) * (1.0 + 1e-12)) {
              throw InputError(reason::kHorizon, "propagator: t beyond the precomputed resolvent range");
            }
            const std::size_t i = std::min(static_cast<std::size_t>(x), last == 0 ? 0 : last - 1);
            const double f = std::min(1.0, x - static_cast<double>(i));
            return s.values[i] + f * (s.values[i + 1] - s.values[i]);
          },
      },
      kind_);
}

std::pair<cplx, cplx> Propagator::wave_pair(double t, double lambda) const {
  const auto* w = std::get_if<WaveType>(&kind_);
  if (!w) throw InputError(reason::kPrecondition, "wave_pair: kind is not WaveType");
  require(t >= 0.0 && lambda >= 0.0, "wave_pair: need t >= 0, lambda >= 0");
  const double x = -std::pow(t, w->beta) * lambda;
  return {ml(w->beta, 1.0, x), t * ml(w->beta, 2.0, x)};
}

cplx propagator_value(const PropagatorKind& kind, double t, double lambda) {
  const double t_max = std::max(t, 1e-3);
  return Propagator(kind, t_max, t_max / 2000.0).value(t, lambda);
}

std::vector<double> mode_eigenvalues(const spectra::SpectralModel& m) {
  constexpr std::uint64_t kMaxModes = 10000000;
  if (m.mode_count() > kMaxModes) throw InputError(reason::kParameter, "mode_eigenvalues: model has too many modes to expand");
  std::vector<double> out;
  out.reserve(m.mode_count());
  if (const auto* p = std::get_if<spectra::PrescribedExponent>(&m.kind())) {
    for (std::uint64_t j = 1; j <= m.truncation(); ++j) {
      out.push_back(p->unit * std::pow(static_cast<double>(j), 1.0 / p->lambda));
    }
    return out;
  }
  for (const auto& l : m.levels()) out.insert(out.end(), l.multiplicity, l.eigenvalue);
  return out;
}

std::vector<std::vector<cplx>> evolve_linear(const Propagator& prop, std::span<const double> eigenvalues,
                                             std::span<const cplx> w0, std::span<const cplx> w1,
                                             std::span<const double> times) {
  const bool wave = std::holds_alternative<WaveType>(prop.kind());
  if (w0.size() != eigenvalues.size()) throw InputError(reason::kIndexMismatch, "evolve_linear: w0 and eigenvalues differ in length");
  if (!w1.empty()) {
    if (!wave) throw InputError(reason::kParameter, "evolve_linear: w1 is only used by the wave type");
    if (w1.size() != eigenvalues.size()) throw InputError(reason::kIndexMismatch, "evolve_linear: w1 and eigenvalues differ in length");
  }
  prop.prepare(eigenvalues);
  std::vector<std::vector<cplx>> out(times.size(), std::vector<cplx>(w0.size()));
  for (std::size_t i = 0; i < times.size(); ++i) {
    for (std::size_t j = 0; j < w0.size(); ++j) {
      if (wave) {
        auto [e0, e1] = prop.wave_pair(times[i], eigenvalues[j]);
        out[i][j] = e0 * w0[j] + (w1.empty() ? cplx(0.0) : e1 * w1[j]);
      } else {
        out[i][j] = prop.value(times[i], eigenvalues[j]) * w0[j];
      }
    }
  }
  return out;
}

std::vector<std::vector<cplx>> evolve_linear(const spectra::SpectralModel& m, const PropagatorKind& kind,
                                             std::span<const cplx> w0, std::span<const double> times,
                                             std::span<const cplx> w1) {
  double t_max = 1e-3;
  for (double t : times) t_max = std::max(t_max, t);
  Propagator prop(kind, t_max, t_max / 2000.0);
  auto ev = mode_eigenvalues(m);
  return evolve_linear(prop, ev, w0, w1, times);
}

double duhamel_beta(const PropagatorKind& kind) {
  if (std::holds_alternative<Heat>(kind)) return 1.0;
  if (const auto* h = std::get_if<HeatType>(&kind)) return h->beta;
  if (const auto* w = std::get_if<WaveType>(&kind)) return w->beta;
  throw InputError(reason::kPrecondition, "duhamel: kind must be Heat, HeatType or WaveType");
}

DuhamelWeights duhamel_weights(double beta, double lambda, double h, std::size_t steps) {
  require(beta > 0.0 && beta < 2.0, "duhamel_weights: beta must lie in (0,2)");
  require(lambda >= 0.0 && h > 0.0, "duhamel_weights: need lambda >= 0, dt > 0");
  // P(m), Q(m): integrals over tau in [m h, (m+1) h] of K(tau) (tau - m h)/h and K(tau) ((m+1) h - tau)/h.
  std::vector<double> P(steps), Q(steps);
  const bool exponential = beta == 1.0;
  auto K = [&](double t) { return std::pow(t, beta - 1.0) * ml_quadrature(beta, beta, -lambda * std::pow(t, beta)); };
  auto K1 = [&](double t) { return t == 0.0 ? 0.0 : std::pow(t, beta) * ml(beta, beta + 1.0, -lambda * std::pow(t, beta)); };
  auto K2 = [&](double t) {
    return t == 0.0 ? 0.0 : std::pow(t, beta + 1.0) * ml(beta, beta + 2.0, -lambda * std::pow(t, beta));
  };
  static const double gx[3] = {-std::sqrt(0.6), 0.0, std::sqrt(0.6)};
  static const double gw[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
  for (std::size_t m = 0; m < steps; ++m) {
    const double lo = h * static_cast<double>(m), hi = lo + h;
    if (exponential) {
      if (lambda == 0.0) {
        P[m] = Q[m] = 0.5 * h;
        continue;
      }
      const double u = lambda * h, e0 = std::exp(-lambda * lo);
      const double A = e0 * -std::expm1(-u) / lambda;
      P[m] = e0 * one_minus_exp_poly(u) / (lambda * lambda * h);
      Q[m] = A - P[m];
    } else if (m < 4) {
      const double A = K1(hi) - K1(lo);
      const double B = hi * K1(hi) - lo * K1(lo) - (K2(hi) - K2(lo));
      P[m] = (B - lo * A) / h;
      Q[m] = (hi * A - B) / h;
    } else {
      double p = 0.0, q = 0.0;
      for (int g = 0; g < 3; ++g) {
        const double tau = lo + 0.5 * h * (1.0 + gx[g]);
        const double k = K(tau) * gw[g] * 0.5 * h;
        p += k * (tau - lo) / h;
        q += k * (hi - tau) / h;
      }
      P[m] = p;
      Q[m] = q;
    }
  }
  DuhamelWeights dw;
  dw.w.resize(steps);
  dw.tail.assign(steps + 1, 0.0);
  for (std::size_t d = 0; d < steps; ++d) dw.w[d] = Q[d] + (d >= 1 ? P[d - 1] : 0.0);
  for (std::size_t n = 1; n <= steps; ++n) dw.tail[n] = P[n - 1];
  return dw;
}

std::vector<std::vector<cplx>> duhamel(const PropagatorKind& kind, std::span<const double> eigenvalues,
                                       const std::vector<std::vector<cplx>>& forcing, double dt) {
  validate(kind);
  const double beta = duhamel_beta(kind);
  if (forcing.size() < 2) throw InputError(reason::kGridMismatch, "duhamel: forcing needs at least two time samples");
  for (const auto& row : forcing) {
    if (row.size() != eigenvalues.size()) throw InputError(reason::kGridMismatch, "duhamel: forcing rows must match the modes");
  }
  const std::size_t steps = forcing.size() - 1;
  std::map<double, DuhamelWeights> weights;
  for (double l : eigenvalues) {
    if (!weights.count(l)) weights.emplace(l, duhamel_weights(beta, l, dt, steps));
  }
  std::vector<std::vector<cplx>> out(forcing.size(), std::vector<cplx>(eigenvalues.size()));
  for (std::size_t j = 0; j < eigenvalues.size(); ++j) {
    const DuhamelWeights& dw = weights.at(eigenvalues[j]);
    for (std::size_t n = 1; n <= steps; ++n) {
      cplx acc = dw.tail[n] * forcing[0][j];
      for (std::size_t d = 0; d < n; ++d) acc += dw.w[d] * forcing[n - d][j];
      out[n][j] = acc;
    }
  }
  return out;
}

}  // namespace evo::evolve
