#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace evo::fraccalc {

// Uniformly sampled signal on t0 + i*dt.
template <class T>
struct SampledSignal {
  double t0 = 0.0;
  double dt = 1.0;
  std::vector<T> values;

  double time(std::size_t i) const { return t0 + dt * static_cast<double>(i); }
  std::size_t size() const { return values.size(); }
};

using RealSignal = SampledSignal<double>;
using ComplexSignal = SampledSignal<std::complex<double>>;

// Checks dt > 0, length >= 2 and finite samples; throws InputError otherwise.
template <class T>
void validate(const SampledSignal<T>& f);

/// Riemann-Liouville integral of order beta > 0, product-rectangle rule with
/// exact moments of (t-s)^{beta-1}. Requires f.t0 == 0.
template <class T>
SampledSignal<T> rl_integral(double beta, const SampledSignal<T>& f);

struct CaputoOptions {
  // Number of starting-correction terms (exponents beta, 2 beta, ...);
  // 0 gives the plain L1 scheme.
  int corrections = 3;
};

struct CaputoResult {
  RealSignal signal;
  // values[0] is a copy of the first interior value, not a computed one.
  bool origin_extrapolated = true;
};

/// Caputo derivative of order 0 < beta < 2 (non-integer) by the L1 scheme
/// applied to f minus its Taylor head. init = {f(0)} or {f(0), f'(0)}.
CaputoResult caputo_derivative(double beta, const RealSignal& f, std::span<const double> init,
                               const CaputoOptions& opt = {});

}  // namespace evo::fraccalc
