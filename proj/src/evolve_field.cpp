#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <mutex>
#include <ostream>
#include <sstream>

#include "evoscalar/error.hpp"
#include "evoscalar/evolve.hpp"

namespace evo::evolve {

namespace {

// The FFTW planner is not thread-safe.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

std::size_t grid_size(int n, int N) {
  std::size_t s = 1;
  for (int d = 0; d < n; ++d) s *= static_cast<std::size_t>(N);
  return s;
}

void transform(int n, int N, std::vector<cplx>& data, int sign) {
  std::vector<int> dims(n, N);
  auto* ptr = reinterpret_cast<fftw_complex*>(data.data());
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(planner_mutex());
    plan = fftw_plan_dft(n, dims.data(), ptr, ptr, sign, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  std::lock_guard<std::mutex> lock(planner_mutex());
  fftw_destroy_plan(plan);
}

void check_alias(int K, int N) {
  if (K < 0) throw InputError(reason::kParameter, "torus coefficients: K must be >= 0");
  if (2 * K >= N) {
    std::ostringstream os;
    os << "torus: N = " << N << " cannot resolve frequencies up to K = " << K << " (need N > 2K)";
    throw InputError(reason::kAliasing, os.str());
  }
}

// Row-major offsets: multi-index digits in base `base`.
std::vector<int> digits(std::size_t idx, int n, int base) {
  std::vector<int> d(n);
  for (int i = n - 1; i >= 0; --i) {
    d[i] = static_cast<int>(idx % static_cast<std::size_t>(base));
    idx /= static_cast<std::size_t>(base);
  }
  return d;
}

}  // namespace

void validate(const FieldOnTorus& f) {
  if (f.n < 1) throw InputError(reason::kParameter, "field: dimension must be >= 1");
  if (f.N < 4 || f.N % 2 != 0) throw InputError(reason::kParameter, "field: N must be even and >= 4");
  if (f.values.size() != grid_size(f.n, f.N)) throw InputError(reason::kDimension, "field: sample count must be N^n");
}

std::vector<cplx> forward_fft(const FieldOnTorus& f) {
  validate(f);
  std::vector<cplx> c(f.values);
  transform(f.n, f.N, c, FFTW_FORWARD);
  const double scale = 1.0 / static_cast<double>(c.size());
  for (auto& v : c) v *= scale;
  return c;
}

FieldOnTorus inverse_fft(int n, int N, std::span<const cplx> coeffs) {
  FieldOnTorus f{n, N, std::vector<cplx>(coeffs.begin(), coeffs.end())};
  validate(f);
  transform(n, N, f.values, FFTW_BACKWARD);
  return f;
}

std::vector<double> fft_eigenvalues(int n, int N) {
  std::vector<double> ev(grid_size(n, N));
  for (std::size_t i = 0; i < ev.size(); ++i) {
    double s = 0.0;
    for (int j : digits(i, n, N)) {
      const int k = j < N / 2 ? j : j - N;
      s += static_cast<double>(k) * k;
    }
    ev[i] = s;
  }
  return ev;
}

std::vector<double> torus_eigenvalues(int n, int K) {
  std::vector<double> ev(grid_size(n, 2 * K + 1));
  for (std::size_t i = 0; i < ev.size(); ++i) {
    double s = 0.0;
    for (int j : digits(i, n, 2 * K + 1)) s += static_cast<double>(j - K) * (j - K);
    ev[i] = s;
  }
  return ev;
}

FieldOnTorus synthesize(const spectra::SpectralModel& m, const TorusCoeffs& coeffs, int N) {
  const auto* torus = std::get_if<spectra::TorusLaplacian>(&m.kind());
  if (!torus) throw InputError(reason::kPrecondition, "synthesize: model must be a TorusLaplacian");
  if (torus->n != coeffs.n) throw InputError(reason::kDimension, "synthesize: coefficient dimension differs from the model");
  if (coeffs.c.size() != grid_size(coeffs.n, 2 * coeffs.K + 1)) {
    throw InputError(reason::kDimension, "synthesize: need (2K+1)^n coefficients");
  }
  check_alias(coeffs.K, N);
  std::vector<cplx> full(grid_size(coeffs.n, N));
  for (std::size_t i = 0; i < coeffs.c.size(); ++i) {
    std::size_t idx = 0;
    for (int j : digits(i, coeffs.n, 2 * coeffs.K + 1)) {
      const int k = j - coeffs.K;
      idx = idx * static_cast<std::size_t>(N) + static_cast<std::size_t>((k + N) % N);
    }
    full[idx] = coeffs.c[i];
  }
  return inverse_fft(coeffs.n, N, full);
}

TorusCoeffs analyze(const FieldOnTorus& f, int K) {
  check_alias(K, f.N);
  auto full = forward_fft(f);
  TorusCoeffs out{f.n, K, std::vector<cplx>(grid_size(f.n, 2 * K + 1))};
  for (std::size_t i = 0; i < out.c.size(); ++i) {
    std::size_t idx = 0;
    for (int j : digits(i, f.n, 2 * K + 1)) {
      const int k = j - K;
      idx = idx * static_cast<std::size_t>(f.N) + static_cast<std::size_t>((k + f.N) % f.N);
    }
    out.c[i] = full[idx];
  }
  return out;
}

double lp_norm(const FieldOnTorus& f, double p) {
  validate(f);
  if (!(p >= 1.0)) throw InputError(reason::kExponent, "lp_norm: p must be >= 1");
  double peak = 0.0;
  for (const auto& v : f.values) peak = std::max(peak, std::abs(v));
  if (std::isinf(p) || peak == 0.0) return peak;
  double acc = 0.0;
  for (const auto& v : f.values) acc += std::pow(std::abs(v) / peak, p);
  return peak * std::pow(acc / static_cast<double>(f.values.size()), 1.0 / p);
}

double mixed_norm(std::span<const double> times, std::span<const FieldOnTorus> fields, const MixedNormSpec& spec) {
  if (times.size() != fields.size() || times.size() < 2) {
    throw InputError(reason::kDimension, "mixed_norm: need matching times and fields (at least two)");
  }
  if (!(spec.r >= 1.0) || !(spec.q >= 1.0)) throw InputError(reason::kExponent, "mixed_norm: exponents must be >= 1");
  if (!(spec.t_a < spec.t_b)) throw InputError(reason::kWindow, "mixed_norm: need t_a < t_b");
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (!(times[i] > times[i - 1])) throw InputError(reason::kGridMismatch, "mixed_norm: times must increase");
  }
  const double slack = 1e-12 * (times.back() - times.front());
  if (spec.t_a < times.front() - slack || spec.t_b > times.back() + slack) {
    throw InputError(reason::kWindow, "mixed_norm: window outside the sampled times");
  }
  std::vector<double> g(times.size());
  for (std::size_t i = 0; i < times.size(); ++i) g[i] = lp_norm(fields[i], spec.q);
  const bool sup = std::isinf(spec.r);
  auto value_at = [&](std::size_t i, double t) {
    const double f = (t - times[i]) / (times[i + 1] - times[i]);
    return g[i] + f * (g[i + 1] - g[i]);
  };
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < times.size(); ++i) {
    const double lo = std::max(times[i], spec.t_a), hi = std::min(times[i + 1], spec.t_b);
    if (!(hi > lo)) continue;
    const double a = value_at(i, lo), b = value_at(i, hi);
    if (sup) {
      acc = std::max({acc, a, b});
    } else {
      acc += 0.5 * (hi - lo) * (std::pow(a, spec.r) + std::pow(b, spec.r));
    }
  }
  return sup ? acc : std::pow(acc, 1.0 / spec.r);
}

void write_field(std::ostream& out, const FieldOnTorus& f) {
  validate(f);
  bool real = std::all_of(f.values.begin(), f.values.end(), [](const cplx& v) { return v.imag() == 0.0; });
  out << f.n << "," << f.N << "\n";
  auto old = out.precision(17);
  for (const auto& v : f.values) {
    out << v.real();
    if (!real) out << "," << v.imag();
    out << "\n";
  }
  out.precision(old);
}

FieldOnTorus read_field(std::istream& in) {
  FieldOnTorus f;
  std::string line;
  auto fail = [](const std::string& msg) { throw InputError(reason::kFormat, "field file: " + msg); };
  if (!std::getline(in, line)) fail("empty input");
  {
    std::istringstream hs(line);
    char comma = 0;
    if (!(hs >> f.n >> comma >> f.N) || comma != ',') fail("expected header `n,N`");
  }
  if (f.n < 1 || f.N < 4 || f.n > 6) fail("invalid header values");
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::istringstream ls(line);
    double re = 0.0, im = 0.0;
    if (!(ls >> re)) fail("unparsable sample");
    char comma = 0;
    if (ls >> comma) {
      if (comma != ',' || !(ls >> im)) fail("unparsable sample");
    }
    f.values.emplace_back(re, im);
  }
  validate(f);
  return f;
}

}  // namespace evo::evolve
