#pragma once

#include <complex>
#include <iosfwd>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <variant>
#include <vector>

#include "evoscalar/fraccalc.hpp"
#include "evoscalar/kernels.hpp"
#include "evoscalar/spectra.hpp"

namespace evo::evolve {

using cplx = std::complex<double>;

struct Heat {};
struct HeatType {
  double beta = 0.5;  // (0,1)
};
struct WaveType {
  double beta = 1.5;  // (1,2)
};
struct SchrodingerType {
  double beta = 0.5;  // (0,1)
};
struct RayleighStokes {
  double beta = 0.5;  // (0,1)
  double gamma = 1.0;
};
// alpha sampled from t = 0; values >= 0.
struct VariableCoeff {
  fraccalc::RealSignal alpha;
};
// 0 < betas[m-1] < ... < betas[0] < beta <= 1, sigmas > 0.
struct MultiTerm {
  double beta = 1.0;
  std::vector<double> betas;
  std::vector<double> sigmas;
};
struct GeneralKernel {
  kernels::Kernel k;
};

using PropagatorKind =
    std::variant<Heat, HeatType, WaveType, SchrodingerType, RayleighStokes, VariableCoeff, MultiTerm, GeneralKernel>;

// Throws InputError(parameter) when the kind's parameters are out of range.
void validate(const PropagatorKind& kind);
std::string describe(const PropagatorKind& kind);

// Kernel k of the kinds written as w = w0 - lambda (k * w); precondition
// error for the Schrodinger and variable-coefficient kinds.
kernels::Kernel kind_kernel(const PropagatorKind& kind);
bool has_kernel(const PropagatorKind& kind);

// phi(t; lambda). Resolvent-backed kinds are solved on [0, t_max] with step
// dt and cached per lambda; closed-form kinds ignore t_max and dt.
class Propagator {
public:
  explicit Propagator(PropagatorKind kind, double t_max = 1.0, double dt = 1e-3);

  const PropagatorKind& kind() const { return kind_; }
  cplx value(double t, double lambda) const;
  // Wave type: (E_beta(-t^beta lambda), t E_{beta,2}(-t^beta lambda)).
  std::pair<cplx, cplx> wave_pair(double t, double lambda) const;
  // Solves the resolvents of all given lambda values at once.
  void prepare(std::span<const double> lambdas) const;

private:
  const fraccalc::RealSignal& table(double lambda) const;

  PropagatorKind kind_;
  double t_max_;
  double dt_;
  std::shared_ptr<const kernels::Kernel> kernel_;
  mutable std::unique_ptr<std::mutex> mutex_ = std::make_unique<std::mutex>();
  mutable std::map<double, fraccalc::RealSignal> cache_;
};

cplx propagator_value(const PropagatorKind& kind, double t, double lambda);

// int_0^t alpha for the piecewise-linear interpolant of the samples.
double integrated_coefficient(const fraccalc::RealSignal& alpha, double t);

// Modal data: one eigenvalue per coefficient.
std::vector<double> mode_eigenvalues(const spectra::SpectralModel& m);

// Coefficients per time; w1 is used by the wave type only (may be empty).
std::vector<std::vector<cplx>> evolve_linear(const Propagator& prop, std::span<const double> eigenvalues,
                                             std::span<const cplx> w0, std::span<const cplx> w1,
                                             std::span<const double> times);
std::vector<std::vector<cplx>> evolve_linear(const spectra::SpectralModel& m, const PropagatorKind& kind,
                                             std::span<const cplx> w0, std::span<const double> times,
                                             std::span<const cplx> w1 = {});

// Product-integration weights of int_0^{t_n} K(t_n - s; lambda) f(s) ds for
// f piecewise linear on i*dt, K(t) = t^{beta-1} E_{beta,beta}(-lambda t^beta)
// (beta = 1: the exponential). u_n = sum_{d<n} w[d] f_{n-d} + tail[n] f_0.
struct DuhamelWeights {
  std::vector<double> w;
  std::vector<double> tail;
};
DuhamelWeights duhamel_weights(double beta, double lambda, double dt, std::size_t steps);
double duhamel_beta(const PropagatorKind& kind);  // precondition error unless Heat/HeatType/WaveType

// forcing[i][mode] on t = i*dt, i = 0..steps; returns the Duhamel term with the
// same layout.
std::vector<std::vector<cplx>> duhamel(const PropagatorKind& kind, std::span<const double> eigenvalues,
                                       const std::vector<std::vector<cplx>>& forcing, double dt);

// ---- fields on the torus R^n / (2 pi Z)^n, normalized measure ----

struct FieldOnTorus {
  int n = 1;
  int N = 0;  // points per dimension, even, >= 4
  std::vector<cplx> values;
};

// Coefficients of e^{i k.x} for k in [-K, K]^n, lexicographic in k + K.
struct TorusCoeffs {
  int n = 1;
  int K = 0;
  std::vector<cplx> c;
};

void validate(const FieldOnTorus& f);
FieldOnTorus synthesize(const spectra::SpectralModel& m, const TorusCoeffs& coeffs, int N);
TorusCoeffs analyze(const FieldOnTorus& f, int K);
std::vector<double> torus_eigenvalues(int n, int K);

// Full-grid transforms in FFT order (index j <-> frequency j or j - N).
std::vector<cplx> forward_fft(const FieldOnTorus& f);
FieldOnTorus inverse_fft(int n, int N, std::span<const cplx> coeffs);
std::vector<double> fft_eigenvalues(int n, int N);

double lp_norm(const FieldOnTorus& f, double p);  // p = infinity allowed

struct MixedNormSpec {
  double r = 2.0;
  double q = 2.0;
  double t_a = 0.0;
  double t_b = 1.0;
};
// L^r over [t_a, t_b] of the piecewise-linear interpolant of ||w(t)||_q^r.
double mixed_norm(std::span<const double> times, std::span<const FieldOnTorus> fields, const MixedNormSpec& spec);

void write_field(std::ostream& out, const FieldOnTorus& f);
FieldOnTorus read_field(std::istream& in);

// ---- decay bounds ----

struct BoundValue {
  double value = 0.0;
  double v_star = 0.0;  // maximizing spectral parameter (0 when the sup is at v -> 0+)
};

// B(t) = sup_{v>0} N(v)^{1/p-1/q} psi(t; v), psi = e^{-tv} (heat),
// e^{-v int_0^t alpha} (variable coefficient), 1/(1 + v int_0^t k) (kernel kinds).
BoundValue bound_sup(const spectra::SpectralModel& m, const PropagatorKind& kind, double p, double q, double t);
double bound_function(const spectra::SpectralModel& m, const PropagatorKind& kind, double p, double q, double t);

struct DecayRow {
  double t = 0.0;
  double lq_norm = 0.0;
  double bound = 0.0;
  double ratio = 0.0;  // ||w(t)||_q / ||w0||_p
};

struct DecayResult {
  double slope = 0.0;
  double envelope_constant = 0.0;
  double gap_time = 0.0;  // 1/lambda_1 of the model
  bool pre_gap = true;    // window ends before gap_time
  std::vector<DecayRow> rows;
};

// Evolves mean-zero w0 on the torus model and fits log ratio against log t
// on n_times log-spaced times in [t_a, t_b].
DecayResult decay_slope(const spectra::SpectralModel& m, const PropagatorKind& kind, double p, double q,
                        const FieldOnTorus& w0, double t_a, double t_b, int n_times = 24);

void write_decay_csv(std::ostream& out, const DecayResult& r);

// ---- Picard iteration ----

struct PicardOptions {
  double eta = 3.0;
  double mu = 1.0;  // +1 or -1
  double T = 0.5;
  double dt = 1e-3;
  double tol = 1e-10;
  int max_iter = 50;
  double p0 = 2.0;
};

struct PicardResult {
  std::vector<double> times;
  std::vector<FieldOnTorus> trajectory;
  int iterations = 0;
  std::vector<double> increments;         // sup_t ||w_{n+1} - w_n||_{p0}
  std::vector<double> contraction_ratios;  // increments[i+1] / increments[i]
  double residual = 0.0;                  // sup_t ||w - linear - duhamel(F(w))||_{p0}
};

// w = S(t) w0 (+ wave term for w1) + int_0^t K(t-s) F(w(s)) ds,
// F(w) = mu |w|^{eta-1} w evaluated in physical space. Throws
// NumericalError(divergence) when a ratio exceeds 1 three times in a row or a
// norm overflows, NumericalError(convergence) after max_iter iterations.
PicardResult picard_solve(const spectra::SpectralModel& m, const PropagatorKind& kind, const FieldOnTorus& w0,
                          const FieldOnTorus* w1, const PicardOptions& opt);

}  // namespace evo::evolve
