#pragma once

#include <complex>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include "evoscalar/fraccalc.hpp"

namespace evo::kernels {

struct Constant {
  double c = 1.0;
};

// t^{beta-1} / Gamma(beta)
struct PowerLaw {
  double beta = 0.5;
};

// t^{-beta} / Gamma(1-beta), 0 < beta < 1
struct CaputoDual {
  double beta = 0.5;
};

// 1 + gamma t^{-beta} / Gamma(1-beta)
struct RayleighStokes {
  double beta = 0.5;
  double gamma = 1.0;
};

// t^{beta-1} E_{(beta-beta_1,..,beta-beta_m),beta}(-sigma_1 t^{beta-beta_1}, ...),
// Laplace transform 1/(s^beta + sum sigma_i s^{beta_i}).
struct MultiTerm {
  double beta = 1.0;
  std::vector<double> betas;
  std::vector<double> sigmas;
};

// Node: linear interpolation of samples at t0 + i dt.
// Cell: values are cell averages on [i dt, (i+1) dt] stored at midpoints
// (t0 = dt/2); integrals are exact for the staircase, point values
// interpolate between midpoints.
enum class Layout { Node, Cell };

// Build through make_tabulated, which fills the integral tables.
struct Tabulated {
  fraccalc::RealSignal signal;
  Layout layout = Layout::Node;
  std::vector<double> knots;   // segment end points of the integrated representation
  std::vector<double> fl, fr;  // linear integrand on each segment (left/right values)
  std::vector<double> c1;      // int_0^x k at the knots
  std::vector<double> c2;      // int_0^x int_0^y k at the knots
};

using KernelKind = std::variant<Constant, PowerLaw, CaputoDual, RayleighStokes, MultiTerm, Tabulated>;

struct Kernel {
  KernelKind kind;
  bool cp_flag = false;  // asserted (analytic) or checked (tabulated) membership in the PC class
};

// Validating constructors; InputError on bad parameters.
Kernel make_constant(double c);
Kernel make_power_law(double beta);
Kernel make_caputo_dual(double beta);
Kernel make_rayleigh_stokes(double beta, double gamma);
Kernel make_multi_term(double beta, std::vector<double> betas, std::vector<double> sigmas);
Kernel make_tabulated(fraccalc::RealSignal signal, Layout layout = Layout::Node);

// Reads the `t,k` text format (strictly increasing, uniformly spaced t).
Kernel load_tabulated(std::istream& in);
Kernel load_tabulated_file(const std::string& path);

std::string describe(const Kernel& k);

// True when k(0+) = +infinity.
bool singular_at_origin(const Kernel& k);

double kernel_eval(const Kernel& k, double t);

// int_0^t k and int_0^t int_0^s k.
double cumulative_integral(const Kernel& k, double t);
double second_integral(const Kernel& k, double t);

// Laplace transform at complex s (analytic kinds only).
std::complex<double> kernel_laplace(const Kernel& k, std::complex<double> s);

// Fixed-Talbot inversion of F at t > 0 (F analytic off the negative axis).
template <class F>
double talbot_inverse(F&& f_hat, double t, int m = 24);

// Nonnegative and nonincreasing at the given sample times.
bool check_cp_samples(const Kernel& k, const std::vector<double>& times);

struct SoninePair {
  Kernel k;
  Kernel K;
  double verified_to = -1.0;  // negative until sonine_verify has run
};

struct SonineReport {
  double max_deviation = 0.0;
  double worst_t = 0.0;
  bool pass = false;
};

// Partner K of k with (K*k)(t) = 1, piecewise constant on cells of width dt
// up to T; returned as a Cell-layout tabulated kernel.
Kernel sonine_solve(const Kernel& k, double T, double dt);

// (K*k)(t) at t = dt, 2dt, ..., T, splitting at t/2 and using exact moments
// of whichever factor is singular on each half.
SonineReport sonine_verify(const SoninePair& pair, double T, double dt, double tol);

// (a*b)(t) with the same quadrature.
double convolve_at(const Kernel& a, const Kernel& b, double t, int sub_intervals = 512);

}  // namespace evo::kernels

#include "evoscalar/kernels_talbot.ipp"
