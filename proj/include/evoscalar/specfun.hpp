#pragma once

#include <complex>
#include <span>
#include <vector>

namespace evo::specfun {

using cplx = std::complex<double>;

/// Gamma function on the real line. Throws InputError at non-positive integers.
double gamma(double x);

/// 1/Gamma(x), entire: returns 0 at the poles instead of throwing.
double rgamma(double x);

/// log Gamma(x) for x > 0, without touching the global signgam.
double log_gamma(double x);

struct MLParams {
  double alpha = 1.0;
  double delta = 1.0;
};

/// Which evaluation route produced a Mittag-Leffler value.
enum class MLRoute { Origin, Taylor, Asymptotic, Contour, ExtendedTaylor };

struct MLEvaluation {
  cplx value;
  double error_estimate = 0.0;  ///< absolute
  MLRoute route = MLRoute::Taylor;
};

/// Two-parameter Mittag-Leffler function E_{alpha,delta}(z).
///
/// Small |z| uses the power series. Larger |z| tries, in order, the
/// asymptotic expansion (with the exponential pole contributions), numerical
/// inversion of the Laplace transform s^{alpha-delta}/(s^alpha - z) along an
/// optimal parabolic contour, and finally the power series in 50-digit
/// arithmetic. Throws NumericalError("accuracy") when no route reaches
/// the requested relative tolerance.
cplx mittag_leffler(const MLParams& p, cplx z);
double mittag_leffler(const MLParams& p, double x);

/// Same as mittag_leffler but reports the route and error estimate.
/// `rel_tol` is the relative accuracy target (an absolute floor of 1e-300 is used).
MLEvaluation mittag_leffler_detail(const MLParams& p, cplx z, double rel_tol = 1e-11);

/// Empirical sup over a log-spaced grid on [0, t_max] of (1+t)|E_{a,d}(-t)|.
/// Requires 0 < alpha < 2.
double ml_bound_constant(const MLParams& p, double t_max, int n_samples);

/// Same sup along the ray z = t e^{i theta}. Rays with |theta| < pi*alpha/2 are
/// outside the sector where the C/(1+|z|) bound holds and are rejected.
double ml_bound_constant_ray(const MLParams& p, double theta, double t_max, int n_samples);

/// Log-spaced sample grid used by ml_bound_constant: t=0 followed by
/// n_samples-1 points geometrically spaced on [t_max*1e-8, t_max].
std::vector<double> bound_grid(double t_max, int n_samples);

struct MultiMLParams {
  std::vector<double> a;
  double b = 1.0;
};

/// Multinomial Mittag-Leffler function
///   sum_k sum_{l_1+..+l_m=k} (k; l_1..l_m) prod z_i^{l_i} / Gamma(b + sum a_i l_i).
/// Throws NumericalError("convergence") if the terms do not fall below the
/// tolerance within the term cap, or if cancellation destroys the result.
cplx multinomial_ml(const MultiMLParams& p, std::span<const cplx> z);
double multinomial_ml(const MultiMLParams& p, std::span<const double> z);

}  // namespace evo::specfun
