#pragma once

#include <cmath>
#include <complex>
#include <numbers>

namespace evo::kernels {

template <class F>
double talbot_inverse(F&& f_hat, double t, int m) {
  using cplx = std::complex<double>;
  const double r = 2.0 * m / (5.0 * t);
  double sum = 0.5 * std::real(f_hat(cplx(r, 0.0))) * std::exp(r * t);
  for (int k = 1; k < m; ++k) {
    const double theta = k * std::numbers::pi / m;
    const double cot = std::cos(theta) / std::sin(theta);
    const cplx delta = r * theta * cplx(cot, 1.0);
    const double sigma = theta + (theta * cot - 1.0) * cot;
    sum += std::real(std::exp(t * delta) * f_hat(delta) * cplx(1.0, sigma));
  }
  return r / m * sum;
}

}  // namespace evo::kernels
