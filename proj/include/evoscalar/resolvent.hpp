#pragma once

#include <memory>
#include <span>
#include <vector>

#include "evoscalar/fraccalc.hpp"
#include "evoscalar/kernels.hpp"

namespace evo::resolvent {

struct ResolventRequest {
  kernels::Kernel kernel;
  double lambda = 0.0;
  double T = 1.0;
  double dt = 1e-3;
};

// Product-trapezoid scheme for int k(t_n - tau) s(tau) dtau with s piecewise
// linear on an internal mesh: geometric-power grading on [0, tau0] (tau0 a
// few dozen output steps) followed by the uniform output grid. The weights
// depend on the kernel only and are shared across lambda values.
struct ResolventWeights {
  std::shared_ptr<const kernels::Kernel> kernel;
  double dt = 0.0;
  std::size_t n_out = 0;             // output samples are i*dt, i = 0..n_out
  std::size_t lead = 0;              // output steps covered by the graded part
  std::size_t graded = 0;            // graded cells
  std::vector<double> nodes;         // mesh nodes x_0 = 0 < x_1 < ...
  std::vector<double> cross_a;       // graded cells: row n, column c-1 (left-node weight)
  std::vector<double> cross_b;       // graded cells: right-node weight
  std::vector<double> toe_a, toe_b;  // uniform cells by lag m = n - c + 1
  // outputs i < lead: cells of the equation cut at t = i*dt; entries
  // lead_offset[i] .. lead_offset[i+1]-1, the last one being the cut cell
  std::vector<std::size_t> lead_offset;
  std::vector<double> lead_a, lead_b;
};

ResolventWeights resolvent_weights(const kernels::Kernel& k, double T, double dt);

/// s(t; lambda) solving s = 1 - lambda (k * s), s(0) = 1, implicit in the
/// current value. Throws NumericalError("step-rejected") if the implicit
/// denominator 1 + lambda b[1] is not positive.
fraccalc::RealSignal resolvent_scalar(const ResolventRequest& req);
fraccalc::RealSignal resolvent_from_weights(const ResolventWeights& w, double lambda);

/// Solves for several lambda values sharing one weight table; results are in
/// input order. threads = 0 uses the hardware concurrency.
std::vector<fraccalc::RealSignal> resolvent_batch(const kernels::Kernel& k, std::span<const double> lambdas, double T,
                                                  double dt, unsigned threads = 0);

struct BoundReport {
  double max_violation = 0.0;  // max over the grid of s - 1/(1 + lambda int_0^t k)
  double worst_t = 0.0;
  bool pass = false;
};

/// Requires k.cp_flag (precondition error otherwise).
BoundReport resolvent_bound_check(const ResolventRequest& req, double tol = 1e-6);
BoundReport bound_check_signal(const kernels::Kernel& k, double lambda, const fraccalc::RealSignal& s, double tol = 1e-6);

}  // namespace evo::resolvent
