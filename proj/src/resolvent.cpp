#include "evoscalar/resolvent.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <optional>
#include <thread>

#include "evoscalar/error.hpp"

namespace evo::resolvent {

namespace {

void check_grid(double T, double dt) {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw InputError(reason::kParameter, "resolvent: dt must be > 0");
  if (!(T > 0.0) || !std::isfinite(T)) throw InputError(reason::kParameter, "resolvent: T must be > 0");
  if (T < dt) throw InputError(reason::kParameter, "resolvent: T must be >= dt");
}

void check_lambda(double lambda) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw InputError(reason::kParameter, "resolvent: lambda must be >= 0");
}

}  // namespace

namespace {

// Graded start: covers max(16 steps, kLeadTime) with twice as many cells as
// the output steps it replaces (at least 64).
constexpr double kLeadTime = 0.1;
constexpr std::size_t kMinLeadSteps = 16;
constexpr std::size_t kMinGradedCells = 64;
constexpr double kGrading = 6.0;
// Rows with t_n >= kFarFactor * tau0 see the kernel only on
// [t_n - tau0, t_n], where it is analytic; it is sampled there at kCheb
// Chebyshev points and interpolated.
constexpr double kFarFactor = 3.0;
constexpr int kCheb = 20;

// Left/right node weights of int_lo^hi k(u) [linear hat] du for the cell
// u in [lo, hi]; alpha multiplies the value at u = hi side of tau (left node).
void cell_weights(const kernels::Kernel& k, double lo, double hi, double& alpha, double& beta) {
  const double h = hi - lo;
  if (lo > 64.0 * h) {
    // kernel smooth on the cell: 3-point Gauss-Legendre
    static constexpr double x[3] = {-0.7745966692414834, 0.0, 0.7745966692414834};
    static constexpr double wg[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
    alpha = beta = 0.0;
    for (int g = 0; g < 3; ++g) {
      const double u = lo + 0.5 * h * (1.0 + x[g]);
      const double f = 0.5 * h * wg[g] * kernels::kernel_eval(k, u);
      alpha += f * (u - lo) / h;
      beta += f * (hi - u) / h;
    }
    return;
  }
  const double c_lo = kernels::cumulative_integral(k, lo), c_hi = kernels::cumulative_integral(k, hi);
  const double m0 = c_hi - c_lo;
  const double m1 = hi * c_hi - lo * c_lo - (kernels::second_integral(k, hi) - kernels::second_integral(k, lo));
  alpha = (m1 - lo * m0) / h;
  beta = (hi * m0 - m1) / h;
}

// Barycentric interpolant through first-kind Chebyshev points on [a, b].
class ChebSample {
public:
  ChebSample(const kernels::Kernel& k, double a, double b) : a_(a), b_(b) {
    for (int j = 0; j < kCheb; ++j) {
      const double th = M_PI * (j + 0.5) / kCheb;
      x_[j] = 0.5 * (a + b) + 0.5 * (b - a) * std::cos(th);
      f_[j] = kernels::kernel_eval(k, x_[j]);
      w_[j] = (j % 2 ? -1.0 : 1.0) * std::sin(th);
    }
  }
  double operator()(double u) const {
    double num = 0.0, den = 0.0;
    for (int j = 0; j < kCheb; ++j) {
      const double d = u - x_[j];
      if (d == 0.0) return f_[j];
      num += w_[j] * f_[j] / d;
      den += w_[j] / d;
    }
    return num / den;
  }

private:
  double a_, b_;
  double x_[kCheb], f_[kCheb], w_[kCheb];
};

void cell_weights_gl(const ChebSample& k, double lo, double hi, double& alpha, double& beta) {
  static constexpr double x[3] = {-0.7745966692414834, 0.0, 0.7745966692414834};
  static constexpr double wg[3] = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
  const double h = hi - lo;
  alpha = beta = 0.0;
  for (int g = 0; g < 3; ++g) {
    const double u = lo + 0.5 * h * (1.0 + x[g]);
    const double f = 0.5 * h * wg[g] * k(u);
    alpha += f * (u - lo) / h;
    beta += f * (hi - u) / h;
  }
}

}  // namespace

ResolventWeights resolvent_weights(const kernels::Kernel& k, double T, double dt) {
  check_grid(T, dt);
  ResolventWeights w;
  w.kernel = std::make_shared<const kernels::Kernel>(k);
  w.dt = dt;
  w.n_out = static_cast<std::size_t>(std::llround(T / dt));
  w.lead = std::min(w.n_out, std::max(kMinLeadSteps, static_cast<std::size_t>(std::llround(kLeadTime / dt))));
  w.graded = std::max(kMinGradedCells, 2 * w.lead);
  const double tau0 = dt * static_cast<double>(w.lead);
  w.nodes.push_back(0.0);
  for (std::size_t j = 1; j <= w.graded; ++j) {
    w.nodes.push_back(tau0 * std::pow(static_cast<double>(j) / static_cast<double>(w.graded), kGrading));
  }
  w.nodes.back() = tau0;
  for (std::size_t i = w.lead + 1; i <= w.n_out; ++i) w.nodes.push_back(dt * static_cast<double>(i));
  const std::size_t m_nodes = w.nodes.size() - 1;
  const std::size_t g = w.graded;

  w.cross_a.assign((m_nodes + 1) * g, 0.0);
  w.cross_b.assign((m_nodes + 1) * g, 0.0);
  for (std::size_t n = 1; n <= m_nodes; ++n) {
    const std::size_t cmax = std::min(n, g);
    const double tn = w.nodes[n];
    std::optional<ChebSample> far;
    if (n > g && tn >= kFarFactor * tau0) far.emplace(k, tn - tau0, tn);
    for (std::size_t c = 1; c <= cmax; ++c) {
      double a = 0.0, b = 0.0;
      const double lo = tn - w.nodes[c], hi = tn - w.nodes[c - 1];
      if (far && lo > 64.0 * (hi - lo)) {
        cell_weights_gl(*far, lo, hi, a, b);
      } else {
        cell_weights(k, lo, hi, a, b);
      }
      w.cross_a[n * g + (c - 1)] = a;
      w.cross_b[n * g + (c - 1)] = b;
    }
  }
  const std::size_t uniform_cells = m_nodes - g;
  w.toe_a.assign(uniform_cells + 1, 0.0);
  w.toe_b.assign(uniform_cells + 1, 0.0);
  for (std::size_t m = 1; m <= uniform_cells; ++m) {
    cell_weights(k, dt * static_cast<double>(m - 1), dt * static_cast<double>(m), w.toe_a[m], w.toe_b[m]);
  }
  w.lead_offset.assign(1, 0);
  for (std::size_t i = 0; i < w.lead; ++i) {
    if (i > 0) {
      const double t = dt * static_cast<double>(i);
      auto it = std::upper_bound(w.nodes.begin(), w.nodes.begin() + static_cast<std::ptrdiff_t>(g + 1), t);
      const auto j = static_cast<std::size_t>(it - w.nodes.begin());  // t in (x_{j-1}, x_j]
      double a = 0.0, b = 0.0;
      for (std::size_t c = 1; c < j; ++c) {
        cell_weights(k, t - w.nodes[c], t - w.nodes[c - 1], a, b);
        w.lead_a.push_back(a);
        w.lead_b.push_back(b);
      }
      cell_weights(k, 0.0, t - w.nodes[j - 1], a, b);
      w.lead_a.push_back(a);
      w.lead_b.push_back(b);
    }
    w.lead_offset.push_back(w.lead_a.size());
  }
  return w;
}

fraccalc::RealSignal resolvent_from_weights(const ResolventWeights& w, double lambda) {
  check_lambda(lambda);
  fraccalc::RealSignal out{0.0, w.dt, std::vector<double>(w.n_out + 1, 1.0)};
  if (lambda == 0.0) return out;
  const std::size_t m_nodes = w.nodes.size() - 1;
  const std::size_t g = w.graded;
  std::vector<double> v(m_nodes + 1, 1.0);
  for (std::size_t n = 1; n <= m_nodes; ++n) {
    double diag = 0.0, acc = 0.0;
    const std::size_t cmax = std::min(n, g);
    for (std::size_t c = 1; c <= cmax; ++c) {
      const double a = w.cross_a[n * g + (c - 1)], b = w.cross_b[n * g + (c - 1)];
      acc += a * v[c - 1];
      if (c == n) {
        diag = b;
      } else {
        acc += b * v[c];
      }
    }
    for (std::size_t c = g + 1; c <= n; ++c) {
      const std::size_t m = n - c + 1;
      acc += w.toe_a[m] * v[c - 1];
      if (c == n) {
        diag = w.toe_b[m];
      } else {
        acc += w.toe_b[m] * v[c];
      }
    }
    const double denom = 1.0 + lambda * diag;
    if (!(denom > 0.0)) throw NumericalError(reason::kStepRejected, "resolvent: implicit denominator is not positive");
    v[n] = (1.0 - lambda * acc) / denom;
  }
  // Output grid: copy mesh values after the graded part; inside it, evaluate
  // the integral equation at t itself with the last cell cut at t.
  for (std::size_t i = 1; i <= w.n_out; ++i) {
    if (i >= w.lead) {
      out.values[i] = v[g + (i - w.lead)];
      continue;
    }
    const std::size_t b0 = w.lead_offset[i], b1 = w.lead_offset[i + 1];
    double acc = 0.0;
    for (std::size_t e = b0; e + 1 < b1; ++e) acc += w.lead_a[e] * v[e - b0] + w.lead_b[e] * v[e - b0 + 1];
    const std::size_t last = b1 - 1;
    out.values[i] = (1.0 - lambda * (acc + w.lead_a[last] * v[last - b0])) / (1.0 + lambda * w.lead_b[last]);
  }
  return out;
}

fraccalc::RealSignal resolvent_scalar(const ResolventRequest& req) {
  check_lambda(req.lambda);
  return resolvent_from_weights(resolvent_weights(req.kernel, req.T, req.dt), req.lambda);
}

std::vector<fraccalc::RealSignal> resolvent_batch(const kernels::Kernel& k, std::span<const double> lambdas, double T,
                                                  double dt, unsigned threads) {
  for (double l : lambdas) check_lambda(l);
  const ResolventWeights w = resolvent_weights(k, T, dt);
  std::vector<fraccalc::RealSignal> out(lambdas.size());
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(1, lambdas.size())));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < lambdas.size(); i = next++) {
      try {
        out[i] = resolvent_from_weights(w, lambdas[i]);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  std::vector<std::jthread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  pool.clear();
  if (failure) std::rethrow_exception(failure);
  return out;
}

BoundReport bound_check_signal(const kernels::Kernel& k, double lambda, const fraccalc::RealSignal& s, double tol) {
  if (!k.cp_flag) {
    throw InputError(reason::kPrecondition, "resolvent_bound_check: kernel " + kernels::describe(k) + " is not flagged completely positive");
  }
  BoundReport rep;
  rep.max_violation = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double t = s.time(i);
    const double bound = 1.0 / (1.0 + lambda * kernels::cumulative_integral(k, t));
    const double d = s.values[i] - bound;
    if (d > rep.max_violation) {
      rep.max_violation = d;
      rep.worst_t = t;
    }
  }
  rep.pass = rep.max_violation <= tol;
  return rep;
}

BoundReport resolvent_bound_check(const ResolventRequest& req, double tol) {
  if (!req.kernel.cp_flag) {
    throw InputError(reason::kPrecondition,
                     "resolvent_bound_check: kernel " + kernels::describe(req.kernel) + " is not flagged completely positive");
  }
  return bound_check_signal(req.kernel, req.lambda, resolvent_scalar(req), tol);
}

}  // namespace evo::resolvent
