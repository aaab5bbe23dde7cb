#include <cmath>
#include <map>
#include <sstream>

#include "evoscalar/error.hpp"
#include "evoscalar/evolve.hpp"

namespace evo::evolve {

namespace {

using Coeffs = std::vector<std::vector<cplx>>;
using Fields = std::vector<FieldOnTorus>;

constexpr double kOverflow = 1e150;

void require(bool ok, const std::string& msg) {
  if (!ok) throw InputError(reason::kParameter, msg);
}

Coeffs apply_duhamel(const std::vector<const DuhamelWeights*>& w, const Coeffs& f) {
  const std::size_t steps = f.size() - 1;
  Coeffs out(f.size(), std::vector<cplx>(w.size()));
  for (std::size_t j = 0; j < w.size(); ++j) {
    const DuhamelWeights& dw = *w[j];
    for (std::size_t n = 1; n <= steps; ++n) {
      cplx acc = dw.tail[n] * f[0][j];
      for (std::size_t d = 0; d < n; ++d) acc += dw.w[d] * f[n - d][j];
      out[n][j] = acc;
    }
  }
  return out;
}

Fields to_fields(int n, int N, const Coeffs& c) {
  Fields out;
  out.reserve(c.size());
  for (const auto& row : c) out.push_back(inverse_fft(n, N, row));
  return out;
}

Coeffs nonlinearity(const Fields& w, double eta, double mu) {
  Coeffs out;
  out.reserve(w.size());
  for (const auto& f : w) {
    FieldOnTorus g = f;
    for (auto& v : g.values) {
      const double a = std::abs(v);
      v = a == 0.0 ? cplx(0.0) : mu * std::pow(a, eta - 1.0) * v;
    }
    out.push_back(forward_fft(g));
  }
  return out;
}

double sup_distance(const Fields& a, const Fields& b, double p0) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    FieldOnTorus d = a[i];
    for (std::size_t k = 0; k < d.values.size(); ++k) d.values[k] -= b[i].values[k];
    s = std::max(s, lp_norm(d, p0));
  }
  return s;
}

Coeffs add(const Coeffs& a, const Coeffs& b) {
  Coeffs out(a);
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < a[i].size(); ++j) out[i][j] += b[i][j];
  }
  return out;
}

}  // namespace

PicardResult picard_solve(const spectra::SpectralModel& m, const PropagatorKind& kind, const FieldOnTorus& w0,
                          const FieldOnTorus* w1, const PicardOptions& opt) {
  validate(kind);
  const double beta = duhamel_beta(kind);
  const auto* torus = std::get_if<spectra::TorusLaplacian>(&m.kind());
  if (!torus) throw InputError(reason::kPrecondition, "picard_solve: model must be a TorusLaplacian");
  validate(w0);
  if (w0.n != torus->n) throw InputError(reason::kDimension, "picard_solve: field dimension differs from the model");
  const bool wave = std::holds_alternative<WaveType>(kind);
  if (w1) {
    require(wave, "picard_solve: w1 is only used by the wave type");
    validate(*w1);
    if (w1->n != w0.n || w1->N != w0.N) throw InputError(reason::kGridMismatch, "picard_solve: w0 and w1 grids differ");
  }
  require(opt.eta > 1.0 && std::isfinite(opt.eta), "picard_solve: eta must be > 1");
  require(opt.mu == 1.0 || opt.mu == -1.0, "picard_solve: mu must be +1 or -1");
  require(opt.T > 0.0 && opt.dt > 0.0 && opt.dt <= opt.T, "picard_solve: need 0 < dt <= T");
  require(opt.tol > 0.0, "picard_solve: tol must be > 0");
  require(opt.max_iter >= 1, "picard_solve: max_iter must be >= 1");
  require(opt.p0 >= 1.0, "picard_solve: p0 must be >= 1");

  const std::size_t steps = static_cast<std::size_t>(std::llround(opt.T / opt.dt));
  require(steps >= 1, "picard_solve: T must cover at least one step");
  const int n = w0.n, N = w0.N;
  PicardResult res;
  for (std::size_t i = 0; i <= steps; ++i) res.times.push_back(opt.dt * static_cast<double>(i));

  const auto ev = fft_eigenvalues(n, N);
  const auto c0 = forward_fft(w0);
  const std::vector<cplx> c1 = w1 ? forward_fft(*w1) : std::vector<cplx>();

  // Per distinct eigenvalue: propagator values and Duhamel weights.
  Propagator prop(kind, opt.T, opt.dt);
  std::map<double, std::vector<std::pair<cplx, cplx>>> phi;
  std::map<double, DuhamelWeights> weights;
  for (double l : ev) {
    if (phi.count(l)) continue;
    auto& row = phi[l];
    for (double t : res.times) row.push_back(wave ? prop.wave_pair(t, l) : std::pair<cplx, cplx>{prop.value(t, l), 0.0});
    weights.emplace(l, duhamel_weights(beta, l, opt.dt, steps));
  }
  std::vector<const DuhamelWeights*> wmode;
  for (double l : ev) wmode.push_back(&weights.at(l));

  Coeffs linear(steps + 1, std::vector<cplx>(ev.size()));
  for (std::size_t i = 0; i <= steps; ++i) {
    for (std::size_t j = 0; j < ev.size(); ++j) {
      const auto& [e0, e1] = phi.at(ev[j])[i];
      linear[i][j] = e0 * c0[j] + (c1.empty() ? cplx(0.0) : e1 * c1[j]);
    }
  }

  Coeffs cur = linear;
  Fields cur_fields = to_fields(n, N, cur);
  int above_one = 0;
  bool converged = false;
  for (int it = 1; it <= opt.max_iter; ++it) {
    Coeffs next = add(linear, apply_duhamel(wmode, nonlinearity(cur_fields, opt.eta, opt.mu)));
    Fields next_fields = to_fields(n, N, next);
    const double inc = sup_distance(next_fields, cur_fields, opt.p0);
    res.iterations = it;
    if (!std::isfinite(inc) || inc > kOverflow) {
      throw NumericalError(reason::kDivergence, "picard_solve: iterate norms overflow after " + std::to_string(it) + " iterations");
    }
    if (!res.increments.empty()) {
      const double prev = res.increments.back();
      const double ratio = prev > 0.0 ? inc / prev : 0.0;
      res.contraction_ratios.push_back(ratio);
      above_one = ratio > 1.0 ? above_one + 1 : 0;
      if (above_one >= 3) {
        std::ostringstream os;
        os << "picard_solve: contraction ratio above 1 for 3 consecutive iterations (last " << ratio << ", increment "
           << inc << ")";
        throw NumericalError(reason::kDivergence, os.str());
      }
    }
    res.increments.push_back(inc);
    cur = std::move(next);
    cur_fields = std::move(next_fields);
    if (inc < opt.tol) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    std::ostringstream os;
    os << "picard_solve: no convergence in " << opt.max_iter << " iterations (last increment " << res.increments.back() << ")";
    throw NumericalError(reason::kConvergence, os.str());
  }
  Fields check = to_fields(n, N, add(linear, apply_duhamel(wmode, nonlinearity(cur_fields, opt.eta, opt.mu))));
  res.residual = sup_distance(check, cur_fields, opt.p0);
  res.trajectory = std::move(cur_fields);
  return res;
}

}  // namespace evo::evolve
