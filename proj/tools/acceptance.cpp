// Acceptance harness: one PASS/FAIL line per criterion; exit 0 iff all pass.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "evoscalar/admiss.hpp"
#include "evoscalar/cli.hpp"
#include "evoscalar/evolve.hpp"
#include "evoscalar/kernels.hpp"
#include "evoscalar/resolvent.hpp"
#include "evoscalar/specfun.hpp"
#include "evoscalar/spectra.hpp"

namespace {

using evo::specfun::mittag_leffler;
namespace ev = evo::evolve;
namespace ad = evo::admiss;
namespace kr = evo::kernels;
namespace sp = evo::spectra;

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string g(double x, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return buf;
}

double slope(const std::vector<double>& x, const std::vector<double>& y) {
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= x.size();
  my /= y.size();
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  return sxy / sxx;
}

Verdict ml_identities() {
  double e1 = 0, e2 = 0, e3 = 0;
  for (int i = 0; i <= 4000; ++i) {
    const double x = -20.0 + 40.0 * i / 4000;
    e1 = std::max(e1, std::fabs(mittag_leffler({1, 1}, x) - std::exp(x)) / std::exp(x));
  }
  for (int i = 0; i <= 2000; ++i) {
    const double x = 10.0 * i / 2000;
    e2 = std::max(e2, std::fabs(mittag_leffler({2, 1}, -x * x) - std::cos(x)));
  }
  for (double a : {0.1, 0.3, 0.5, 0.9, 1.0, 1.5, 1.95, 2.5, 4.0}) {
    for (double d : {0.2, 0.5, 1.0, 1.5, 2.0, 3.7, 7.0}) {
      e3 = std::max(e3, std::fabs(mittag_leffler({a, d}, 0.0) * std::tgamma(d) - 1.0));
    }
  }
  return {e1 < 1e-10 && e2 < 1e-10 && e3 < 1e-12,
          "exp rel err " + g(e1) + ", cos abs err " + g(e2) + ", E(0)Gamma(delta) err " + g(e3)};
}

Verdict uniform_bound() {
  bool ok = true;
  std::ostringstream os;
  for (double a : {0.3, 0.5, 0.9, 1.5, 1.95, 1.99}) {
    const double c1 = evo::specfun::ml_bound_constant({a, 1}, 1e4, 10000);
    const double c2 = evo::specfun::ml_bound_constant({a, 1}, 1e4, 100000);
    const double rel = std::fabs(c1 - c2) / c2;
    bool mono = true;
    if (a <= 1.0) {
      double prev = INFINITY;
      for (double t : evo::specfun::bound_grid(1e4, 100000)) {
        const double v = mittag_leffler({a, 1}, -t);
        if (v > prev + 1e-12) mono = false;
        prev = v;
      }
    }
    ok = ok && std::isfinite(c2) && rel <= 0.01 && mono;
    os << "a=" << a << ": C=" << g(c2, 5) << " (refine " << g(rel, 2) << (a <= 1 ? (mono ? ", monotone" : ", NOT monotone") : "")
       << ") ";
  }
  return {ok, os.str()};
}

Verdict resolvent_ml() {
  const double T = 5.0;
  double worst = 0, min_order = INFINITY;
  const std::vector<double> lambdas = {0.1, 1.0, 10.0};
  for (double beta : {0.3, 0.5, 0.8}) {
    const auto k = kr::make_power_law(beta);
    std::vector<std::vector<double>> err(2, std::vector<double>(lambdas.size(), 0.0));
    for (int level = 0; level < 2; ++level) {
      const double dt = level == 0 ? 2e-3 : 1e-3;
      const auto sols = evo::resolvent::resolvent_batch(k, lambdas, T, dt);
      for (std::size_t j = 0; j < lambdas.size(); ++j) {
        for (std::size_t i = 0; i < sols[j].size(); ++i) {
          const double t = sols[j].time(i);
          const double ex = mittag_leffler({beta, 1}, -lambdas[j] * std::pow(t, beta));
          err[level][j] = std::max(err[level][j], std::fabs(sols[j].values[i] - ex));
        }
      }
    }
    for (std::size_t j = 0; j < lambdas.size(); ++j) {
      worst = std::max(worst, err[1][j]);
      min_order = std::min(min_order, std::log2(err[0][j] / err[1][j]));
    }
  }
  return {worst < 1e-3 && min_order >= 0.5, "max err at dt=1e-3 " + g(worst) + ", min order " + g(min_order, 3)};
}

Verdict cp_bound() {
  const std::vector<kr::Kernel> ks = {kr::make_constant(1.0),
                                      kr::make_power_law(0.3),
                                      kr::make_power_law(0.5),
                                      kr::make_power_law(0.8),
                                      kr::make_power_law(1.0),
                                      kr::make_caputo_dual(0.3),
                                      kr::make_caputo_dual(0.7),
                                      kr::make_rayleigh_stokes(0.5, 1.0),
                                      kr::make_rayleigh_stokes(0.3, 4.0),
                                      kr::make_multi_term(0.8, {0.3, 0.5}, {1.0, 0.5})};
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  std::vector<double> lambdas;
  for (int i = 0; i < 20; ++i) lambdas.push_back(100.0 * (1.0 - U(rng)));
  double worst = -INFINITY;
  bool ok = true;
  for (const auto& k : ks) {
    if (!k.cp_flag) return {false, kr::describe(k) + " is not flagged completely positive"};
    const auto sols = evo::resolvent::resolvent_batch(k, lambdas, 5.0, 1e-3);
    for (std::size_t j = 0; j < lambdas.size(); ++j) {
      const auto rep = evo::resolvent::bound_check_signal(k, lambdas[j], sols[j], 1e-6);
      worst = std::max(worst, rep.max_violation);
      ok = ok && rep.pass;
    }
  }
  return {ok, std::to_string(ks.size()) + " kernels x 20 lambdas, max(s - bound) = " + g(worst)};
}

Verdict sonine_roundtrip() {
  double worst = 0;
  bool ok = true;
  for (double b : {0.2, 0.5, 0.8}) {
    const auto rep = kr::sonine_verify({kr::make_caputo_dual(b), kr::make_power_law(b), -1.0}, 2.0, 1e-3, 1e-4);
    worst = std::max(worst, rep.max_deviation);
    ok = ok && rep.pass;
  }
  const auto rs = kr::make_rayleigh_stokes(0.5, 1.0);
  const auto rep = kr::sonine_verify({rs, kr::sonine_solve(rs, 2.0, 1e-3), -1.0}, 2.0, 1e-3, 1e-4);
  return {ok && rep.pass, "analytic pairs max dev " + g(worst) + ", Rayleigh-Stokes partner max dev " + g(rep.max_deviation)};
}

Verdict trace_fits() {
  std::ostringstream os;
  bool ok = true;
  auto check = [&](const std::string& name, const sp::SpectralModel& m, double target, double tol) {
    const auto fit = sp::fit_trace_exponent(m, 1e2, 1e4, 40);
    const double rel = std::fabs(fit.lambda_hat / target - 1.0);
    ok = ok && rel <= tol;
    os << name << " " << g(fit.lambda_hat, 5) << " (target " << target << ") ";
  };
  check("T1", sp::SpectralModel(sp::TorusLaplacian{1}), 0.5, 0.10);
  check("T2", sp::SpectralModel(sp::TorusLaplacian{2}), 1.0, 0.10);
  check("Prescribed", sp::SpectralModel(sp::PrescribedExponent{1.7}, 100000000ULL), 1.7, 0.01);
  check("Geometric", sp::SpectralModel(sp::GeometricSpectrum{2, 0.5}, 1ULL << 40), 2.0, 0.10);
  return {ok, os.str()};
}

Verdict bound_slopes() {
  double worst = 0;
  for (double lambda : {0.5, 1.0, 2.0}) {
    const sp::SpectralModel m(sp::PrescribedExponent{lambda, 1e-4 * std::pow(10.0, -3.0 / lambda)},
                              1000000000000000000ULL);
    for (double beta : {0.5, 1.0}) {
      const ev::GeneralKernel kind{kr::make_power_law(beta)};
      for (auto [p, q] : std::vector<std::pair<double, double>>{{4.0 / 3.0, 4.0}, {2.0, 4.0}, {2.0, 2.0}}) {
        const double a = 1.0 / p - 1.0 / q;
        std::vector<double> x, y;
        for (int i = 0; i <= 40; ++i) {
          const double t = 1e-2 * std::pow(1e4, i / 40.0);
          x.push_back(std::log(t));
          y.push_back(std::log(ev::bound_function(m, kind, p, q, t)));
        }
        const double target = -beta * lambda * a, s = slope(x, y);
        const double dev = target == 0.0 ? std::fabs(s) : std::fabs(s / target - 1.0);
        worst = std::max(worst, dev);
      }
    }
  }
  return {worst <= 0.05, "max relative slope deviation " + g(worst)};
}

ev::FieldOnTorus noise(std::mt19937_64& rng, int N) {
  std::normal_distribution<double> G;
  ev::FieldOnTorus f{1, N, std::vector<ev::cplx>(N)};
  double mean = 0;
  for (auto& v : f.values) {
    v = G(rng);
    mean += v.real() / N;
  }
  for (auto& v : f.values) v -= mean;
  return f;
}

Verdict envelope() {
  const sp::SpectralModel t1(sp::TorusLaplacian{1});
  std::mt19937_64 rng(8);
  std::vector<ev::FieldOnTorus> data;
  for (int i = 0; i < 50; ++i) data.push_back(noise(rng, 256));
  const std::vector<std::pair<double, double>> windows = {{1e-3, 1e-2}, {3e-3, 3e-2}, {1e-2, 1e-1}};
  std::ostringstream os;
  bool ok = true;
  const std::vector<std::pair<std::string, ev::PropagatorKind>> kinds = {{"heat", ev::Heat{}},
                                                                        {"heat-type(0.5)", ev::HeatType{0.5}}};
  for (const auto& [name, kind] : kinds) {
    std::vector<double> C;
    for (auto [a, b] : windows) {
      double c = 0;
      for (const auto& f : data) {
        const auto r = ev::decay_slope(t1, kind, 4.0 / 3.0, 4.0, f, a, b, 12);
        ok = ok && r.pre_gap;
        c = std::max(c, r.envelope_constant);
      }
      C.push_back(c);
    }
    const auto [lo, hi] = std::minmax_element(C.begin(), C.end());
    ok = ok && *hi <= 1.2 * C[0] && *lo >= 0.8 * C[0];
    os << name << " C = " << g(C[0]) << "/" << g(C[1]) << "/" << g(C[2]) << " ";
  }
  return {ok, os.str()};
}

Verdict admissibility() {
  bool ok = true;
  const ad::TripleKind heat{ad::Family::Heat, 1.0};
  int agree = 0;
  for (int i = 0; i < 50; ++i) {
    const double p0 = 1.0 + (i + 0.5) / 50.0;
    const double star = 2.0 * p0 / (2.0 - p0);
    const bool below = !ad::region_sample(p0, 0.98 * star, heat, 60).empty;
    const bool at = ad::region_sample(p0, star, heat, 60).empty;
    const bool above = ad::region_sample(p0, 1.02 * star, heat, 60).empty;
    if (below && at && above) ++agree;
  }
  ok = ok && agree == 50;
  const ad::TripleKind wave{ad::Family::WaveType, 1.5};
  const auto r_hi = ad::region_sample(2.0, 2.0, wave, 80);   // beta lambda = 3 > 1
  const auto r_lo = ad::region_sample(2.0, 0.5, wave, 80);   // beta lambda = 0.75 <= 1
  bool wave_r = true;
  for (const auto* r : {&r_hi, &r_lo}) {
    for (const auto& pt : r->points) wave_r = wave_r && (!pt.admissible || pt.inv_r > 0.5);
  }
  ok = ok && !r_hi.empty && !r_lo.empty && wave_r;
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  int cases = 0, good = 0;
  while (cases < 100) {
    const double p0 = 1.2 + 0.8 * U(rng);
    const ad::TripleKind k = cases % 2 ? heat : ad::TripleKind{ad::Family::HeatType, 0.1 + 0.8 * U(rng)};
    const double lambda = 0.1 + 2.0 * U(rng);
    const double lo = std::max(1.0, 2.0 / p0), hi = 1.0 + p0 / lambda;
    const double lam_eff = k.family == ad::Family::Heat ? lambda : k.beta * lambda;
    if (lo >= hi || (p0 < 2.0 && lam_eff >= 2.0 * p0 / (2.0 - p0))) continue;
    const double eta = lo + (hi - lo) * (0.05 + 0.9 * U(rng));
    ++cases;
    const auto s = ad::subcritical_construct(p0, lambda, eta, k);
    if (ad::is_admissible({s.r, s.q, p0, k}, lambda) && s.rho <= s.r) ++good;
  }
  ok = ok && good == 100;
  return {ok, "threshold agreement " + std::to_string(agree) + "/50, wave regions " +
                  std::to_string(r_hi.admissible_count) + " and " + std::to_string(r_lo.admissible_count) +
                  " points, constructions admissible " + std::to_string(good) + "/100"};
}

Verdict picard() {
  const sp::SpectralModel t1(sp::TorusLaplacian{1});
  ev::FieldOnTorus w0{1, 128, std::vector<ev::cplx>(128)};
  for (int i = 0; i < 128; ++i) {
    const double x = 2.0 * M_PI * i / 128;
    w0.values[i] = std::sin(x) + 0.5 * std::cos(2.0 * x);
  }
  const double s = 1e-2 / ev::lp_norm(w0, 2.0);
  for (auto& v : w0.values) v *= s;
  std::ostringstream os;
  bool ok = true;
  for (double mu : {1.0, -1.0}) {
    ev::PicardOptions opt;
    opt.eta = 3;
    opt.mu = mu;
    const auto r = ev::picard_solve(t1, ev::Heat{}, w0, nullptr, opt);
    const double worst = r.contraction_ratios.empty()
                             ? 0.0
                             : *std::max_element(r.contraction_ratios.begin(), r.contraction_ratios.end());
    ok = ok && r.iterations <= 20 && r.residual < 1e-8 && worst < 0.5;
    os << "heat mu=" << mu << ": " << r.iterations << " it, res " << g(r.residual, 2) << ", ratio " << g(worst, 2)
       << "; ";
  }
  // Heat type: lambda = 1/2 on T^1, p0 = 2, eta = 3; the constructed rho must respect rho >= 1/beta.
  const ad::TripleKind ht{ad::Family::HeatType, 0.5};
  const auto tri = ad::subcritical_construct(2.0, 0.5, 3.0, ht);
  ok = ok && tri.rho >= 2.0 && ad::is_admissible({tri.r, tri.q, 2.0, ht}, 0.5);
  ev::PicardOptions opt;
  const auto r = ev::picard_solve(t1, ev::HeatType{0.5}, w0, nullptr, opt);
  ok = ok && r.residual < 1e-8;
  os << "heat-type(0.5) rho=" << g(tri.rho, 3) << ": " << r.iterations << " it, res " << g(r.residual, 2) << "; ";
  std::ostringstream o, e;
  const int code = evo::cli::run({"picard", "--kind", "heat", "--eta", "3", "--norm-w0", "1e3"}, o, e);
  ok = ok && code == 2 && e.str().find("divergence") != std::string::npos;
  os << "large data exit " << code;
  return {ok, os.str()};
}

Verdict wave_identity() {
  const double dt = 1e-3, T = 3.0;
  const int n = static_cast<int>(std::lround(T / dt));
  double worst = 0;
  for (double beta : {1.2, 1.5, 1.8}) {
    for (double lambda : {1.0, 10.0}) {
      double integral = 0, prev = 1.0;
      for (int i = 1; i <= n; ++i) {
        const double t = i * dt;
        const double cur = mittag_leffler({beta, 1}, -lambda * std::pow(t, beta));
        integral += 0.5 * dt * (prev + cur);
        prev = cur;
        const double lhs = t * mittag_leffler({beta, 2}, -lambda * std::pow(t, beta));
        worst = std::max(worst, std::fabs(lhs - integral));
      }
    }
  }
  return {worst < 10 * dt, "max |t E_{b,2} - int E_b| = " + g(worst) + " (limit " + g(10 * dt) + ")"};
}

struct Criterion {
  int id;
  std::string name;
  double limit_s;
  std::function<Verdict()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> all = {
      {1, "Mittag-Leffler identities", 5, ml_identities},
      {2, "uniform bound stability", 30, uniform_bound},
      {3, "resolvent vs Mittag-Leffler", 60, resolvent_ml},
      {4, "completely positive bound", 60, cp_bound},
      {5, "Sonine round trip", 30, sonine_roundtrip},
      {6, "trace exponent fits", 30, trace_fits},
      {7, "decay bound slopes", 60, bound_slopes},
      {8, "envelope constant on T1", 120, envelope},
      {9, "admissibility geometry", 10, admissibility},
      {10, "Picard well-posedness", 120, picard},
      {11, "wave-type identity", 30, wave_identity},
  };
  int failed = 0;
  for (const auto& c : all) {
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs < c.limit_s;
    const bool pass = v.pass && in_time;
    if (!pass) ++failed;
    std::printf("%s criterion %d (%s): %s [%.2f s, limit %.0f s%s]\n", pass ? "PASS" : "FAIL", c.id, c.name.c_str(),
                v.detail.c_str(), secs, c.limit_s, in_time ? "" : ", TOO SLOW");
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(all.size()) - failed, all.size());
  return failed == 0 ? 0 : 1;
}
