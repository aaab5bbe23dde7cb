#include <cmath>
#include <numbers>
#include <sstream>

#include "cli_common.hpp"
#include "evoscalar/error.hpp"
#include "evoscalar/fraccalc.hpp"
#include "evoscalar/resolvent.hpp"
#include "evoscalar/specfun.hpp"

namespace evo::cli::detail {

namespace {

const char* route_name(specfun::MLRoute r) {
  switch (r) {
    case specfun::MLRoute::Origin:
      return "origin";
    case specfun::MLRoute::Taylor:
      return "taylor";
    case specfun::MLRoute::Asymptotic:
      return "asymptotic";
    case specfun::MLRoute::Contour:
      return "contour";
    case specfun::MLRoute::ExtendedTaylor:
      return "extended-taylor";
  }
  return "unknown";
}

fraccalc::RealSignal grid_signal(double T, double dt, const std::function<double(double)>& f) {
  if (!(dt > 0.0) || !(T >= dt)) throw InputError(reason::kParameter, "need 0 < dt <= T");
  const auto n = static_cast<std::size_t>(std::llround(T / dt));
  fraccalc::RealSignal s{0.0, dt, {}};
  for (std::size_t i = 0; i <= n; ++i) s.values.push_back(f(dt * static_cast<double>(i)));
  return s;
}

}  // namespace

Command ml_command() {
  Command c;
  c.name = "ml";
  c.help = "Evaluate the two-parameter Mittag-Leffler function E_{alpha,delta}(z)";
  c.options = {{"alpha", "", "alpha > 0"},
               {"delta", "1", "delta (real)"},
               {"z", "", "real part of the argument"},
               {"zi", "0", "imaginary part of the argument"}};
  c.execute = [](const Params& p) {
    const specfun::MLParams mp{p.num("alpha"), p.num("delta")};
    const specfun::cplx z(p.num("z"), p.num("zi"));
    const auto d = specfun::mittag_leffler_detail(mp, z);
    const specfun::cplx v = z.imag() == 0.0 ? specfun::cplx(specfun::mittag_leffler(mp, z.real())) : d.value;
    Outcome o;
    o.summary = v.imag() == 0.0 ? fmt(v.real()) : fmt(v.real()) + (v.imag() < 0 ? " - " : " + ") +
                                                      fmt(std::fabs(v.imag())) + "i";
    o.csv = "alpha,delta,z_re,z_im,value_re,value_im,error_estimate,route\n" + csv_num(mp.alpha) + "," +
            csv_num(mp.delta) + "," + csv_num(z.real()) + "," + csv_num(z.imag()) + "," + fmt(v.real()) + "," +
            fmt(v.imag()) + "," + csv_num(d.error_estimate) + "," + route_name(d.route) + "\n";
    o.details = {{"value_re", v.real()}, {"value_im", v.imag()}, {"error_estimate", d.error_estimate},
                 {"route", route_name(d.route)}};
    return o;
  };
  c.selftest = [] {
    using specfun::mittag_leffler;
    std::vector<Check> out = {approx("gamma(1) = 1", specfun::gamma(1.0), 1.0, 1e-14),
                              approx("gamma(5) = 24", specfun::gamma(5.0), 24.0, 1e-12),
                              approx("gamma(0.5) = sqrt(pi)", specfun::gamma(0.5), std::sqrt(std::numbers::pi), 1e-14),
                              approx("E_{1,1}(1) = e", mittag_leffler({1, 1}, 1.0), std::numbers::e, 1e-13),
                              approx("E_{2,1}(-pi^2) = -1",
                                     mittag_leffler({2, 1}, -std::numbers::pi * std::numbers::pi), -1.0, 1e-10)};
    for (double a : {0.3, 1.0, 1.7}) {
      for (double d : {0.5, 1.0, 2.5}) {
        out.push_back(approx("E_{" + fmt(a, 3) + "," + fmt(d, 3) + "}(0) gamma(delta) = 1",
                             mittag_leffler({a, d}, 0.0) * specfun::gamma(d), 1.0, 1e-12));
      }
    }
    return out;
  };
  return c;
}

Command mlbound_command() {
  Command c;
  c.name = "mlbound";
  c.help = "Empirical sup of (1+t)|E_{alpha,delta}(-t)| on a log grid over [0, t-max]";
  c.options = {{"alpha", "", "alpha in (0,2)"},
               {"delta", "1", "delta"},
               {"t-max", "1e4", "grid end"},
               {"samples", "10000", "grid size"}};
  c.execute = [](const Params& p) {
    const specfun::MLParams mp{p.num("alpha"), p.num("delta")};
    const double tmax = p.num("t-max");
    const int n = p.integer("samples");
    const double C = specfun::ml_bound_constant(mp, tmax, n);
    std::ostringstream csv;
    csv << "t,weighted_abs\n";
    for (double t : specfun::bound_grid(tmax, n)) {
      csv << csv_num(t) << "," << csv_num((1.0 + t) * std::fabs(specfun::mittag_leffler(mp, -t))) << "\n";
    }
    Outcome o;
    o.summary = "C = " + fmt(C);
    o.csv = csv.str();
    o.details = {{"bound_constant", C}};
    return o;
  };
  c.selftest = [] {
    return std::vector<Check>{
        approx("alpha=1: sup (1+t)e^{-t} = 1", specfun::ml_bound_constant({1, 1}, 1e4, 10000), 1.0, 1e-12)};
  };
  return c;
}

Command fracderiv_command() {
  Command c;
  c.name = "fracderiv";
  c.help = "Caputo derivative or Riemann-Liouville integral of t^a or e^{a t} against the closed form";
  c.options = {{"op", "caputo", "caputo | rl"},
               {"beta", "", "order"},
               {"f", "power", "power (t^a, a = 0 means 1) | exp (e^{a t})"},
               {"a", "1", "exponent or rate"},
               {"T", "1", "final time"},
               {"dt", "1e-3", "step"}};
  c.execute = [](const Params& p) {
    const std::string op = p.str("op"), fn = p.str("f");
    const double beta = p.num("beta"), a = p.num("a"), T = p.num("T"), dt = p.num("dt");
    if (fn != "power" && fn != "exp") throw InputError(reason::kParameter, "f must be power or exp");
    if (fn == "power" && !(a >= 0.0)) throw InputError(reason::kParameter, "power exponent a must be >= 0");
    auto f = [&](double t) { return fn == "exp" ? std::exp(a * t) : (a == 0.0 ? 1.0 : std::pow(t, a)); };
    const auto sig = grid_signal(T, dt, f);
    fraccalc::RealSignal res;
    std::function<double(double)> exact;
    if (op == "rl") {
      res = fraccalc::rl_integral(beta, sig);
      if (fn == "power") {
        exact = [=](double t) { return std::tgamma(a + 1) / std::tgamma(a + 1 + beta) * std::pow(t, a + beta); };
      } else {
        exact = [=](double t) { return std::pow(t, beta) * specfun::mittag_leffler({1.0, 1.0 + beta}, a * t); };
      }
    } else if (op == "caputo") {
      const int n = static_cast<int>(std::ceil(beta));
      std::vector<double> init;
      if (fn == "exp") {
        init = {1.0, a};
        exact = [=](double t) {
          return std::pow(a, n) * std::pow(t, n - beta) * specfun::mittag_leffler({1.0, n + 1.0 - beta}, a * t);
        };
      } else {
        if (n == 2 && a > 0.0 && a < 1.0) {
          throw InputError(reason::kParameter, "t^a with 0 < a < 1 has no derivative at 0; need beta < 1");
        }
        init = {a == 0.0 ? 1.0 : 0.0, a == 1.0 ? 1.0 : 0.0};
        const bool poly = a == std::floor(a) && a < n;
        exact = [=](double t) {
          return poly ? 0.0 : std::tgamma(a + 1) / std::tgamma(a + 1 - beta) * std::pow(t, a - beta);
        };
      }
      init.resize(std::max(n, 1));
      res = fraccalc::caputo_derivative(beta, sig, init).signal;
    } else {
      throw InputError(reason::kParameter, "op must be caputo or rl");
    }
    std::ostringstream csv;
    csv << "t,value,exact,abs_error\n";
    double err = 0.0;
    for (std::size_t i = 0; i < res.size(); ++i) {
      const double t = res.time(i), ex = t > 0.0 ? exact(t) : NAN;
      const double e = std::fabs(res.values[i] - ex);
      if (t >= 0.1 * T && std::isfinite(e)) err = std::max(err, e);
      csv << csv_num(t) << "," << csv_num(res.values[i]) << "," << csv_num(ex) << "," << csv_num(e) << "\n";
    }
    Outcome o;
    o.summary = op + " order " + fmt(beta, 6) + ": max abs error on [T/10, T] = " + fmt(err, 6);
    o.csv = csv.str();
    o.details = {{"max_abs_error", err}, {"final_value", res.values.back()}};
    return o;
  };
  c.selftest = [] {
    const auto one = grid_signal(1.0, 1e-3, [](double) { return 1.0; });
    const auto I = fraccalc::rl_integral(1.0, one);
    double e1 = 0.0;
    for (std::size_t i = 0; i < I.size(); ++i) e1 = std::max(e1, std::fabs(I.values[i] - I.time(i)));
    const auto c3 = grid_signal(1.0, 1e-3, [](double) { return 3.0; });
    double e2 = 0.0;
    for (double b : {0.3, 0.7, 1.5}) {
      std::vector<double> init = {3.0, 0.0};
      init.resize(b < 1 ? 1 : 2);
      for (double v : fraccalc::caputo_derivative(b, c3, init).signal.values) e2 = std::max(e2, std::fabs(v));
    }
    return std::vector<Check>{approx("rl_integral(1, 1) = t", e1, 0.0, 1e-10),
                              approx("caputo derivative of a constant = 0", e2, 0.0, 1e-10)};
  };
  return c;
}

Command sonine_command() {
  Command c;
  c.name = "sonine";
  c.help = "Solve for the Sonine partner K of a kernel k ((k*K)(t) = 1) and verify it";
  c.options = merge(kernel_options(), {{"T", "2", "final time"}, {"dt", "1e-3", "step"}, {"tol", "1e-4", "tolerance"}});
  c.execute = [](const Params& p) {
    const auto k = build_kernel(p);
    const double T = p.num("T"), dt = p.num("dt"), tol = p.num("tol");
    const auto K = kernels::sonine_solve(k, T, dt);
    const auto rep = kernels::sonine_verify({k, K, -1.0}, T, dt, tol);
    std::optional<kernels::Kernel> analytic;
    if (std::holds_alternative<kernels::CaputoDual>(k.kind)) analytic = kernels::make_power_law(p.num("beta"));
    if (std::holds_alternative<kernels::PowerLaw>(k.kind) && p.num("beta") < 1.0) {
      analytic = kernels::make_caputo_dual(p.num("beta"));
    }
    std::ostringstream csv;
    csv << "t,k,K\n";
    double rel = 0.0;
    const auto n = static_cast<std::size_t>(std::llround(T / dt));
    for (std::size_t i = 1; i <= n; ++i) {
      const double t = dt * static_cast<double>(i), Kt = kernels::kernel_eval(K, t);
      csv << csv_num(t) << "," << csv_num(kernels::kernel_eval(k, t)) << "," << csv_num(Kt) << "\n";
      if (analytic && t >= 0.1 * T) {
        const double ex = kernels::kernel_eval(*analytic, t);
        rel = std::max(rel, std::fabs(Kt - ex) / std::fabs(ex));
      }
    }
    Outcome o;
    o.summary = kernels::describe(k) + ": max |(k*K) - 1| = " + fmt(rep.max_deviation, 6) + " at t = " +
                fmt(rep.worst_t, 6) + (rep.pass ? ", pass" : ", fail");
    if (analytic) o.summary += ", analytic partner rel. error " + fmt(rel, 6);
    o.csv = csv.str();
    o.details = {{"max_deviation", rep.max_deviation}, {"worst_t", rep.worst_t}, {"pass", rep.pass}};
    if (analytic) o.details["analytic_partner_rel_error"] = rel;
    if (!rep.pass) {
      o.exit_code = 2;
      o.failure = "Sonine residual " + fmt(rep.max_deviation, 6) + " exceeds tol " + fmt(tol, 6);
    }
    return o;
  };
  c.selftest = [] {
    const auto rep = kernels::sonine_verify({kernels::make_constant(1.0), kernels::make_constant(1.0), -1.0}, 2.0,
                                            1e-3, 1e-4);
    bool threw = false;
    try {
      kernels::sonine_solve(kernels::make_constant(1.0), 1.0, 1e-3);
    } catch (const std::exception&) {
      threw = true;
    }
    return std::vector<Check>{{"k = K = 1 fails the Sonine check", !rep.pass},
                              approx("k = K = 1 deviation = sup |t - 1|", rep.max_deviation, 1.0, 1e-9),
                              {"partner of k = 1 is rejected", threw}};
  };
  return c;
}

Command resolvent_command() {
  Command c;
  c.name = "resolvent";
  c.help = "Scalar resolvent s(t; lambda) of s + lambda (k * s) = 1 with the bound 1/(1 + lambda int_0^t k)";
  c.options = merge(kernel_options(), {{"lambda", "", "lambda >= 0"}, {"T", "5", "final time"}, {"dt", "1e-3", "step"}});
  c.execute = [](const Params& p) {
    const auto k = build_kernel(p);
    const double lambda = p.num("lambda");
    const auto s = resolvent::resolvent_scalar({k, lambda, p.num("T"), p.num("dt")});
    const auto rep = resolvent::bound_check_signal(k, lambda, s);
    std::ostringstream csv;
    csv << "t,s,bound\n";
    for (std::size_t i = 0; i < s.size(); ++i) {
      const double t = s.time(i);
      csv << csv_num(t) << "," << csv_num(s.values[i]) << ","
          << csv_num(1.0 / (1.0 + lambda * kernels::cumulative_integral(k, t))) << "\n";
    }
    Outcome o;
    o.summary = "s(T) = " + fmt(s.values.back(), 10) + ", max(s - bound) = " + fmt(rep.max_violation, 6) +
                (rep.pass ? " (bound holds)" : " (bound violated)");
    o.csv = csv.str();
    o.details = {{"s_T", s.values.back()}, {"max_violation", rep.max_violation}, {"bound_holds", rep.pass}};
    return o;
  };
  c.selftest = [] {
    const auto s0 = resolvent::resolvent_scalar({kernels::make_power_law(0.5), 0.0, 1.0, 1e-3});
    double e = 0.0;
    for (double v : s0.values) e = std::max(e, std::fabs(v - 1.0));
    const auto b1 = resolvent::resolvent_bound_check({kernels::make_constant(1.0), 2.0, 5.0, 1e-3});
    const auto b2 = resolvent::resolvent_bound_check({kernels::make_power_law(0.5), 0.0, 5.0, 1e-3});
    return std::vector<Check>{approx("lambda = 0 gives s = 1", e, 0.0, 1e-14),
                              {"k = 1, lambda = 2: e^{-2t} <= 1/(1+2t)", b1.pass},
                              {"lambda = 0: 1 <= 1", b2.pass}};
  };
  return c;
}

}  // namespace evo::cli::detail
