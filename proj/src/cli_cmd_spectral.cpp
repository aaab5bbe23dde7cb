#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

#include "cli_common.hpp"
#include "evoscalar/admiss.hpp"
#include "evoscalar/error.hpp"

namespace evo::cli::detail {

namespace {

evolve::FieldOnTorus read_field_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError(reason::kFormat, "cannot open field file " + path);
  return evolve::read_field(in);
}

std::size_t field_size(int n, int N) {
  if (n < 1 || n > 3) throw InputError(reason::kDimension, "torus dimension must be 1, 2 or 3");
  if (N < 4 || N % 2 != 0) throw InputError(reason::kParameter, "N must be even and >= 4");
  return static_cast<std::size_t>(std::pow(N, n));
}

evolve::FieldOnTorus white_noise(int n, int N, std::uint64_t seed) {
  evolve::FieldOnTorus f{n, N, std::vector<evolve::cplx>(field_size(n, N))};
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  double mean = 0.0;
  for (auto& v : f.values) {
    v = g(rng);
    mean += v.real();
  }
  mean /= static_cast<double>(f.values.size());
  for (auto& v : f.values) v -= mean;
  return f;
}

admiss::TripleKind triple_kind(const Params& p) {
  const std::string k = p.str("kind");
  if (k == "heat") return {admiss::Family::Heat, 1.0};
  if (k == "heat-type") return {admiss::Family::HeatType, p.num("beta")};
  if (k == "wave-type") return {admiss::Family::WaveType, p.num("beta")};
  throw InputError(reason::kParameter, "kind must be heat, heat-type or wave-type");
}

}  // namespace

Command catalog_command() {
  Command c;
  c.name = "catalog";
  c.help = "Trace exponent of a catalog operator (lists the catalog when --operator is absent)";
  c.options = {{"operator", "", "catalog entry"}, {"n", "", "dimension parameter"}, {"Q", "", "homogeneous dimension"},
               {"nu", "", "Rockland order"},      {"Qstar", "", "local dimension"}, {"m", "", "subcoercive order"},
               {"mu", "", "Vladimirov order"}};
  c.execute = [](const Params& p) {
    Outcome o;
    if (!p.has("operator")) {
      std::string csv = "operator\n";
      for (const auto& n : spectra::catalog_names()) csv += n + "\n";
      o.csv = csv;
      o.summary = std::to_string(spectra::catalog_names().size()) + " operators";
      o.details = {{"operators", spectra::catalog_names()}};
      return o;
    }
    std::map<std::string, double> params;
    for (const char* key : {"n", "Q", "nu", "Qstar", "m", "mu"}) {
      if (p.has(key)) params[key] = p.num(key);
    }
    const std::string op = p.str("operator");
    const double lambda = spectra::catalog_exponent(op, params);
    o.summary = op + ": lambda = " + fmt(lambda);
    o.csv = "operator,lambda\n" + op + "," + csv_num(lambda) + "\n";
    o.details = {{"operator", op}, {"lambda", lambda}};
    return o;
  };
  c.selftest = [] {
    return std::vector<Check>{
        approx("euclidean_laplacian n=3 -> 1.5", spectra::catalog_exponent("euclidean_laplacian", {{"n", 3}}), 1.5, 0),
        approx("heisenberg_sublaplacian n=2 -> 3", spectra::catalog_exponent("heisenberg_sublaplacian", {{"n", 2}}),
               3.0, 0),
        approx("cartan_D2 -> 4.5", spectra::catalog_exponent("cartan_D2", {}), 4.5, 0)};
  };
  return c;
}

Command countfit_command() {
  Command c;
  c.name = "countfit";
  c.help = "Counting function N(s) of a spectral model and the fitted trace exponent on [s-min, s-max]";
  c.options = merge(model_options(), {{"s-min", "", "window start"}, {"s-max", "", "window end"}, {"points", "40", "fit points"}});
  c.execute = [](const Params& p) {
    const auto m = build_model(p);
    const double a = p.num("s-min"), b = p.num("s-max");
    const int n = p.integer("points");
    const auto fit = spectra::fit_trace_exponent(m, a, b, n);
    std::ostringstream csv;
    csv << "s,N\n";
    for (int i = 0; i < n; ++i) {
      const double s = a * std::pow(b / a, static_cast<double>(i) / (n - 1));
      csv << csv_num(s) << "," << csv_num(spectra::counting_function(m, s)) << "\n";
    }
    Outcome o;
    o.summary = spectra::describe(m) + ": lambda_hat = " + fmt(fit.lambda_hat, 8) + ", R^2 = " +
                fmt(fit.r_squared, 8) + ", nominal " + fmt(m.nominal_lambda(), 8);
    o.csv = csv.str();
    o.details = {{"lambda_hat", fit.lambda_hat}, {"r_squared", fit.r_squared}, {"nominal_lambda", m.nominal_lambda()}};
    return o;
  };
  c.selftest = [] {
    std::vector<Check> out;
    const spectra::SpectralModel t1(spectra::TorusLaplacian{1});
    out.push_back(approx("torus n=1: N(100) = 18", spectra::counting_function(t1, 100.0), 18.0, 0));
    for (double lambda : {0.5, 1.7}) {
      const spectra::SpectralModel m(spectra::PrescribedExponent{lambda});
      for (double s : {2.5, 17.3}) {
        out.push_back(approx("prescribed(" + fmt(lambda, 3) + "): N(" + fmt(s, 4) + ") = ceil(s^lambda) - 1",
                             spectra::counting_function(m, s), std::ceil(std::pow(s, lambda)) - 1.0, 0));
      }
    }
    return out;
  };
  return c;
}

Command bound_command() {
  Command c;
  c.name = "bound";
  c.help = "Decay bound B(t) = sup_v N(v)^{1/p-1/q} psi(t; v) on a log time grid";
  c.options = merge(merge(kind_options(), model_options()), {{"p", "", "data exponent in (1,2]"},
                                                             {"q", "", "target exponent >= 2"},
                                                             {"t-min", "1e-2", "first time"},
                                                             {"t-max", "1e2", "last time"},
                                                             {"points", "41", "time points"}});
  c.execute = [](const Params& p) {
    const auto m = build_model(p);
    const auto kind = build_kind(p);
    const double pe = p.num("p"), q = p.num("q"), a = p.num("t-min"), b = p.num("t-max");
    const int n = p.integer("points");
    if (!(a > 0.0) || !(b > a) || n < 2) throw InputError(reason::kWindow, "need 0 < t-min < t-max and points >= 2");
    std::vector<double> ts, bs;
    std::ostringstream csv;
    csv << "t,B,v_star\n";
    for (int i = 0; i < n; ++i) {
      const double t = a * std::pow(b / a, static_cast<double>(i) / (n - 1));
      const auto bv = evolve::bound_sup(m, kind, pe, q, t);
      ts.push_back(t);
      bs.push_back(bv.value);
      csv << csv_num(t) << "," << csv_num(bv.value) << "," << csv_num(bv.v_star) << "\n";
    }
    const double slope = loglog_slope(ts, bs);
    Outcome o;
    o.summary = evolve::describe(kind) + ": log-log slope of B = " + fmt(slope, 8);
    o.csv = csv.str();
    o.details = {{"slope", slope}, {"B_first", bs.front()}, {"B_last", bs.back()}};
    return o;
  };
  c.selftest = [] {
    const spectra::SpectralModel t1(spectra::TorusLaplacian{1});
    return std::vector<Check>{approx("p = q = 2 gives B = 1", evolve::bound_function(t1, evolve::Heat{}, 2, 2, 0.3), 1.0, 0),
                              approx("heat at t = 0 is 1", evolve::propagator_value(evolve::Heat{}, 0.0, 7.0).real(),
                                     1.0, 0)};
  };
  return c;
}

Command decay_command() {
  Command c;
  c.name = "decay";
  c.help = "L^p -> L^q decay of the linear solution on the torus against the bound B(t)";
  c.options = merge(kind_options(), {{"dim", "1", "torus dimension"},
                                     {"N", "256", "grid points per dimension"},
                                     {"p", "", "data exponent in (1,2]"},
                                     {"q", "", "target exponent >= 2"},
                                     {"t-a", "", "window start"},
                                     {"t-b", "", "window end"},
                                     {"times", "24", "log-spaced sample times"},
                                     {"w0", "", "initial field file (default: mean-zero white noise)"},
                                     {"seed", "1", "white-noise seed"}});
  c.execute = [](const Params& p) {
    const auto kind = build_kind(p);
    const int n = p.integer("dim");
    const spectra::SpectralModel m(spectra::TorusLaplacian{n});
    const auto w0 = p.has("w0") ? read_field_file(p.str("w0"))
                                : white_noise(n, p.integer("N"), static_cast<std::uint64_t>(p.integer("seed")));
    const auto r = evolve::decay_slope(m, kind, p.num("p"), p.num("q"), w0, p.num("t-a"), p.num("t-b"),
                                       p.integer("times"));
    std::ostringstream csv;
    evolve::write_decay_csv(csv, r);
    Outcome o;
    o.summary = evolve::describe(kind) + ": slope = " + fmt(r.slope, 8) + ", envelope constant = " +
                fmt(r.envelope_constant, 8) + (r.pre_gap ? "" : " (window extends past the spectral gap time)");
    o.csv = csv.str();
    o.details = {{"slope", r.slope}, {"envelope_constant", r.envelope_constant}, {"gap_time", r.gap_time},
                 {"pre_gap", r.pre_gap}};
    return o;
  };
  c.selftest = [] {
    const spectra::SpectralModel t1(spectra::TorusLaplacian{1});
    evolve::FieldOnTorus f{1, 16, {}};
    for (int i = 0; i < 16; ++i) f.values.push_back(std::polar(1.0, 2.0 * std::numbers::pi * i / 16.0));
    const double t = 0.7;
    const auto r = evolve::decay_slope(t1, evolve::Heat{}, 2.0, 2.0, f, t, 2 * t, 3);
    const evolve::FieldOnTorus cst{1, 8, std::vector<evolve::cplx>(8, evolve::cplx(-2.5))};
    return std::vector<Check>{approx("single mode heat decay ratio = e^{-t}", r.rows.front().ratio, std::exp(-t), 1e-12),
                              approx("single mode heat slope = -(t_b - t_a)/log(t_b/t_a)", r.slope, -t / std::log(2.0), 1e-9),
                              approx("constant field norm = |c|", evolve::lp_norm(cst, 3.0), 2.5, 1e-14),
                              approx("e^{ix} has L2 norm 1", evolve::lp_norm(f, 2.0), 1.0, 1e-14)};
  };
  return c;
}

Command region_command() {
  Command c;
  c.name = "region";
  c.help = "Scan admissible (1/q, 1/r) for data exponent p0; optional subcritical construction with --eta";
  c.options = {{"kind", "", "heat | heat-type | wave-type"},
               {"beta", "", "order for heat-type / wave-type"},
               {"p0", "", "data exponent in (1,2]"},
               {"lambda", "", "trace exponent"},
               {"resolution", "100", "grid points per axis"},
               {"eta", "", "nonlinearity exponent for the subcritical construction"}};
  c.execute = [](const Params& p) {
    const auto kind = triple_kind(p);
    const double p0 = p.num("p0"), lambda = p.num("lambda");
    const auto reg = admiss::region_sample(p0, lambda, kind, p.integer("resolution"));
    std::ostringstream csv;
    admiss::write_region_csv(csv, reg);
    Outcome o;
    o.summary = reg.empty ? "empty"
                          : "nonempty: " + std::to_string(reg.admissible_count) + "/" +
                                std::to_string(reg.points.size()) + " admissible";
    if (reg.scan_empty != reg.analytic_empty) o.summary += " (scan and analytic test disagree)";
    o.details = {{"empty", reg.empty},
                 {"scan_empty", reg.scan_empty},
                 {"analytic_empty", reg.analytic_empty},
                 {"admissible", reg.admissible_count},
                 {"points", reg.points.size()}};
    if (p.has("eta")) {
      const auto s = admiss::subcritical_construct(p0, lambda, p.num("eta"), kind);
      o.summary += "; construct rho = " + fmt(s.rho, 8) + ", r = " + fmt(s.r, 8) + ", q = " + fmt(s.q, 8);
      o.details["construct"] = {{"rho", s.rho}, {"r", s.r}, {"q", s.q}, {"rho_lo", s.rho_lo}, {"rho_hi", s.rho_hi}};
    }
    o.csv = csv.str();
    return o;
  };
  c.selftest = [] {
    const admiss::TripleKind heat{admiss::Family::Heat, 1.0};
    return std::vector<Check>{{"heat, lambda=2, (2,4,2) is not admissible", !admiss::is_admissible({2, 4, 2, heat}, 2.0)},
                              {"heat, lambda=2, (1,2,2) is admissible", admiss::is_admissible({1, 2, 2, heat}, 2.0)}};
  };
  return c;
}

Command picard_command() {
  Command c;
  c.name = "picard";
  c.help = "Picard iteration for w = S(t)w0 + mu (k * S)(|w|^{eta-1} w) on the torus";
  c.options = {{"kind", "", "heat | heat-type | wave-type"},
               {"beta", "", "order for heat-type / wave-type"},
               {"dim", "1", "torus dimension"},
               {"N", "128", "grid points per dimension"},
               {"eta", "3", "nonlinearity exponent > 1"},
               {"mu", "1", "sign of the nonlinearity (+1 or -1)"},
               {"T", "0.5", "final time"},
               {"dt", "1e-3", "step"},
               {"tol", "1e-10", "increment tolerance"},
               {"max-iter", "50", "iteration cap"},
               {"p0", "2", "norm exponent for increments"},
               {"norm-w0", "", "rescale w0 to this L2 norm (default 1e-2 for built-in data)"},
               {"w0", "", "initial field file (default sin x + cos(2x)/2)"},
               {"w1", "", "initial velocity file (wave type)"}};
  c.execute = [](const Params& p) {
    const std::string k = p.str("kind");
    evolve::PropagatorKind kind;
    if (k == "heat") {
      kind = evolve::Heat{};
    } else if (k == "heat-type") {
      kind = evolve::HeatType{p.num("beta")};
    } else if (k == "wave-type") {
      kind = evolve::WaveType{p.num("beta")};
    } else {
      throw InputError(reason::kParameter, "picard kind must be heat, heat-type or wave-type");
    }
    const int n = p.integer("dim");
    evolve::FieldOnTorus w0;
    if (p.has("w0")) {
      w0 = read_field_file(p.str("w0"));
    } else {
      const int N = p.integer("N");
      w0 = {n, N, std::vector<evolve::cplx>(field_size(n, N))};
      for (std::size_t i = 0; i < w0.values.size(); ++i) {
        const double x = 2.0 * std::numbers::pi * static_cast<double>(i % N) / N;
        w0.values[i] = std::sin(x) + 0.5 * std::cos(2.0 * x);
      }
    }
    if (p.has("norm-w0") || !p.has("w0")) {
      const double target = p.has("norm-w0") ? p.num("norm-w0") : 1e-2;
      if (!(target >= 0.0) || !std::isfinite(target)) throw InputError(reason::kParameter, "norm-w0 must be >= 0");
      const double cur = evolve::lp_norm(w0, 2.0);
      if (cur == 0.0 && target > 0.0) throw InputError(reason::kParameter, "cannot rescale a zero field");
      for (auto& v : w0.values) v *= cur == 0.0 ? 0.0 : target / cur;
    }
    std::optional<evolve::FieldOnTorus> w1;
    if (p.has("w1")) w1 = read_field_file(p.str("w1"));
    evolve::PicardOptions opt{p.num("eta"), p.num("mu"), p.num("T"),        p.num("dt"),
                              p.num("tol"), p.integer("max-iter"), p.num("p0")};
    const spectra::SpectralModel m(spectra::TorusLaplacian{n});
    const auto r = evolve::picard_solve(m, kind, w0, w1 ? &*w1 : nullptr, opt);
    std::ostringstream csv;
    csv << "iteration,increment,contraction_ratio\n";
    double worst = 0.0;
    for (std::size_t i = 0; i < r.increments.size(); ++i) {
      csv << i + 1 << "," << csv_num(r.increments[i]) << ",";
      if (i > 0) {
        csv << csv_num(r.contraction_ratios[i - 1]);
        worst = std::max(worst, r.contraction_ratios[i - 1]);
      }
      csv << "\n";
    }
    Outcome o;
    o.summary = "converged in " + std::to_string(r.iterations) + " iterations, residual = " + fmt(r.residual, 6) +
                ", max contraction ratio = " + fmt(worst, 6);
    o.csv = csv.str();
    o.details = {{"iterations", r.iterations}, {"residual", r.residual}, {"max_contraction_ratio", worst},
                 {"final_norm", evolve::lp_norm(r.trajectory.back(), opt.p0)}};
    return o;
  };
  c.selftest = [] {
    const spectra::SpectralModel m(spectra::TorusLaplacian{1});
    const evolve::FieldOnTorus zero{1, 16, std::vector<evolve::cplx>(16)};
    std::vector<Check> out;
    for (double mu : {1.0, -1.0}) {
      evolve::PicardOptions opt;
      opt.mu = mu;
      opt.T = 0.1;
      opt.dt = 1e-2;
      const auto r = evolve::picard_solve(m, evolve::Heat{}, zero, nullptr, opt);
      out.push_back({"zero data, mu = " + fmt(mu, 2) + ": zero solution in 1 iteration",
                     r.iterations == 1 && evolve::lp_norm(r.trajectory.back(), 2.0) == 0.0});
    }
    return out;
  };
  return c;
}

}  // namespace evo::cli::detail
