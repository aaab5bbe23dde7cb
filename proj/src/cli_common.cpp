#include "cli_common.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "evoscalar/error.hpp"

namespace evo::cli {

namespace detail {

std::string fmt(double x, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return buf;
}

std::string csv_num(double x) { return fmt(x, 12); }

std::vector<OptionDef> merge(std::vector<OptionDef> a, const std::vector<OptionDef>& b) {
  for (const auto& o : b) {
    if (std::none_of(a.begin(), a.end(), [&](const OptionDef& x) { return x.name == o.name; })) a.push_back(o);
  }
  return a;
}

std::vector<OptionDef> kernel_options() {
  return {{"kernel", "", "constant | power-law | caputo-dual | rayleigh-stokes | multi-term | tabulated"},
          {"beta", "", "kernel or propagator order"},
          {"gamma", "1", "Rayleigh-Stokes coefficient"},
          {"c", "1", "constant kernel value"},
          {"betas", "", "multi-term orders, comma separated"},
          {"sigmas", "", "multi-term weights, comma separated"},
          {"kernel-file", "", "tabulated kernel CSV with header t,k"}};
}

kernels::Kernel build_kernel(const Params& p) {
  const std::string name = p.str("kernel");
  if (name == "constant") return kernels::make_constant(p.num("c"));
  if (name == "power-law") return kernels::make_power_law(p.num("beta"));
  if (name == "caputo-dual") return kernels::make_caputo_dual(p.num("beta"));
  if (name == "rayleigh-stokes") return kernels::make_rayleigh_stokes(p.num("beta"), p.num("gamma"));
  if (name == "multi-term") return kernels::make_multi_term(p.num("beta"), p.list("betas"), p.list("sigmas"));
  if (name == "tabulated") return kernels::load_tabulated_file(p.str("kernel-file"));
  throw InputError(reason::kParameter, "unknown kernel `" + name + "`");
}

std::vector<OptionDef> kind_options() {
  return merge({{"kind", "",
                 "heat | heat-type | wave-type | schrodinger-type | rayleigh-stokes | multi-term | general-kernel"}},
               kernel_options());
}

evolve::PropagatorKind build_kind(const Params& p) {
  const std::string name = p.str("kind");
  evolve::PropagatorKind k;
  if (name == "heat") {
    k = evolve::Heat{};
  } else if (name == "heat-type") {
    k = evolve::HeatType{p.num("beta")};
  } else if (name == "wave-type") {
    k = evolve::WaveType{p.num("beta")};
  } else if (name == "schrodinger-type") {
    k = evolve::SchrodingerType{p.num("beta")};
  } else if (name == "rayleigh-stokes") {
    k = evolve::RayleighStokes{p.num("beta"), p.num("gamma")};
  } else if (name == "multi-term") {
    k = evolve::MultiTerm{p.num("beta"), p.list("betas"), p.list("sigmas")};
  } else if (name == "general-kernel") {
    k = evolve::GeneralKernel{build_kernel(p)};
  } else {
    throw InputError(reason::kParameter, "unknown propagator kind `" + name + "`");
  }
  evolve::validate(k);
  return k;
}

std::vector<OptionDef> model_options() {
  return {{"model", "", "torus | prescribed | geometric | explicit"},
          {"dim", "1", "torus dimension"},
          {"lambda", "", "trace exponent (prescribed model, nominal value for explicit levels)"},
          {"unit", "1", "eigenvalue scale of the prescribed model"},
          {"rho", "", "geometric ratio"},
          {"mu", "", "geometric exponent"},
          {"file", "", "explicit levels CSV"},
          {"truncation", "", "mode count kept by enumerated models"}};
}

spectra::SpectralModel build_model(const Params& p) {
  const std::string name = p.str("model");
  std::uint64_t trunc = spectra::kDefaultTruncation;
  if (p.has("truncation")) {
    const double t = p.num("truncation");
    if (!(t >= 1.0) || t > 1.8e19) throw InputError(reason::kParameter, "truncation must lie in [1, 1.8e19]");
    trunc = static_cast<std::uint64_t>(t);
  }
  if (name == "torus") return spectra::SpectralModel(spectra::TorusLaplacian{p.integer("dim")}, trunc);
  if (name == "prescribed") {
    return spectra::SpectralModel(spectra::PrescribedExponent{p.num("lambda"), p.num("unit")}, trunc);
  }
  if (name == "geometric") return spectra::SpectralModel(spectra::GeometricSpectrum{p.integer("rho"), p.num("mu")}, trunc);
  if (name == "explicit") return spectra::load_explicit_file(p.str("file"), p.num("lambda"));
  throw InputError(reason::kParameter, "unknown model `" + name + "`");
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
  double mx = 0.0, my = 0.0;
  const double n = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]) / n;
    my += std::log(y[i]) / n;
  }
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (std::log(x[i]) - mx) * (std::log(x[i]) - mx);
    sxy += (std::log(x[i]) - mx) * (std::log(y[i]) - my);
  }
  return sxy / sxx;
}

Check approx(const std::string& name, double got, double want, double tol) {
  return {name + " (got " + fmt(got, 10) + ", want " + fmt(want, 10) + ")", std::fabs(got - want) <= tol};
}

}  // namespace detail

const std::vector<Command>& commands() {
  using namespace detail;
  static const std::vector<Command> all = {ml_command(),       mlbound_command(),  fracderiv_command(),
                                           sonine_command(),   resolvent_command(), catalog_command(),
                                           countfit_command(), decay_command(),     bound_command(),
                                           region_command(),   picard_command()};
  return all;
}

}  // namespace evo::cli
