#pragma once

#include <span>
#include <string>
#include <vector>

#include "evoscalar/cli.hpp"
#include "evoscalar/evolve.hpp"
#include "evoscalar/kernels.hpp"
#include "evoscalar/spectra.hpp"

namespace evo::cli::detail {

std::string fmt(double x, int digits = 15);
std::string csv_num(double x);

// Appends options, skipping names already present.
std::vector<OptionDef> merge(std::vector<OptionDef> a, const std::vector<OptionDef>& b);

std::vector<OptionDef> kernel_options();
kernels::Kernel build_kernel(const Params& p);

std::vector<OptionDef> kind_options();
evolve::PropagatorKind build_kind(const Params& p);

std::vector<OptionDef> model_options();
spectra::SpectralModel build_model(const Params& p);

// Least-squares slope of log y against log x.
double loglog_slope(std::span<const double> x, std::span<const double> y);

Check approx(const std::string& name, double got, double want, double tol);

Command ml_command();
Command mlbound_command();
Command fracderiv_command();
Command sonine_command();
Command resolvent_command();
Command catalog_command();
Command countfit_command();
Command bound_command();
Command decay_command();
Command region_command();
Command picard_command();

}  // namespace evo::cli::detail
