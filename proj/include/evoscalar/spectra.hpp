#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <variant>
#include <vector>

namespace evo::spectra {

// Laplacian on R^n/(2 pi Z)^n: eigenvalues |k|^2, k in Z^n.
struct TorusLaplacian {
  int n = 1;
};

// Eigenvalues unit * j^{1/lambda}, j = 1, 2, ...; N(s) = ceil((s/unit)^lambda) - 1.
struct PrescribedExponent {
  double lambda = 1.0;
  double unit = 1.0;
};

// Eigenvalues rho^{mu j} with multiplicity (rho-1) rho^{j-1}, j = 1, 2, ...
struct GeometricSpectrum {
  int rho = 2;
  double mu = 1.0;
};

struct Level {
  double eigenvalue = 0.0;
  std::uint64_t multiplicity = 1;
};

struct Explicit {
  std::vector<Level> levels;
};

using ModelKind = std::variant<TorusLaplacian, PrescribedExponent, GeometricSpectrum, Explicit>;

inline constexpr std::uint64_t kDefaultTruncation = 1000000;

// Immutable after construction. Enumerated kinds keep their sorted levels
// (the zero level included when present); PrescribedExponent is closed form.
class SpectralModel {
public:
  SpectralModel(ModelKind kind, std::uint64_t truncation = kDefaultTruncation, double nominal_lambda = 0.0);

  const ModelKind& kind() const { return kind_; }
  std::uint64_t truncation() const { return truncation_; }
  double nominal_lambda() const { return nominal_lambda_; }
  // Largest enumerated eigenvalue; counting queries above it are errors.
  double horizon() const { return horizon_; }
  // Empty for PrescribedExponent.
  const std::vector<Level>& levels() const { return levels_; }
  std::uint64_t mode_count() const { return modes_; }

private:
  ModelKind kind_;
  std::uint64_t truncation_;
  double nominal_lambda_;
  double horizon_ = 0.0;
  std::vector<Level> levels_;
  std::vector<double> below_;  // total multiplicity of the positive levels before each level
  std::uint64_t modes_ = 0;

  friend double counting_function(const SpectralModel& m, double s);
};

// Explicit levels from the `eigenvalue,multiplicity` text format.
SpectralModel load_explicit(std::istream& in, double nominal_lambda);
SpectralModel load_explicit_file(const std::string& path, double nominal_lambda);

std::string describe(const SpectralModel& m);

// Total multiplicity of eigenvalues in the open interval (0, s).
double counting_function(const SpectralModel& m, double s);

// operator_name: euclidean_laplacian{n}, compact_sublaplacian{Q},
// heisenberg_sublaplacian{n}, rockland{Q,nu}, engel_D1, cartan_D2,
// subcoercive{Qstar,m}, vladimirov{mu}.
double catalog_exponent(const std::string& operator_name, const std::map<std::string, double>& params);
std::vector<std::string> catalog_names();

struct TraceFit {
  double lambda_hat = 0.0;
  double r_squared = 0.0;
};

// Least-squares slope of log N(s) against log s on log-spaced samples.
TraceFit fit_trace_exponent(const SpectralModel& m, double s_min, double s_max, int n_points);

}  // namespace evo::spectra
