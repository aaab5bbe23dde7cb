#include "evoscalar/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

#include "evoscalar/error.hpp"
#include "evoscalar/textio.hpp"

namespace evo::spectra {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// Largest array of |k|^2 values enumerated for n >= 2.
constexpr std::uint64_t kMaxTorusNorm = 50000000;

std::vector<Level> torus_levels(int n, std::uint64_t truncation) {
  std::vector<Level> out;
  out.push_back({0.0, 1});
  std::uint64_t total = 1;
  if (n == 1) {
    for (std::uint64_t k = 1; total + 2 <= truncation; ++k) {
      out.push_back({static_cast<double>(k) * static_cast<double>(k), 2});
      total += 2;
    }
    return out;
  }
  // r_n(m) = #{k in Z^n : |k|^2 = m} by repeated convolution with the squares.
  const double half = 0.5 * n;
  const double ball = std::pow(std::numbers::pi, half) / std::tgamma(half + 1.0);
  const double est = std::pow(1.5 * static_cast<double>(truncation) / ball, 1.0 / half) + 16.0;
  if (est > static_cast<double>(kMaxTorusNorm)) {
    throw InputError(reason::kParameter, "torus model: truncation too large for dimension " + std::to_string(n));
  }
  const std::size_t M = static_cast<std::size_t>(est);
  std::vector<std::uint64_t> r(M + 1, 0);
  for (std::size_t j = 0; j * j <= M; ++j) r[j * j] = j == 0 ? 1 : 2;
  for (int d = 2; d <= n; ++d) {
    std::vector<std::uint64_t> next(M + 1, 0);
    for (std::size_t m = 0; m <= M; ++m) {
      if (r[m] == 0) continue;
      for (std::size_t j = 0; m + j * j <= M; ++j) next[m + j * j] += r[m] * (j == 0 ? 1 : 2);
    }
    r = std::move(next);
  }
  for (std::size_t m = 1; m <= M; ++m) {
    if (r[m] == 0) continue;
    if (total + r[m] > truncation) break;
    out.push_back({static_cast<double>(m), r[m]});
    total += r[m];
  }
  return out;
}

std::vector<Level> geometric_levels(int rho, double mu, std::uint64_t truncation) {
  std::vector<Level> out;
  std::uint64_t total = 0, mult = static_cast<std::uint64_t>(rho - 1);
  for (int j = 1;; ++j) {
    if (mult > truncation - total) break;
    out.push_back({std::pow(static_cast<double>(rho), mu * j), mult});
    total += mult;
    if (mult > std::numeric_limits<std::uint64_t>::max() / static_cast<std::uint64_t>(rho)) break;
    mult *= static_cast<std::uint64_t>(rho);
  }
  return out;
}

std::vector<Level> normalize_explicit(std::vector<Level> levels, std::uint64_t truncation) {
  for (const Level& l : levels) {
    if (!std::isfinite(l.eigenvalue) || l.eigenvalue < 0.0) {
      throw InputError(reason::kParameter, "explicit spectrum: eigenvalues must be finite and >= 0");
    }
    if (l.multiplicity < 1) throw InputError(reason::kParameter, "explicit spectrum: multiplicities must be >= 1");
  }
  std::sort(levels.begin(), levels.end(), [](const Level& a, const Level& b) { return a.eigenvalue < b.eigenvalue; });
  std::vector<Level> out;
  std::uint64_t total = 0;
  for (const Level& l : levels) {
    if (!out.empty() && out.back().eigenvalue == l.eigenvalue) {
      if (l.multiplicity > truncation - total) break;
      out.back().multiplicity += l.multiplicity;
    } else {
      if (l.multiplicity > truncation - total) break;
      out.push_back(l);
    }
    total += l.multiplicity;
  }
  if (out.empty()) throw InputError(reason::kParameter, "explicit spectrum: no levels within the truncation");
  return out;
}

}  // namespace

SpectralModel::SpectralModel(ModelKind kind, std::uint64_t truncation, double nominal_lambda)
    : kind_(std::move(kind)), truncation_(truncation), nominal_lambda_(nominal_lambda) {
  if (truncation_ < 1) throw InputError(reason::kParameter, "spectral model: truncation must be >= 1");
  if (nominal_lambda_ < 0.0 || !std::isfinite(nominal_lambda_)) {
    throw InputError(reason::kParameter, "spectral model: nominal lambda must be > 0");
  }
  std::visit(overloaded{
                 [&](const TorusLaplacian& k) {
                   if (k.n < 1) throw InputError(reason::kParameter, "torus model: dimension must be >= 1");
                   levels_ = torus_levels(k.n, truncation_);
                   if (nominal_lambda_ == 0.0) nominal_lambda_ = 0.5 * k.n;
                 },
                 [&](const PrescribedExponent& k) {
                   if (!(k.lambda > 0.0) || !std::isfinite(k.lambda)) {
                     throw InputError(reason::kParameter, "prescribed-exponent model: lambda must be > 0");
                   }
                   if (!(k.unit > 0.0) || !std::isfinite(k.unit)) {
                     throw InputError(reason::kParameter, "prescribed-exponent model: unit must be > 0");
                   }
                   if (nominal_lambda_ == 0.0) nominal_lambda_ = k.lambda;
                   horizon_ = k.unit * std::pow(static_cast<double>(truncation_), 1.0 / k.lambda);
                   modes_ = truncation_;
                 },
                 [&](const GeometricSpectrum& k) {
                   if (k.rho < 2) throw InputError(reason::kParameter, "geometric model: rho must be an integer >= 2");
                   if (!(k.mu > 0.0) || !std::isfinite(k.mu)) throw InputError(reason::kParameter, "geometric model: mu must be > 0");
                   levels_ = geometric_levels(k.rho, k.mu, truncation_);
                   if (levels_.empty()) throw InputError(reason::kParameter, "geometric model: truncation below the first level");
                   if (nominal_lambda_ == 0.0) nominal_lambda_ = 1.0 / k.mu;
                 },
                 [&](const Explicit& k) {
                   if (nominal_lambda_ == 0.0) {
                     throw InputError(reason::kParameter, "explicit model: a nominal lambda > 0 is required");
                   }
                   levels_ = normalize_explicit(k.levels, truncation_);
                 },
             },
             kind_);
  if (!levels_.empty()) {
    horizon_ = levels_.back().eigenvalue;
    double acc = 0.0;
    below_.reserve(levels_.size());
    for (const Level& l : levels_) {
      below_.push_back(acc);
      if (l.eigenvalue > 0.0) acc += static_cast<double>(l.multiplicity);
      modes_ += l.multiplicity;
    }
  }
}

SpectralModel load_explicit(std::istream& in, double nominal_lambda) {
  Explicit e;
  for (auto [ev, mult] : textio::read_two_columns(in, "eigenvalue,multiplicity", "spectrum table")) {
    if (!(mult >= 1.0) || mult != std::floor(mult) || mult > 1e18) {
      throw InputError(reason::kFormat, "spectrum table: multiplicities must be positive integers");
    }
    e.levels.push_back({ev, static_cast<std::uint64_t>(mult)});
  }
  if (e.levels.empty()) throw InputError(reason::kFormat, "spectrum table: no rows");
  return SpectralModel(std::move(e), std::numeric_limits<std::uint64_t>::max(), nominal_lambda);
}

SpectralModel load_explicit_file(const std::string& path, double nominal_lambda) {
  std::ifstream in(path);
  if (!in) throw InputError(reason::kFormat, "spectrum table: cannot open " + path);
  return load_explicit(in, nominal_lambda);
}

std::string describe(const SpectralModel& m) {
  std::ostringstream os;
  std::visit(overloaded{
                 [&](const TorusLaplacian& k) { os << "TorusLaplacian(" << k.n << ")"; },
                 [&](const PrescribedExponent& k) {
                   os << "PrescribedExponent(" << k.lambda;
                   if (k.unit != 1.0) os << ",unit=" << k.unit;
                   os << ")";
                 },
                 [&](const GeometricSpectrum& k) { os << "GeometricSpectrum(" << k.rho << "," << k.mu << ")"; },
                 [&](const Explicit&) { os << "Explicit(" << m.levels().size() << " levels)"; },
             },
             m.kind());
  return os.str();
}

double counting_function(const SpectralModel& m, double s) {
  if (!(s >= 0.0) || !std::isfinite(s)) throw InputError(reason::kParameter, "counting_function: s must be >= 0");
  if (s > m.horizon()) {
    std::ostringstream os;
    os << "counting_function: s = " << s << " exceeds the enumerated horizon " << m.horizon();
    throw InputError(reason::kHorizon, os.str());
  }
  if (const auto* p = std::get_if<PrescribedExponent>(&m.kind())) {
    if (s == 0.0) return 0.0;
    return std::ceil(std::pow(s / p->unit, p->lambda)) - 1.0;
  }
  // first level with eigenvalue >= s; everything before it lies in [0, s)
  auto it = std::lower_bound(m.levels_.begin(), m.levels_.end(), s,
                             [](const Level& l, double v) { return l.eigenvalue < v; });
  if (it == m.levels_.end()) {
    const Level& last = m.levels_.back();
    return m.below_.back() + (last.eigenvalue > 0.0 ? static_cast<double>(last.multiplicity) : 0.0);
  }
  return m.below_[static_cast<std::size_t>(it - m.levels_.begin())];
}

std::vector<std::string> catalog_names() {
  return {"euclidean_laplacian", "compact_sublaplacian", "heisenberg_sublaplacian", "rockland",
          "engel_D1",            "cartan_D2",            "subcoercive",             "vladimirov"};
}

double catalog_exponent(const std::string& name, const std::map<std::string, double>& params) {
  auto get = [&](const std::string& key) {
    auto it = params.find(key);
    if (it == params.end()) throw InputError(reason::kParameter, "catalog: " + name + " needs parameter `" + key + "`");
    if (!(it->second > 0.0) || !std::isfinite(it->second)) {
      throw InputError(reason::kParameter, "catalog: parameter `" + key + "` must be > 0");
    }
    return it->second;
  };
  if (name == "euclidean_laplacian") return get("n") / 2.0;
  if (name == "compact_sublaplacian") return get("Q") / 2.0;
  if (name == "heisenberg_sublaplacian") return get("n") + 1.0;
  if (name == "rockland") return get("Q") / get("nu");
  if (name == "engel_D1") return 3.0;
  if (name == "cartan_D2") return 4.5;
  if (name == "subcoercive") return get("Qstar") / get("m");
  if (name == "vladimirov") return 1.0 / get("mu");
  throw InputError(reason::kUnknownOperator, "catalog: unknown operator `" + name + "`");
}

TraceFit fit_trace_exponent(const SpectralModel& m, double s_min, double s_max, int n_points) {
  if (n_points < 8) throw InputError(reason::kParameter, "fit_trace_exponent: n_points must be >= 8");
  if (!(s_min > 0.0) || !(s_max > s_min)) throw InputError(reason::kParameter, "fit_trace_exponent: need 0 < s_min < s_max");
  if (s_max > m.horizon()) throw InputError(reason::kHorizon, "fit_trace_exponent: s_max exceeds the enumerated horizon");
  if (counting_function(m, s_min) == 0.0) {
    throw NumericalError(reason::kDegenerateFit, "fit_trace_exponent: N(s_min) = 0");
  }
  std::vector<double> x(n_points), y(n_points);
  const double ratio = std::log(s_max / s_min);
  for (int i = 0; i < n_points; ++i) {
    double s = s_min * std::exp(ratio * i / (n_points - 1));
    s = std::min(s, s_max);
    x[i] = std::log(s);
    y[i] = std::log(counting_function(m, s));
  }
  double mx = 0.0, my = 0.0;
  for (int i = 0; i < n_points; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n_points;
  my /= n_points;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (int i = 0; i < n_points; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  TraceFit fit;
  fit.lambda_hat = sxy / sxx;
  fit.r_squared = syy > 0.0 ? sxy * sxy / (sxx * syy) : 1.0;
  return fit;
}

}  // namespace evo::spectra
