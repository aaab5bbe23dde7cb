#include "evoscalar/linsolve.hpp"

#include <cmath>
#include <utility>

#include "evoscalar/error.hpp"

namespace evo::linsolve {

std::vector<double> solve_dense(std::vector<double> a, std::vector<double> b, std::size_t m) {
  for (std::size_t col = 0; col < m; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < m; ++r) {
      if (std::fabs(a[r * m + col]) > std::fabs(a[piv * m + col])) piv = r;
    }
    if (a[piv * m + col] == 0.0) throw NumericalError(reason::kIllPosed, "solve_dense: singular matrix");
    if (piv != col) {
      for (std::size_t c = 0; c < m; ++c) std::swap(a[piv * m + c], a[col * m + c]);
      std::swap(b[piv], b[col]);
    }
    for (std::size_t r = col + 1; r < m; ++r) {
      double f = a[r * m + col] / a[col * m + col];
      for (std::size_t c = col; c < m; ++c) a[r * m + c] -= f * a[col * m + c];
      b[r] -= f * b[col];
    }
  }
  std::vector<double> x(m);
  for (std::size_t i = m; i-- > 0;) {
    double s = b[i];
    for (std::size_t c = i + 1; c < m; ++c) s -= a[i * m + c] * x[c];
    x[i] = s / a[i * m + i];
  }
  return x;
}

}  // namespace evo::linsolve
