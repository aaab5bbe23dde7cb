#pragma once

#include <cstddef>
#include <vector>

namespace evo::linsolve {

// Dense solve of the row-major m x m system a x = b by Gaussian elimination
// with partial pivoting. Throws NumericalError("ill-posed") if singular.
std::vector<double> solve_dense(std::vector<double> a, std::vector<double> b, std::size_t m);

}  // namespace evo::linsolve
