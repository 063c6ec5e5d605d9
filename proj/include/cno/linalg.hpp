#pragma once

#include <vector>

namespace cno {

// Eigenvalues of a symmetric n x n matrix (row-major, dense) by cyclic Jacobi
// rotations. Returns eigenvalues in ascending order.
std::vector<double> symmetric_eigenvalues(std::vector<double> a, int n);

}  // namespace cno
