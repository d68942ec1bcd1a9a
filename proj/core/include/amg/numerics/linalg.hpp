#pragma once

#include <vector>

#include "amg/numerics/tensor.hpp"

namespace amg {

struct SymmetricEigen {
  std::vector<double> values;  // descending
  Tensor vectors;              // column k pairs with values[k]
};

/// Cyclic Jacobi rotations. Stops when the off-diagonal Frobenius norm drops
/// below `tolerance` times the matrix norm, or after `max_sweeps`.
SymmetricEigen jacobi_eigen(const Tensor& symmetric, double tolerance = 1e-12, int max_sweeps = 100);

/// Principal square root of a symmetric positive semi-definite matrix.
/// Eigenvalues down to -1e-10 (relative) are clamped to zero.
Tensor matrix_sqrt_psd(const Tensor& m);

double trace(const Tensor& m);

/// Mean of the rows of an [n,d] matrix.
Tensor row_mean(const Tensor& points);

/// Sample covariance (n-1 denominator) of the rows of an [n,d] matrix.
Tensor covariance(const Tensor& points);

}  // namespace amg
