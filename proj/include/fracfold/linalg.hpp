#pragma once

#include <vector>

#include "fracfold/fracops.hpp"

namespace fracfold {

/// Lower Gershgorin bound of a symmetric matrix.
double gershgorin_lower_bound(const Matrix& m);

/// Smallest eigenpairs of a symmetric matrix by shifted inverse iteration
/// with deflation. The shift starts below the Gershgorin bound and is
/// moved up to the Rayleigh quotient once the residual certifies it stays
/// below the target eigenvalue. Vectors are sup-normalized, the first one
/// with positive sum.
std::vector<EigenPair> smallest_eigenpairs(const Matrix& m, int count, double tol,
                                           int max_iterations);

/// Sup norm, 0 for an empty field.
double sup_norm(const Field& v);

}  // namespace fracfold
