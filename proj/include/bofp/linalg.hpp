#pragma once

#include <Eigen/Dense>

namespace bofp::linalg {

struct SymmetricEigen {
  Eigen::VectorXd values;   // descending
  Eigen::MatrixXd vectors;  // column k pairs with values(k)
};

/// Dense symmetric eigendecomposition (LAPACK dsyevd), eigenpairs sorted by
/// descending eigenvalue. Only the lower triangle of `a` is read.
SymmetricEigen symmetric_eigen(Eigen::MatrixXd a);

/// Flip each column so its first entry with magnitude above
/// `rel_tol * max|column|` is positive.
void canonicalize_signs(Eigen::MatrixXd& vectors, double rel_tol = 1e-8);

}  // namespace bofp::linalg
