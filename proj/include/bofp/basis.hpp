#pragma once

#include <Eigen/Dense>
#include <memory>

#include "bofp/grid.hpp"

namespace bofp {

enum class BasisKind { Laplacian, PrincipalComponent };

/// Ordered orthonormal basis on a grid, one vector per column.
struct BasisSet {
  GridPtr grid;
  BasisKind kind = BasisKind::Laplacian;
  Eigen::MatrixXd vectors;   // n_grid x n_basis
  Eigen::VectorXd eigenvalues;  // operator eigenvalues in column order (may be empty)

  Eigen::Index n_basis() const { return vectors.cols(); }
};

using BasisPtr = std::shared_ptr<const BasisSet>;

const char* to_string(BasisKind kind);

}  // namespace bofp
