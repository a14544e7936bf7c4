#pragma once

#include <Eigen/Dense>
#include <string_view>

#include "bofp/basis.hpp"
#include "bofp/grid.hpp"

namespace bofp {

/// Off-diagonal kernel of the discretized Green's-function operator.
///
/// HalfAngle: -(1/4pi) log(2 sin^2(d/2)), the spherical Green's function of the
///   Laplacian, whose self-cell integral is the diagonal term.
/// AsPrinted: -(4/pi) log(2 |sin(d^2)|), kept for comparison only.
enum class KernelVariant { HalfAngle, AsPrinted };

const char* to_string(KernelVariant v);
KernelVariant parse_kernel_variant(std::string_view s);

/// Symmetric n_grid x n_grid operator matrix:
///   A_ij = k(d_ij) dlat dlon sqrt(cos lat_i cos lat_j)    (i != j)
///   A_ii = rho_i^2 / 4 * (1 - 2 log(rho_i / sqrt 2))
Eigen::MatrixXd assemble_laplacian_matrix(const Grid& grid,
                                          KernelVariant variant = KernelVariant::HalfAngle);

/// Q A Q with Q = I - 11^T/n.
Eigen::MatrixXd project_out_constant(const Eigen::MatrixXd& a);

/// Full Laplacian eigenbasis: constant vector first, the rest by descending
/// eigenvalue of the projected operator (global scales first).
BasisSet compute_laplacian_basis(const GridPtr& grid,
                                 KernelVariant variant = KernelVariant::HalfAngle);

}  // namespace bofp
