#include "bofp/laplacian_basis.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

#include "bofp/error.hpp"
#include "bofp/linalg.hpp"

namespace bofp {

const char* to_string(BasisKind kind) {
  return kind == BasisKind::Laplacian ? "laplace" : "eof";
}

const char* to_string(KernelVariant v) {
  return v == KernelVariant::HalfAngle ? "half_angle" : "as_printed";
}

KernelVariant parse_kernel_variant(std::string_view s) {
  if (s == "half_angle") return KernelVariant::HalfAngle;
  if (s == "as_printed") return KernelVariant::AsPrinted;
  throw std::invalid_argument("unknown kernel variant '" + std::string(s) + "'");
}

Eigen::MatrixXd assemble_laplacian_matrix(const Grid& grid, KernelVariant variant) {
  const std::size_t n = grid.n_grid();
  std::vector<double> lat(n), lon(n), cos_lat(n);
  for (std::size_t i = 0; i < n; ++i) {
    const LatLon p = grid.cell(i);
    lat[i] = p.lat;
    lon[i] = p.lon;
    cos_lat[i] = std::cos(p.lat);
    if (!(cos_lat[i] > 0.0)) {
      throw std::invalid_argument("cell " + std::to_string(i) + " has cos(lat) <= 0");
    }
  }
  const double cell = grid.d_lat() * grid.d_lon();
  const double coeff = variant == KernelVariant::HalfAngle ? -1.0 / (4.0 * std::numbers::pi)
                                                           : -4.0 / std::numbers::pi;

  Eigen::MatrixXd a(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    const double rho2 = cell * cos_lat[j] / std::numbers::pi;
    const double rho = std::sqrt(rho2);
    a(j, j) = 0.25 * rho2 * (1.0 - 2.0 * std::log(rho / std::numbers::sqrt2));
    for (std::size_t i = j + 1; i < n; ++i) {
      // Haversine h = sin^2(d/2).
      const double s_lat = std::sin(0.5 * (lat[i] - lat[j]));
      const double s_lon = std::sin(0.5 * (lon[i] - lon[j]));
      const double h = s_lat * s_lat + cos_lat[i] * cos_lat[j] * s_lon * s_lon;
      double arg;
      if (variant == KernelVariant::HalfAngle) {
        arg = 2.0 * h;
      } else {
        const double d = 2.0 * std::asin(std::sqrt(std::min(h, 1.0)));
        arg = std::max(2.0 * std::abs(std::sin(d * d)), 1e-300);
      }
      const double v = coeff * std::log(arg) * cell * std::sqrt(cos_lat[i] * cos_lat[j]);
      a(i, j) = v;
      a(j, i) = v;
    }
  }
  return a;
}

Eigen::MatrixXd project_out_constant(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols()) throw std::invalid_argument("project_out_constant needs a square matrix");
  const double n = static_cast<double>(a.rows());
  const Eigen::VectorXd row_mean = a.rowwise().sum() / n;
  const Eigen::RowVectorXd col_mean = a.colwise().sum() / n;
  const double total_mean = a.sum() / (n * n);
  Eigen::MatrixXd out = a;
  out.colwise() -= row_mean;
  out.rowwise() -= col_mean;
  out.array() += total_mean;
  // Exact symmetry.
  out = 0.5 * (out + out.transpose()).eval();
  return out;
}

BasisSet compute_laplacian_basis(const GridPtr& grid, KernelVariant variant) {
  if (!grid) throw std::invalid_argument("compute_laplacian_basis: null grid");
  Eigen::MatrixXd projected = project_out_constant(assemble_laplacian_matrix(*grid, variant));
  const Eigen::Index n = projected.rows();

  // Lift the constant direction above the rest of the spectrum so it sorts
  // first and cannot mix with a near-zero eigenvalue.
  const double shift = 2.0 * projected.norm() + 1.0;
  projected.array() += shift / static_cast<double>(n);

  linalg::SymmetricEigen eig = linalg::symmetric_eigen(std::move(projected));
  if (!eig.vectors.allFinite()) throw NumericalError("Laplacian eigenvectors are not finite");

  eig.vectors.col(0).setConstant(1.0 / std::sqrt(static_cast<double>(n)));
  eig.values(0) = 0.0;
  linalg::canonicalize_signs(eig.vectors);

  BasisSet out;
  out.grid = grid;
  out.kind = BasisKind::Laplacian;
  out.vectors = std::move(eig.vectors);
  out.eigenvalues = std::move(eig.values);
  return out;
}

}  // namespace bofp
