#include "bofp/covariance.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "bofp/error.hpp"
#include "bofp/linalg.hpp"

namespace bofp {

namespace {

void require_ensemble(const ControlEnsemble& ens) {
  if (ens.size() < 2) {
    throw std::invalid_argument("control ensemble '" + ens.model_id + "' needs at least 2 fields, has " +
                                std::to_string(ens.size()));
  }
  const Grid& g = ens.grid();
  for (const FieldVector& f : ens.fields) require_same_grid(g, *f.grid, "control ensemble " + ens.model_id);
}

}  // namespace

const Grid& ControlEnsemble::grid() const {
  if (fields.empty() || !fields.front().grid) throw std::invalid_argument("empty control ensemble");
  return *fields.front().grid;
}

Eigen::MatrixXd ControlEnsemble::matrix() const {
  const Eigen::Index n = static_cast<Eigen::Index>(grid().n_grid());
  Eigen::MatrixXd m(n, static_cast<Eigen::Index>(fields.size()));
  for (std::size_t k = 0; k < fields.size(); ++k) m.col(static_cast<Eigen::Index>(k)) = fields[k].values;
  return m;
}

Eigen::MatrixXd anomaly_matrix(const ControlEnsemble& ens) {
  require_ensemble(ens);
  Eigen::MatrixXd z = ens.matrix();
  const Eigen::VectorXd mean = z.rowwise().mean();
  z.colwise() -= mean;
  return z;
}

Eigen::MatrixXd empirical_covariance(const ControlEnsemble& ens) {
  const Eigen::MatrixXd d = anomaly_matrix(ens);
  return d * d.transpose() / static_cast<double>(d.cols());
}

PrincipalComponents principal_components(const ControlEnsemble& ens, double rank_tol) {
  const Eigen::MatrixXd d = anomaly_matrix(ens);
  const double n_p = static_cast<double>(d.cols());
  Eigen::BDCSVD<Eigen::MatrixXd> svd(d, Eigen::ComputeThinU);
  if (svd.info() != Eigen::Success) throw NumericalError("SVD of control anomalies failed");
  const Eigen::VectorXd eig = svd.singularValues().array().square() / n_p;

  Eigen::Index rank = 0;
  if (eig.size() > 0 && eig(0) > 0.0) {
    while (rank < eig.size() && eig(rank) > rank_tol * eig(0)) ++rank;
  }

  PrincipalComponents out;
  out.basis.grid = ens.fields.front().grid;
  out.basis.kind = BasisKind::PrincipalComponent;
  out.basis.vectors = svd.matrixU().leftCols(rank);
  linalg::canonicalize_signs(out.basis.vectors);
  out.basis.eigenvalues = eig.head(rank);
  out.spectrum.kind = BasisKind::PrincipalComponent;
  out.spectrum.lambdas = eig.head(rank);
  out.spectrum.source_n = ens.size();
  return out;
}

VarianceSpectrum empirical_basis_variances(const ControlEnsemble& ens, const BasisSet& basis) {
  const Eigen::MatrixXd d = anomaly_matrix(ens);
  if (!basis.grid) throw std::invalid_argument("basis without grid");
  require_same_grid(ens.grid(), *basis.grid, "empirical_basis_variances");
  const Eigen::MatrixXd coeffs = basis.vectors.transpose() * d;  // n_basis x n_P
  VarianceSpectrum out;
  out.kind = basis.kind;
  out.lambdas = coeffs.rowwise().squaredNorm() / static_cast<double>(d.cols());
  out.source_n = ens.size();
  return out;
}

Eigen::VectorXd project_field(const BasisSet& basis, const FieldVector& f, Eigen::Index kappa) {
  if (kappa < 1 || kappa > basis.n_basis()) {
    throw std::out_of_range("kappa " + std::to_string(kappa) + " outside 1.." +
                            std::to_string(basis.n_basis()));
  }
  require_same_grid(*basis.grid, *f.grid, "project_field");
  return basis.vectors.leftCols(kappa).transpose() * f.values;
}

Eigen::VectorXd area_weights(const Grid& grid) {
  const Eigen::Index n = static_cast<Eigen::Index>(grid.n_grid());
  Eigen::VectorXd c(n);
  for (Eigen::Index i = 0; i < n; ++i) c(i) = std::cos(grid.cell(static_cast<std::size_t>(i)).lat);
  return (c / c.mean()).cwiseSqrt();
}

FieldVector area_weight_field(const Grid& grid, const FieldVector& f) {
  require_same_grid(grid, *f.grid, "area_weight_field");
  return FieldVector(f.grid, f.values.cwiseProduct(area_weights(grid)));
}

}  // namespace bofp
