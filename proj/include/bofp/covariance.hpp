#pragma once

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

#include "bofp/basis.hpp"
#include "bofp/field.hpp"

namespace bofp {

/// Unforced control-run trend fields from one climate model.
struct ControlEnsemble {
  std::string model_id;
  std::vector<FieldVector> fields;

  std::size_t size() const { return fields.size(); }
  const Grid& grid() const;
  /// n_grid x n_P matrix, one field per column.
  Eigen::MatrixXd matrix() const;
};

/// Per-component empirical variances in some basis.
struct VarianceSpectrum {
  BasisKind kind = BasisKind::Laplacian;
  Eigen::VectorXd lambdas;
  std::size_t source_n = 0;
};

/// Mean-removed fields, n_grid x n_P.
Eigen::MatrixXd anomaly_matrix(const ControlEnsemble& ens);

/// (1/n_P) sum_k (z_k - zbar)(z_k - zbar)^T, materialized densely.
Eigen::MatrixXd empirical_covariance(const ControlEnsemble& ens);

struct PrincipalComponents {
  BasisSet basis;
  VarianceSpectrum spectrum;
};

/// Eigenpairs of the empirical covariance with eigenvalue above
/// rank_tol * lambda_1, via the SVD of the anomaly matrix.
PrincipalComponents principal_components(const ControlEnsemble& ens, double rank_tol = 1e-10);

/// lambda_i = (1/n_P) sum_k (b_i^T z_k - mean)^2, i.e. diag(B^T C B).
VarianceSpectrum empirical_basis_variances(const ControlEnsemble& ens, const BasisSet& basis);

/// First kappa coefficients of B^T f.
Eigen::VectorXd project_field(const BasisSet& basis, const FieldVector& f, Eigen::Index kappa);

/// sqrt(cos lat_i / mean_j cos lat_j); the squared weights average to one.
Eigen::VectorXd area_weights(const Grid& grid);

FieldVector area_weight_field(const Grid& grid, const FieldVector& f);

}  // namespace bofp
