#pragma once

#include <Eigen/Dense>

namespace bofp {

/// Forced and observed patterns projected on the leading kappa basis vectors,
/// with the variance of each component.
struct ProjectedRegressionData {
  Eigen::VectorXd x_star;
  Eigen::VectorXd y_star;
  Eigen::VectorXd lambdas;

  Eigen::Index kappa() const { return x_star.size(); }
  /// Throws std::invalid_argument on length mismatch or lambda <= 0.
  void validate() const;
};

/// Generalized least squares estimate sum(x y / lambda) / sum(x^2 / lambda).
double gls_beta(const ProjectedRegressionData& d);

/// (sum x^2 / lambda)^(-1/2).
double gls_stderr(const ProjectedRegressionData& d);

/// sum (y - beta x)^2 / lambda.
double residual_statistic(const ProjectedRegressionData& d, double beta);

}  // namespace bofp
