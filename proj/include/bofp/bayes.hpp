#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string_view>
#include <vector>

#include "bofp/basis.hpp"
#include "bofp/covariance.hpp"
#include "bofp/field.hpp"

namespace bofp {

enum class KappaLikelihood { Normal, ChiSquared };
enum class ChiSquareDof { KappaMinusOne, Kappa };

const char* to_string(KappaLikelihood k);
const char* to_string(ChiSquareDof d);
KappaLikelihood parse_kappa_likelihood(std::string_view s);
ChiSquareDof parse_chi_square_dof(std::string_view s);

/// Observation and forced pattern projected on a full basis, with the
/// empirical component variances from the control runs.
struct ProjectedProblem {
  Eigen::VectorXd y_star;
  Eigen::VectorXd x_star;
  Eigen::VectorXd lambda_hat;

  Eigen::Index n_basis() const { return lambda_hat.size(); }
  void validate() const;
  /// Largest kappa such that every lambda_hat up to it exceeds
  /// 1e-10 * max(lambda_hat), capped at `cap` (0 means uncapped).
  Eigen::Index admissible_kappa_max(Eigen::Index cap = 0) const;
};

/// Regression-model parameters (beta, lambda_1..lambda_m). Components past m
/// fall back to lambda_hat.
struct Theta {
  double beta = 0.0;
  Eigen::VectorXd lambdas;

  double lambda(Eigen::Index i, const Eigen::VectorXd& lambda_hat) const {
    return i < lambdas.size() ? lambdas(i) : lambda_hat(i);
  }
};

struct RegressionModelSpec {
  ProjectedProblem data;
  Eigen::Index kappa = 2;
  double prior_logvar_sd = 1.0;
  // Hold lambda at lambda_hat and sample beta only.
  bool fixed_lambda = false;

  void validate() const;
};

struct PosteriorSamples {
  Eigen::VectorXd beta;     // M
  Eigen::MatrixXd lambdas;  // M x kappa
  Eigen::Index kappa = 0;
  Eigen::Index M = 0;
  Eigen::Index burn_in = 0;
  std::uint64_t seed = 0;
  Eigen::VectorXd acceptance_rates;  // per log-lambda block, post burn-in
  Eigen::VectorXd proposal_scales;   // frozen after burn-in

  double beta_mean() const;
  double beta_sd() const;
  Theta posterior_mean() const;
};

/// Gaussian log-likelihood of the first kappa projected residuals.
double log_likelihood_regression(const Theta& theta, const RegressionModelSpec& spec);

/// Metropolis-within-Gibbs: exact Gaussian conditional for beta, adaptive
/// random-walk Metropolis on each log lambda_i (adapted toward 0.44 acceptance
/// during burn-in, then frozen).
PosteriorSamples sample_posterior(const RegressionModelSpec& spec, Eigen::Index M = 2000,
                                  Eigen::Index burn_in = 1000, std::uint64_t seed = 0);

double kappa_loglik_chi2(Eigen::Index kappa, const Theta& theta, const ProjectedProblem& data,
                         ChiSquareDof dof = ChiSquareDof::KappaMinusOne);

double kappa_loglik_normal(Eigen::Index kappa, const Theta& theta, const ProjectedProblem& data);

/// Normalized distribution over kappa = 2..kappa_max under a flat prior.
struct KappaPosterior {
  KappaLikelihood kind = KappaLikelihood::ChiSquared;
  Eigen::VectorXd log_probs;  // entry j is kappa = 2 + j

  static constexpr Eigen::Index kappa_min = 2;
  Eigen::Index kappa_max() const { return kappa_min + log_probs.size() - 1; }
  double probability(Eigen::Index kappa) const;
  /// Most probable kappa; ties go to the smaller value.
  Eigen::Index map() const;
};

KappaPosterior kappa_posterior(KappaLikelihood kind, const Theta& theta,
                               const ProjectedProblem& data, Eigen::Index kappa_max = 0,
                               ChiSquareDof dof = ChiSquareDof::KappaMinusOne);

struct TwoFitOptions {
  KappaLikelihood likelihood = KappaLikelihood::ChiSquared;
  ChiSquareDof dof = ChiSquareDof::KappaMinusOne;
  Eigen::Index M = 2000;
  Eigen::Index burn_in = 1000;
  std::uint64_t seed = 0;
  double prior_logvar_sd = 1.0;
  Eigen::Index kappa_cap = 400;
  Eigen::Index initial_kappa = 2;
  int max_iterations = 50;
  double beta_tolerance = 1e-3;
};

struct FitResult {
  KappaPosterior kappa_posterior;
  Eigen::Index kappa_post = 0;
  PosteriorSamples samples;
  double beta_post_mean = 0.0;
  double beta_post_sd = 0.0;
  int n_iterations = 0;
  bool converged = false;
  bool oscillation_broken = false;
  std::vector<Eigen::Index> kappa_trace;
};

FitResult two_fit(const ProjectedProblem& data, const TwoFitOptions& options);

/// Projects y and x on the full basis, then runs the two-fit procedure.
FitResult two_fit(const FieldVector& y, const FieldVector& x, const BasisSet& basis,
                  const VarianceSpectrum& spectrum, const TwoFitOptions& options);

}  // namespace bofp
