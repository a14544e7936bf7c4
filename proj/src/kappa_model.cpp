#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "bofp/bayes.hpp"
#include "bofp/error.hpp"

namespace bofp {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double chi2_log_density(double s, double df) {
  if (s < 0.0) return kNegInf;
  if (s == 0.0) {
    if (df < 2.0) return std::numeric_limits<double>::infinity();
    if (df == 2.0) return -std::numbers::ln2;
    return kNegInf;
  }
  return (0.5 * df - 1.0) * std::log(s) - 0.5 * s - 0.5 * df * std::numbers::ln2 -
         std::lgamma(0.5 * df);
}

double dof_for(Eigen::Index kappa, ChiSquareDof dof) {
  return static_cast<double>(dof == ChiSquareDof::KappaMinusOne ? kappa - 1 : kappa);
}

void check_kappa(Eigen::Index kappa, const ProjectedProblem& data) {
  if (kappa < 2 || kappa > data.n_basis()) {
    throw std::invalid_argument("kappa " + std::to_string(kappa) + " outside 2.." +
                                std::to_string(data.n_basis()));
  }
}

double positive_lambda(const Theta& theta, const ProjectedProblem& data, Eigen::Index i) {
  const double lam = theta.lambda(i, data.lambda_hat);
  if (!(lam > 0.0)) {
    throw std::invalid_argument("nonpositive lambda at component " + std::to_string(i + 1));
  }
  return lam;
}

// Log-likelihood for kappa = 2..kappa_max; entry j is kappa = 2 + j.
Eigen::VectorXd chi2_profile(const Theta& theta, const ProjectedProblem& data,
                             Eigen::Index kappa_max, ChiSquareDof dof) {
  Eigen::VectorXd out(kappa_max - 1);
  double stat = 0.0;
  for (Eigen::Index i = 0; i < kappa_max; ++i) {
    const double r = data.y_star(i) - theta.beta * data.x_star(i);
    stat += r * r / positive_lambda(theta, data, i);
    const Eigen::Index kappa = i + 1;
    if (kappa >= 2) out(kappa - 2) = chi2_log_density(stat, dof_for(kappa, dof));
  }
  return out;
}

// Terms past kappa_max are shared by every kappa in the support and are
// included only when n_terms extends past it.
Eigen::VectorXd normal_profile(const Theta& theta, const ProjectedProblem& data,
                               Eigen::Index kappa_max, Eigen::Index n_terms) {
  double base = 0.0;
  for (Eigen::Index i = 0; i < n_terms; ++i) {
    const double lam = positive_lambda(theta, data, i);
    base += -0.5 * (std::log(2.0 * std::numbers::pi * lam) + data.y_star(i) * data.y_star(i) / lam);
  }
  Eigen::VectorXd out(kappa_max - 1);
  double gain = 0.0;
  for (Eigen::Index i = 0; i < kappa_max; ++i) {
    const double lam = positive_lambda(theta, data, i);
    const double r = data.y_star(i) - theta.beta * data.x_star(i);
    gain += -0.5 * (r * r - data.y_star(i) * data.y_star(i)) / lam;
    const Eigen::Index kappa = i + 1;
    if (kappa >= 2) out(kappa - 2) = base + gain;
  }
  return out;
}

}  // namespace

double kappa_loglik_chi2(Eigen::Index kappa, const Theta& theta, const ProjectedProblem& data,
                         ChiSquareDof dof) {
  data.validate();
  check_kappa(kappa, data);
  double stat = 0.0;
  for (Eigen::Index i = 0; i < kappa; ++i) {
    const double r = data.y_star(i) - theta.beta * data.x_star(i);
    stat += r * r / positive_lambda(theta, data, i);
  }
  return chi2_log_density(stat, dof_for(kappa, dof));
}

double kappa_loglik_normal(Eigen::Index kappa, const Theta& theta, const ProjectedProblem& data) {
  data.validate();
  check_kappa(kappa, data);
  double ll = 0.0;
  for (Eigen::Index i = 0; i < data.n_basis(); ++i) {
    const double lam = positive_lambda(theta, data, i);
    const double mean = i < kappa ? theta.beta * data.x_star(i) : 0.0;
    const double r = data.y_star(i) - mean;
    ll += -0.5 * (std::log(2.0 * std::numbers::pi * lam) + r * r / lam);
  }
  return ll;
}

double KappaPosterior::probability(Eigen::Index kappa) const {
  if (kappa < kappa_min || kappa > kappa_max()) return 0.0;
  return std::exp(log_probs(kappa - kappa_min));
}

Eigen::Index KappaPosterior::map() const {
  if (log_probs.size() == 0) throw std::logic_error("empty kappa posterior");
  Eigen::Index best = 0;
  for (Eigen::Index j = 1; j < log_probs.size(); ++j) {
    if (log_probs(j) > log_probs(best)) best = j;
  }
  return kappa_min + best;
}

KappaPosterior kappa_posterior(KappaLikelihood kind, const Theta& theta,
                               const ProjectedProblem& data, Eigen::Index kappa_max,
                               ChiSquareDof dof) {
  data.validate();
  const Eigen::Index admissible = data.admissible_kappa_max();
  if (kappa_max <= 0 || kappa_max > admissible) kappa_max = admissible;
  if (kappa_max < 2) {
    throw NumericalError("fewer than two components with positive variance; kappa support is empty");
  }

  Eigen::VectorXd ll = kind == KappaLikelihood::ChiSquared
                           ? chi2_profile(theta, data, kappa_max, dof)
                           : normal_profile(theta, data, kappa_max, kappa_max);
  if (ll.array().isNaN().any()) throw NumericalError("NaN in kappa log-likelihood");

  const double top = ll.maxCoeff();
  if (top == kNegInf) throw NumericalError("all kappa weights are zero");

  KappaPosterior out;
  out.kind = kind;
  if (top == std::numeric_limits<double>::infinity()) {
    // Point mass on the infinite-density values.
    const Eigen::ArrayXd is_inf = (ll.array() == top).cast<double>();
    out.log_probs = (is_inf / is_inf.sum()).log().matrix();
    return out;
  }
  const double lse = top + std::log((ll.array() - top).exp().sum());
  out.log_probs = (ll.array() - lse).matrix();
  return out;
}

}  // namespace bofp
