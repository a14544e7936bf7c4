#include "bofp/bayes.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>

#include "bofp/error.hpp"

namespace bofp {

const char* to_string(KappaLikelihood k) {
  return k == KappaLikelihood::Normal ? "normal" : "chi2";
}

const char* to_string(ChiSquareDof d) {
  return d == ChiSquareDof::KappaMinusOne ? "kappa_minus_one" : "kappa";
}

KappaLikelihood parse_kappa_likelihood(std::string_view s) {
  if (s == "normal") return KappaLikelihood::Normal;
  if (s == "chi2") return KappaLikelihood::ChiSquared;
  throw std::invalid_argument("unknown kappa likelihood '" + std::string(s) + "'");
}

ChiSquareDof parse_chi_square_dof(std::string_view s) {
  if (s == "kappa_minus_one") return ChiSquareDof::KappaMinusOne;
  if (s == "kappa") return ChiSquareDof::Kappa;
  throw std::invalid_argument("unknown chi-square dof convention '" + std::string(s) + "'");
}

void ProjectedProblem::validate() const {
  if (y_star.size() != x_star.size() || y_star.size() != lambda_hat.size()) {
    throw std::invalid_argument("projected problem: y*, x* and lambda_hat lengths differ");
  }
  if (lambda_hat.size() == 0) throw std::invalid_argument("projected problem: empty basis");
  if (!y_star.allFinite() || !x_star.allFinite() || !lambda_hat.allFinite()) {
    throw DataError("projected problem: non-finite input");
  }
  if ((lambda_hat.array() < 0.0).any()) throw DataError("projected problem: negative lambda_hat");
}

Eigen::Index ProjectedProblem::admissible_kappa_max(Eigen::Index cap) const {
  const double floor = 1e-10 * lambda_hat.maxCoeff();
  Eigen::Index k = 0;
  while (k < lambda_hat.size() && lambda_hat(k) > floor) ++k;
  if (cap > 0 && k > cap) k = cap;
  return k;
}

void RegressionModelSpec::validate() const {
  data.validate();
  if (kappa < 1 || kappa > data.n_basis()) {
    throw std::invalid_argument("kappa " + std::to_string(kappa) + " outside 1.." +
                                std::to_string(data.n_basis()));
  }
  if ((data.lambda_hat.head(kappa).array() <= 0.0).any()) {
    throw std::invalid_argument("retained component with lambda_hat <= 0");
  }
  if (!fixed_lambda && !(prior_logvar_sd > 0.0)) {
    throw std::invalid_argument("prior_logvar_sd must be positive");
  }
}

double PosteriorSamples::beta_mean() const { return beta.mean(); }

double PosteriorSamples::beta_sd() const {
  if (beta.size() < 2) return 0.0;
  const double m = beta.mean();
  return std::sqrt((beta.array() - m).square().sum() / static_cast<double>(beta.size() - 1));
}

Theta PosteriorSamples::posterior_mean() const {
  Theta t;
  t.beta = beta.mean();
  t.lambdas = lambdas.colwise().mean().transpose();
  return t;
}

double log_likelihood_regression(const Theta& theta, const RegressionModelSpec& spec) {
  spec.validate();
  const auto& d = spec.data;
  double ll = 0.0;
  for (Eigen::Index i = 0; i < spec.kappa; ++i) {
    const double lam = theta.lambda(i, d.lambda_hat);
    if (!(lam > 0.0)) throw std::invalid_argument("nonpositive lambda in log-likelihood");
    const double r = d.y_star(i) - theta.beta * d.x_star(i);
    ll += -0.5 * (std::log(2.0 * std::numbers::pi * lam) + r * r / lam);
  }
  return ll;
}

PosteriorSamples sample_posterior(const RegressionModelSpec& spec, Eigen::Index M,
                                  Eigen::Index burn_in, std::uint64_t seed) {
  spec.validate();
  if (M <= 0) throw std::invalid_argument("M must be positive");
  if (burn_in < 0) throw std::invalid_argument("burn_in must be nonnegative");

  const Eigen::Index kappa = spec.kappa;
  const Eigen::VectorXd x = spec.data.x_star.head(kappa);
  const Eigen::VectorXd y = spec.data.y_star.head(kappa);
  const Eigen::ArrayXd prior_mean = spec.data.lambda_hat.head(kappa).array().log();
  const double prior_var = spec.prior_logvar_sd * spec.prior_logvar_sd;

  if (!(x.squaredNorm() > 0.0)) throw NumericalError("degenerate signal: all projected x are zero");

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> uniform(0.0, 1.0);

  Eigen::ArrayXd log_lambda = prior_mean;
  Eigen::ArrayXd inv_lambda = (-log_lambda).exp();

  auto draw_beta = [&]() {
    const double precision = (x.array().square() * inv_lambda).sum();
    const double mean = (x.array() * y.array() * inv_lambda).sum() / precision;
    return mean + normal(rng) / std::sqrt(precision);
  };

  auto log_target = [&](Eigen::Index i, double u, double r2) {
    const double dev = u - prior_mean(i);
    return -0.5 * u - 0.5 * r2 * std::exp(-u) - 0.5 * dev * dev / prior_var;
  };

  // Posterior sd of log lambda_i is near 1/sqrt(1/prior_var + 1/2).
  const double initial_scale = 2.4 / std::sqrt(1.0 / prior_var + 0.5);
  Eigen::ArrayXd scale = Eigen::ArrayXd::Constant(kappa, spec.fixed_lambda ? 0.0 : initial_scale);
  Eigen::ArrayXd accepted = Eigen::ArrayXd::Zero(kappa);
  Eigen::ArrayXd batch_accepted = Eigen::ArrayXd::Zero(kappa);
  constexpr Eigen::Index kBatch = 50;
  constexpr double kTargetAcceptance = 0.44;
  Eigen::Index batch_index = 0;

  PosteriorSamples out;
  out.kappa = kappa;
  out.M = M;
  out.burn_in = burn_in;
  out.seed = seed;
  out.beta.resize(M);
  out.lambdas.resize(M, kappa);

  double beta = draw_beta();
  const Eigen::Index total = burn_in + M;
  for (Eigen::Index it = 0; it < total; ++it) {
    if (!spec.fixed_lambda) {
      for (Eigen::Index i = 0; i < kappa; ++i) {
        const double r = y(i) - beta * x(i);
        const double r2 = r * r;
        const double current = log_lambda(i);
        const double proposal = current + scale(i) * normal(rng);
        const double delta = log_target(i, proposal, r2) - log_target(i, current, r2);
        if (std::isnan(delta)) {
          throw NumericalError("non-finite log-posterior in lambda update");
        }
        if (std::log(uniform(rng)) < delta) {
          log_lambda(i) = proposal;
          inv_lambda(i) = std::exp(-proposal);
          if (it >= burn_in) accepted(i) += 1.0;
          else batch_accepted(i) += 1.0;
        }
      }
      if (it < burn_in && (it + 1) % kBatch == 0) {
        ++batch_index;
        const double step = std::min(0.1, 1.0 / std::sqrt(static_cast<double>(batch_index)));
        for (Eigen::Index i = 0; i < kappa; ++i) {
          const double rate = batch_accepted(i) / static_cast<double>(kBatch);
          scale(i) *= std::exp(rate > kTargetAcceptance ? step : -step);
        }
        batch_accepted.setZero();
      }
    }

    beta = draw_beta();
    if (!std::isfinite(beta)) throw NumericalError("non-finite beta draw");

    if (it >= burn_in) {
      const Eigen::Index j = it - burn_in;
      out.beta(j) = beta;
      out.lambdas.row(j) = log_lambda.exp().matrix().transpose();
    }
  }
  out.acceptance_rates = spec.fixed_lambda ? Eigen::VectorXd::Ones(kappa)
                                           : Eigen::VectorXd(accepted / static_cast<double>(M));
  out.proposal_scales = scale.matrix();
  return out;
}

}  // namespace bofp
