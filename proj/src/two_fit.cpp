#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "bofp/bayes.hpp"
#include "bofp/error.hpp"
#include "bofp/gls.hpp"

namespace bofp {

namespace {

struct Iterate {
  Eigen::Index kappa_used;
  Theta theta;
  KappaPosterior selection;  // computed from theta
};

FitResult finish(const KappaPosterior& selection, Eigen::Index kappa,
                 const PosteriorSamples& samples) {
  FitResult r;
  r.kappa_posterior = selection;
  r.kappa_post = kappa;
  r.samples = samples;
  r.beta_post_mean = samples.beta_mean();
  r.beta_post_sd = samples.beta_sd();
  return r;
}

}  // namespace

FitResult two_fit(const ProjectedProblem& data, const TwoFitOptions& o) {
  data.validate();
  if (o.max_iterations < 1) throw std::invalid_argument("max_iterations must be >= 1");
  const Eigen::Index kappa_max = data.admissible_kappa_max(o.kappa_cap);
  if (kappa_max < 2) {
    throw NumericalError("fewer than two admissible components (positive lambda_hat)");
  }

  // Step 1: first guess theta = (beta0, lambda_hat).
  const Eigen::Index k0 = std::clamp<Eigen::Index>(o.initial_kappa, 2, kappa_max);
  ProjectedRegressionData initial{data.x_star.head(k0), data.y_star.head(k0),
                                  data.lambda_hat.head(k0)};
  Theta theta0;
  theta0.beta = gls_beta(initial);
  KappaPosterior selection =
      kappa_posterior(o.likelihood, theta0, data, kappa_max, o.dof);
  Eigen::Index kappa = selection.map();

  // The chain at a given kappa uses the same seed every time it is requested,
  // so the iteration is a deterministic map kappa -> kappa'.
  std::map<Eigen::Index, PosteriorSamples> chains;
  auto chain_for = [&](Eigen::Index k) -> const PosteriorSamples& {
    auto it = chains.find(k);
    if (it == chains.end()) {
      RegressionModelSpec spec{data, k, o.prior_logvar_sd, false};
      it = chains.emplace(k, sample_posterior(spec, o.M, o.burn_in, o.seed)).first;
    }
    return it->second;
  };

  std::vector<Iterate> history;
  std::vector<Eigen::Index> trace{kappa};

  for (int t = 0; t < o.max_iterations; ++t) {
    // Steps 2-3: sample at kappa, point-estimate theta, re-evaluate kappa.
    const PosteriorSamples& chain = chain_for(kappa);
    Theta theta = chain.posterior_mean();
    KappaPosterior next_sel = kappa_posterior(o.likelihood, theta, data, kappa_max, o.dof);
    const Eigen::Index next = next_sel.map();

    const bool repeat = !history.empty() && history.back().kappa_used == kappa &&
                        std::abs(history.back().theta.beta - theta.beta) < o.beta_tolerance;
    history.push_back({kappa, theta, next_sel});
    trace.push_back(next);

    if (next == kappa && repeat) {
      FitResult r = finish(next_sel, kappa, chain);
      r.converged = true;
      r.n_iterations = t + 1;
      r.kappa_trace = trace;
      return r;
    }

    if (next != kappa) {
      // A revisit closes a cycle; settle on the smallest kappa in it.
      auto first = std::find_if(history.begin(), history.end(),
                                [&](const Iterate& h) { return h.kappa_used == next; });
      if (first != history.end()) {
        auto smallest = std::min_element(
            first, history.end(),
            [](const Iterate& a, const Iterate& b) { return a.kappa_used < b.kappa_used; });
        // The iterate before `smallest` in the cycle selected it.
        const Iterate& selector = smallest == first ? history.back() : *(smallest - 1);
        FitResult r = finish(selector.selection, smallest->kappa_used, chain_for(smallest->kappa_used));
        r.converged = true;
        r.oscillation_broken = true;
        r.n_iterations = t + 1;
        r.kappa_trace = trace;
        return r;
      }
    }
    kappa = next;
  }

  // Not converged: report the last kappa that was sampled.
  const Iterate& last = history.back();
  const KappaPosterior& sel =
      history.size() >= 2 ? history[history.size() - 2].selection : selection;
  FitResult r = finish(sel, last.kappa_used, chain_for(last.kappa_used));
  r.converged = false;
  r.n_iterations = o.max_iterations;
  r.kappa_trace = trace;
  return r;
}

FitResult two_fit(const FieldVector& y, const FieldVector& x, const BasisSet& basis,
                  const VarianceSpectrum& spectrum, const TwoFitOptions& options) {
  if (!basis.grid) throw std::invalid_argument("basis without grid");
  require_same_grid(*basis.grid, *y.grid, "two_fit observation");
  require_same_grid(*basis.grid, *x.grid, "two_fit forced pattern");
  if (spectrum.lambdas.size() != basis.n_basis()) {
    throw DataError("spectrum has " + std::to_string(spectrum.lambdas.size()) +
                    " components, basis has " + std::to_string(basis.n_basis()));
  }
  ProjectedProblem data;
  data.y_star = basis.vectors.transpose() * y.values;
  data.x_star = basis.vectors.transpose() * x.values;
  data.lambda_hat = spectrum.lambdas;
  return two_fit(data, options);
}

}  // namespace bofp
