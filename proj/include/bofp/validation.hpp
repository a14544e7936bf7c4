#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "bofp/bayes.hpp"
#include "bofp/covariance.hpp"
#include "bofp/laplacian_basis.hpp"
#include "bofp/synthetic.hpp"

namespace bofp {

/// Mean of the ensemble with member k excluded.
FieldVector leave_one_out_mean(std::span<const FieldVector> members, std::size_t k);

struct StudyConfig {
  std::vector<ControlEnsemble> controls;
  std::vector<ForcedEnsemble> historicals;
  BasisKind basis_kind = BasisKind::Laplacian;
  TwoFitOptions fit;  // likelihood, dof, M, burn_in, prior scale, kappa cap
  std::uint64_t base_seed = 0;
  double credible_level = 0.90;
  bool area_weighting = true;
  KernelVariant kernel = KernelVariant::HalfAngle;
  BasisPtr laplacian;  // computed on demand when null
  int threads = 1;

  void validate() const;
};

struct FitTuple {
  std::size_t c;
  std::size_t f;
  std::size_t k;
};

/// Every (c, f, k): N_P * sum_f n_f tuples, c slowest, k fastest.
std::vector<FitTuple> enumerate_tuples(std::size_t n_controls,
                                       std::span<const std::size_t> historical_sizes);

struct FitRecord {
  std::size_t c = 0;
  std::size_t f = 0;
  std::size_t k = 0;
  double beta_mean = 0.0;
  double beta_sd = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  bool contains_one = false;
  double crps = 0.0;
  long kappa_post = 0;
  bool converged = false;
  int n_iterations = 0;
  std::string error;  // empty on success

  bool ok() const { return error.empty(); }
};

std::uint64_t tuple_seed(std::uint64_t base_seed, const FitTuple& t);

/// Leave-one-out known-truth sweep (beta = 1) over every (c, f, k).
/// Failures are recorded per tuple; output is independent of `threads`.
std::vector<FitRecord> run_validation(const StudyConfig& config);

/// Fraction of records whose interval contains 1.
double coverage_rate(std::span<const FitRecord> records);

/// sqrt(mean (beta_mean - 1)^2).
double rmse(std::span<const FitRecord> records);

struct PairAggregate {
  std::size_t c = 0;
  std::size_t f = 0;
  std::size_t n = 0;
  std::size_t n_failed = 0;
  double coverage = 0.0;
  double rmse = 0.0;
  double mean_crps = 0.0;
  double median_kappa = 0.0;
};

/// Coverage, RMSE and mean CRPS for each (c, f) over successful records.
std::vector<PairAggregate> aggregate_pairs(std::span<const FitRecord> records);

struct Spread {
  double median = 0.0;
  double q25 = 0.0;
  double q75 = 0.0;
  double q05 = 0.0;
  double q95 = 0.0;
  double mean = 0.0;
};

Spread spread_of(std::span<const double> values);

struct ControlSummary {
  std::size_t c = 0;
  Spread coverage;
  Spread rmse;
  Spread crps;
  Spread kappa;
};

/// Distribution over forced models of the per-pair metrics, for each control.
std::vector<ControlSummary> summarize_by_control(std::span<const PairAggregate> pairs);

}  // namespace bofp
