#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "bofp/basis.hpp"
#include "bofp/covariance.hpp"
#include "bofp/field.hpp"

namespace bofp {

/// Members of one forced (historical) model.
struct ForcedEnsemble {
  std::string model_id;
  std::vector<FieldVector> members;

  std::size_t size() const { return members.size(); }
};

/// A known-truth world whose natural variability is diagonal in a
/// (Laplacian) basis.
struct SyntheticWorldSpec {
  BasisPtr basis;
  Eigen::VectorXd true_spectrum;  // per-component variance, length n_basis
  FieldVector true_forced_field;  // analysis-space forced pattern
  std::size_t n_P = 0;
  std::size_t n_H = 0;
  std::uint64_t seed = 0;
  std::string model_id = "synthetic";
  // Divide generated fields by the area weights so that area weighting in the
  // pipeline restores the specified law.
  bool physical_space = false;
};

struct SyntheticWorld {
  ControlEnsemble control;
  ForcedEnsemble forced;
};

/// z = B (eps * sqrt(lambda)); x_k = forced + independent draw of the same law.
SyntheticWorld generate_synthetic_world(const SyntheticWorldSpec& spec);

/// lambda_i = amplitude * i^(-exponent) for i <= n_active (1-based), 0 beyond.
Eigen::VectorXd power_law_spectrum(Eigen::Index n_basis, Eigen::Index n_active, double amplitude,
                                   double exponent);

/// Multiplies each component by exp(g_i), g an AR(1) sequence over the
/// component index with marginal sd `log_sd` and lag-one correlation `rho`.
Eigen::VectorXd perturb_spectrum(const Eigen::VectorXd& base, double log_sd, double rho,
                                 std::uint64_t seed);

/// Basis-coordinate forced pattern: a_1 = 2 * scale * sqrt(lambda_1) and
/// a_i = scale * sqrt(lambda_i) * i^(-decay) * g_i for i > 1, g_i ~ N(0, 1) from `seed`.
Eigen::VectorXd synthetic_forced_coefficients(const Eigen::VectorXd& spectrum, double scale,
                                              double decay, std::uint64_t seed);

/// Parameters for a desk-scale study of N_P control models and N_H forced
/// models, each with its own perturbed spectrum.
struct SyntheticStudySpec {
  std::size_t n_lat = 18;
  std::size_t n_lon = 36;
  std::size_t n_control_models = 2;
  std::size_t n_forced_models = 1;
  std::size_t n_P = 30;
  std::size_t n_H = 10;
  Eigen::Index n_active = 40;  // 0 means all components active
  double amplitude = 1.0;
  double exponent = 1.0;
  double mismatch_log_sd = 0.0;
  double mismatch_rho = 0.8;
  double signal_scale = 1.0;
  double signal_decay = 0.5;
  std::uint64_t seed = 1;
};

struct SyntheticStudy {
  std::vector<ControlEnsemble> controls;
  std::vector<ForcedEnsemble> historicals;
};

SyntheticStudy generate_synthetic_study(const SyntheticStudySpec& spec, const BasisPtr& basis,
                                        bool physical_space);

}  // namespace bofp
