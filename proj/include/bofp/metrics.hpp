#pragma once

#include <span>

#include "bofp/bayes.hpp"

namespace bofp {

/// Quantile with linear interpolation between order statistics.
double quantile(std::span<const double> samples, double p);

/// Empirical-ensemble CRPS: mean|s - truth| - (1/2M^2) sum_jk |s_j - s_k|.
double crps(std::span<const double> samples, double truth);

inline constexpr double kDetectionThreshold = 1.64;    // z_{0.95}
inline constexpr double kAttributionThreshold = 1.96;  // z_{0.975}

/// beta_post_mean / beta_post_sd.
double detection_statistic(double beta_mean, double beta_sd);
double detection_statistic(const FitResult& fit);
bool detected(double statistic);

/// |1 - beta_post_mean| / beta_post_sd.
double attribution_statistic(double beta_mean, double beta_sd);
double attribution_statistic(const FitResult& fit);

/// True when the equal-tailed `level` credible interval of beta contains 1.
bool attributed(const FitResult& fit, double level = 0.95);

}  // namespace bofp
