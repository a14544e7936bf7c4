#include "bofp/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace bofp {

double quantile(std::span<const double> samples, double p) {
  if (samples.empty()) throw std::invalid_argument("quantile of an empty sample");
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("quantile level outside [0, 1]");
  std::vector<double> s(samples.begin(), samples.end());
  std::sort(s.begin(), s.end());
  const double h = p * static_cast<double>(s.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, s.size() - 1);
  return s[lo] + (h - static_cast<double>(lo)) * (s[hi] - s[lo]);
}

double crps(std::span<const double> samples, double truth) {
  if (samples.empty()) throw std::invalid_argument("crps of an empty sample");
  std::vector<double> s(samples.begin(), samples.end());
  std::sort(s.begin(), s.end());
  const double m = static_cast<double>(s.size());
  double abs_err = 0.0;
  double spread = 0.0;  // sum_{j<k} (s_k - s_j) over sorted values
  for (std::size_t j = 0; j < s.size(); ++j) {
    abs_err += std::abs(s[j] - truth);
    spread += (2.0 * static_cast<double>(j) - m + 1.0) * s[j];
  }
  // The full double sum counts each pair twice.
  return abs_err / m - spread / (m * m);
}

double detection_statistic(double beta_mean, double beta_sd) {
  if (!(beta_sd > 0.0)) throw std::invalid_argument("detection statistic needs a positive sd");
  return beta_mean / beta_sd;
}

double detection_statistic(const FitResult& fit) {
  return detection_statistic(fit.beta_post_mean, fit.beta_post_sd);
}

bool detected(double statistic) { return statistic > kDetectionThreshold; }

double attribution_statistic(double beta_mean, double beta_sd) {
  if (!(beta_sd > 0.0)) throw std::invalid_argument("attribution statistic needs a positive sd");
  return std::abs(1.0 - beta_mean) / beta_sd;
}

double attribution_statistic(const FitResult& fit) {
  return attribution_statistic(fit.beta_post_mean, fit.beta_post_sd);
}

bool attributed(const FitResult& fit, double level) {
  const std::span<const double> b(fit.samples.beta.data(),
                                  static_cast<std::size_t>(fit.samples.beta.size()));
  const double tail = 0.5 * (1.0 - level);
  return quantile(b, tail) <= 1.0 && 1.0 <= quantile(b, 1.0 - tail);
}

}  // namespace bofp
