#include "bofp/gls.hpp"

#include <cmath>
#include <stdexcept>

#include "bofp/error.hpp"

namespace bofp {

void ProjectedRegressionData::validate() const {
  if (x_star.size() != y_star.size() || x_star.size() != lambdas.size()) {
    throw std::invalid_argument("projected regression data: length mismatch");
  }
  if (x_star.size() == 0) throw std::invalid_argument("projected regression data: empty");
  if ((lambdas.array() <= 0.0).any()) {
    throw std::invalid_argument("projected regression data: retained component with lambda <= 0");
  }
}

namespace {

double signal_precision(const ProjectedRegressionData& d) {
  d.validate();
  const double p = (d.x_star.array().square() / d.lambdas.array()).sum();
  if (!(p > 0.0)) throw NumericalError("degenerate signal: all projected x are zero");
  return p;
}

}  // namespace

double gls_beta(const ProjectedRegressionData& d) {
  const double den = signal_precision(d);
  const double num = (d.x_star.array() * d.y_star.array() / d.lambdas.array()).sum();
  return num / den;
}

double gls_stderr(const ProjectedRegressionData& d) { return 1.0 / std::sqrt(signal_precision(d)); }

double residual_statistic(const ProjectedRegressionData& d, double beta) {
  d.validate();
  return ((d.y_star - beta * d.x_star).array().square() / d.lambdas.array()).sum();
}

}  // namespace bofp
