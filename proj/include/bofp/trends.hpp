#pragma once

#include <Eigen/Dense>
#include <span>
#include <string>
#include <vector>

#include "bofp/field.hpp"

namespace bofp {

/// Gridded time series. Times are decimal years, one row of `values` per time.
struct GriddedSeries {
  GridPtr grid;
  std::vector<double> times;
  Eigen::MatrixXd values;  // n_time x n_grid
  std::string role;
  std::string model_id;

  std::size_t n_time() const { return times.size(); }
  void validate() const;
};

/// OLS slope of v on t, rescaled from per-year to per-`per_years`.
double ols_trend(std::span<const double> t, std::span<const double> v, double per_years = 25.0);

/// Time steps per year implied by the mean spacing of the series.
int steps_per_year(const GriddedSeries& series);

/// Consecutive non-overlapping windows of exactly `window_years`; a short
/// trailing remainder is dropped.
std::vector<GriddedSeries> segment_control(const GriddedSeries& series, int window_years = 25);

/// Per-cell OLS trend.
FieldVector trend_field(const GriddedSeries& series, double per_years = 25.0);

/// Averages each block of steps_per_year rows into one annual row.
GriddedSeries annual_means(const GriddedSeries& series);

}  // namespace bofp
