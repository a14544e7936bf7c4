#include "bofp/trends.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "bofp/error.hpp"

namespace bofp {

void GriddedSeries::validate() const {
  if (!grid) throw std::invalid_argument("series without grid");
  if (values.rows() != static_cast<Eigen::Index>(times.size())) {
    throw DataError("series has " + std::to_string(values.rows()) + " rows for " +
                    std::to_string(times.size()) + " time stamps");
  }
  if (values.cols() != static_cast<Eigen::Index>(grid->n_grid())) {
    throw DataError("series has " + std::to_string(values.cols()) + " cells, grid expects " +
                    std::to_string(grid->n_grid()));
  }
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (!(times[i] > times[i - 1])) throw DataError("series times are not strictly increasing");
  }
  if (!values.allFinite()) throw DataError("series contains non-finite values (missing data is not supported)");
}

double ols_trend(std::span<const double> t, std::span<const double> v, double per_years) {
  if (t.size() != v.size()) throw std::invalid_argument("ols_trend: length mismatch");
  if (t.size() < 3) throw std::invalid_argument("ols_trend needs at least 3 points");
  const double n = static_cast<double>(t.size());
  double t_mean = 0.0, v_mean = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    t_mean += t[i];
    v_mean += v[i];
  }
  t_mean /= n;
  v_mean /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    const double dt = t[i] - t_mean;
    sxx += dt * dt;
    sxy += dt * (v[i] - v_mean);
  }
  if (!(sxx > 0.0)) throw NumericalError("ols_trend: time coordinate is constant");
  return sxy / sxx * per_years;
}

int steps_per_year(const GriddedSeries& series) {
  if (series.n_time() < 2) throw DataError("series too short to infer its time step");
  const double span = series.times.back() - series.times.front();
  const double dt = span / static_cast<double>(series.n_time() - 1);
  const int steps = static_cast<int>(std::lround(1.0 / dt));
  if (steps < 1) throw DataError("series time step longer than a year");
  return steps;
}

namespace {

GriddedSeries slice_rows(const GriddedSeries& s, std::size_t begin, std::size_t count) {
  GriddedSeries out;
  out.grid = s.grid;
  out.role = s.role;
  out.model_id = s.model_id;
  out.times.assign(s.times.begin() + static_cast<std::ptrdiff_t>(begin),
                   s.times.begin() + static_cast<std::ptrdiff_t>(begin + count));
  out.values = s.values.middleRows(static_cast<Eigen::Index>(begin), static_cast<Eigen::Index>(count));
  return out;
}

}  // namespace

std::vector<GriddedSeries> segment_control(const GriddedSeries& series, int window_years) {
  series.validate();
  if (window_years < 1) throw std::invalid_argument("window_years must be positive");
  const std::size_t window = static_cast<std::size_t>(steps_per_year(series)) *
                             static_cast<std::size_t>(window_years);
  const std::size_t n_windows = series.n_time() / window;
  if (n_windows == 0) {
    throw DataError("series of " + std::to_string(series.n_time()) +
                    " steps is shorter than one " + std::to_string(window_years) + "-year window");
  }
  std::vector<GriddedSeries> out;
  out.reserve(n_windows);
  for (std::size_t w = 0; w < n_windows; ++w) out.push_back(slice_rows(series, w * window, window));
  return out;
}

FieldVector trend_field(const GriddedSeries& series, double per_years) {
  series.validate();
  const Eigen::Index n = series.values.cols();
  Eigen::VectorXd trends(n);
  std::vector<double> column(series.n_time());
  for (Eigen::Index c = 0; c < n; ++c) {
    for (std::size_t r = 0; r < series.n_time(); ++r) {
      column[r] = series.values(static_cast<Eigen::Index>(r), c);
    }
    trends(c) = ols_trend(series.times, column, per_years);
  }
  return FieldVector(series.grid, std::move(trends));
}

GriddedSeries annual_means(const GriddedSeries& series) {
  series.validate();
  const std::size_t steps = static_cast<std::size_t>(steps_per_year(series));
  const std::size_t n_years = series.n_time() / steps;
  GriddedSeries out;
  out.grid = series.grid;
  out.role = series.role;
  out.model_id = series.model_id;
  out.times.resize(n_years);
  out.values.resize(static_cast<Eigen::Index>(n_years), series.values.cols());
  for (std::size_t y = 0; y < n_years; ++y) {
    double t = 0.0;
    for (std::size_t s = 0; s < steps; ++s) t += series.times[y * steps + s];
    out.times[y] = t / static_cast<double>(steps);
    out.values.row(static_cast<Eigen::Index>(y)) =
        series.values.middleRows(static_cast<Eigen::Index>(y * steps), static_cast<Eigen::Index>(steps))
            .colwise()
            .mean();
  }
  return out;
}

}  // namespace bofp
