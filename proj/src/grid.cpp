#include "bofp/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "bofp/field.hpp"
#include "bofp/error.hpp"

namespace bofp {

Grid::Grid(std::size_t n_lat, std::size_t n_lon) : n_lat_(n_lat), n_lon_(n_lon) {
  if (n_lat < 2 || n_lon < 2) {
    throw std::invalid_argument("grid needs n_lat >= 2 and n_lon >= 2, got " +
                                std::to_string(n_lat) + " x " + std::to_string(n_lon));
  }
  d_lat_ = std::numbers::pi / static_cast<double>(n_lat);
  d_lon_ = 2.0 * std::numbers::pi / static_cast<double>(n_lon);
}

double Grid::lat_of_row(std::size_t i_lat) const {
  return -std::numbers::pi / 2.0 + (static_cast<double>(i_lat) + 0.5) * d_lat_;
}

double Grid::lon_of_col(std::size_t j_lon) const {
  return (static_cast<double>(j_lon) + 0.5) * d_lon_;
}

LatLon Grid::cell(std::size_t i) const {
  auto [r, c] = position(i);
  return {lat_of_row(r), lon_of_col(c)};
}

std::size_t Grid::index(std::size_t i_lat, std::size_t j_lon) const {
  if (i_lat >= n_lat_ || j_lon >= n_lon_) throw std::out_of_range("grid position out of range");
  return i_lat * n_lon_ + j_lon;
}

std::pair<std::size_t, std::size_t> Grid::position(std::size_t i) const {
  if (i >= n_grid()) {
    throw std::out_of_range("cell index " + std::to_string(i) + " >= n_grid " +
                            std::to_string(n_grid()));
  }
  return {i / n_lon_, i % n_lon_};
}

GridPtr build_grid(std::size_t n_lat, std::size_t n_lon) {
  return std::make_shared<const Grid>(n_lat, n_lon);
}

double great_circle_distance(LatLon a, LatLon b) {
  const double s_lat = std::sin(0.5 * (b.lat - a.lat));
  const double s_lon = std::sin(0.5 * (b.lon - a.lon));
  const double h = s_lat * s_lat + std::cos(a.lat) * std::cos(b.lat) * s_lon * s_lon;
  return 2.0 * std::asin(std::sqrt(std::clamp(h, 0.0, 1.0)));
}

double cell_area(const Grid& grid, std::size_t i) {
  return grid.d_lat() * grid.d_lon() * std::cos(grid.cell(i).lat);
}

double cell_radius(const Grid& grid, std::size_t i) {
  return std::sqrt(cell_area(grid, i) / std::numbers::pi);
}

FieldVector::FieldVector(GridPtr g, Eigen::VectorXd v) : grid(std::move(g)), values(std::move(v)) {
  if (!grid) throw std::invalid_argument("field without a grid");
  if (values.size() != static_cast<Eigen::Index>(grid->n_grid())) {
    throw DataError("field has " + std::to_string(values.size()) + " values, grid expects " +
                    std::to_string(grid->n_grid()));
  }
  if (!values.allFinite()) throw DataError("field contains non-finite values");
}

void require_same_grid(const Grid& a, const Grid& b, const std::string& what) {
  if (!(a == b)) {
    throw DataError(what + ": grid mismatch (" + std::to_string(a.n_lat()) + "x" +
                    std::to_string(a.n_lon()) + " vs " + std::to_string(b.n_lat()) + "x" +
                    std::to_string(b.n_lon()) + ")");
  }
}

}  // namespace bofp
