#pragma once

#include <cstddef>
#include <memory>
#include <utility>
#include <vector>

namespace bofp {

struct LatLon {
  double lat;  // radians
  double lon;  // radians
};

/// Regular latitude-longitude grid of cell centers on the unit sphere.
///
/// Cells are ordered with longitude varying fastest. Latitude centers sit half
/// a spacing away from the poles, so cos(lat) > 0 for every cell.
class Grid {
 public:
  Grid(std::size_t n_lat, std::size_t n_lon);

  std::size_t n_lat() const { return n_lat_; }
  std::size_t n_lon() const { return n_lon_; }
  std::size_t n_grid() const { return n_lat_ * n_lon_; }
  double d_lat() const { return d_lat_; }
  double d_lon() const { return d_lon_; }

  double lat_of_row(std::size_t i_lat) const;
  double lon_of_col(std::size_t j_lon) const;

  LatLon cell(std::size_t i) const;
  std::size_t index(std::size_t i_lat, std::size_t j_lon) const;
  std::pair<std::size_t, std::size_t> position(std::size_t i) const;

  bool operator==(const Grid& other) const {
    return n_lat_ == other.n_lat_ && n_lon_ == other.n_lon_;
  }

 private:
  std::size_t n_lat_;
  std::size_t n_lon_;
  double d_lat_;
  double d_lon_;
};

using GridPtr = std::shared_ptr<const Grid>;

GridPtr build_grid(std::size_t n_lat, std::size_t n_lon);

/// Central angle between two points on the unit sphere (haversine form).
double great_circle_distance(LatLon a, LatLon b);

/// Radius of the disk whose area matches cell i: sqrt(dlat*dlon*cos(lat_i)/pi).
double cell_radius(const Grid& grid, std::size_t i);

/// dlat * dlon * cos(lat_i).
double cell_area(const Grid& grid, std::size_t i);

}  // namespace bofp
