#pragma once

#include <Eigen/Dense>
#include <string>

#include "bofp/grid.hpp"

namespace bofp {

/// A real value per grid cell, e.g. a trend field.
struct FieldVector {
  FieldVector() = default;
  FieldVector(GridPtr grid, Eigen::VectorXd values);

  GridPtr grid;
  Eigen::VectorXd values;
};

void require_same_grid(const Grid& a, const Grid& b, const std::string& what);

}  // namespace bofp
