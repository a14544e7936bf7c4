#pragma once

#include <stdexcept>
#include <string>

namespace bofp {

// Input data is malformed or inconsistent (wrong grid, bad file, mismatched sizes).
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A numerical routine failed or produced a degenerate result.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace bofp
