#pragma once

#include <stdexcept>
#include <string>

namespace gyrox {

/// Precondition violation on a public entry point.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The level-set field has a uniform sign, so no isosurface exists in the cell.
class NoSurface : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The linear solver failed to reach its residual tolerance.
class SolverDiverged : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The optimality-criteria multiplier search could not hit the volume target.
class BisectionFailed : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Two grids (or grid lists) that must agree in shape do not.
class ShapeMismatch : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace gyrox
