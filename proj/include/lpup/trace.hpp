#pragma once

#include "lpup/grid.hpp"

#include <string>
#include <vector>

namespace lpup {

/// Time-indexed snapshots of an evolution on one shared grid, uniform in t.
struct EvolutionTrace {
  std::string equation;
  std::string method;
  double dt = 0.0;
  std::vector<double> times;
  std::vector<GridFunction> snapshots;

  /// Throws std::invalid_argument on non-uniform steps, size mismatch or
  /// mixed grids.
  void validate() const;
  const Grid& grid() const { return snapshots.front().grid(); }
};

}  // namespace lpup
