#pragma once

#include <array>
#include <vector>

namespace osmorom::fem {

/// Quadrature rules shared by every assembly routine and by the empirical
/// interpolation training. Volume points are barycentric coordinates on the
/// reference triangle (weights sum to 1/2); boundary points are parameters in
/// [0, 1] along an edge (weights sum to 1).
struct QuadratureTable {
  std::vector<std::array<double, 3>> volume_points;
  std::vector<double> volume_weights;
  std::vector<double> boundary_points;
  std::vector<double> boundary_weights;

  int volume_size() const { return static_cast<int>(volume_weights.size()); }
  int boundary_size() const { return static_cast<int>(boundary_weights.size()); }

  /// Degree-4 six-point triangle rule and three-point Gauss-Legendre edge rule.
  static QuadratureTable degree4();
};

}  // namespace osmorom::fem
