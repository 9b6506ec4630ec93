#include "osmorom/fem/quadrature.hpp"

#include <cmath>

namespace osmorom::fem {

QuadratureTable QuadratureTable::degree4() {
  QuadratureTable q;
  // Two symmetric orbits (a, a, 1-2a); weights normalised to the unit-area
  // triangle and scaled by the reference area 1/2 below.
  constexpr double a1 = 0.4459484909159648863183293;
  constexpr double w1 = 0.223381589678011465695007;
  constexpr double a2 = 0.09157621350977074345957146;
  constexpr double w2 = 0.1099517436553218676383263;
  for (const auto& [a, w] : {std::pair{a1, w1}, std::pair{a2, w2}}) {
    const double b = 1.0 - 2.0 * a;
    q.volume_points.push_back({b, a, a});
    q.volume_points.push_back({a, b, a});
    q.volume_points.push_back({a, a, b});
    for (int k = 0; k < 3; ++k) q.volume_weights.push_back(0.5 * w);
  }

  const double s = std::sqrt(15.0) / 10.0;
  q.boundary_points = {0.5 - s, 0.5, 0.5 + s};
  q.boundary_weights = {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0};
  return q;
}

}  // namespace osmorom::fem
