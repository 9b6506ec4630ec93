#pragma once

#include <span>

#include <Eigen/Core>

#include "osmorom/ale/transform.hpp"
#include "osmorom/fem/field.hpp"
#include "osmorom/fem/space.hpp"

namespace osmorom::ale {

/// Values of one coefficient field c_i at every quadrature point of its
/// point set, point-major with components(i) entries per point.
struct CoefficientSamples {
  int id = 0;
  fem::PointSet set = fem::PointSet::volume;
  int components = 1;
  Eigen::VectorXd values;
};

/// d_i: 1 for c1, c3; 2 for c4, c7; 4 for c2, c5, c6 (2x2 row-major).
int coefficient_components(int i);
fem::PointSet coefficient_point_set(int i);

/// Pointwise kernels. `out` receives coefficient_components(i) values.
/// Volume coefficients only read F; boundary coefficients read the full
/// boundary geometry and the reference normal.
void volume_coefficient(int i, const Eigen::Matrix2d& F, const Eigen::Vector2d& eta, std::span<double> out);
void boundary_coefficient(int i, const BoundaryGeometry& g, const Eigen::Vector2d& n_ref, double phi,
                          std::span<double> out);

/// c1, c2, c3, c5, c6 as functions of the transformation alone.
CoefficientSamples coefficient_field(const fem::Discretization& disc, int i, const fem::Field& psi);
/// c4 = J F^{-1} eta for a vector velocity eta.
CoefficientSamples coefficient_field_c4(const fem::Discretization& disc, const fem::Field& psi,
                                        const fem::Field& eta);
/// c7 = J_Gamma F^{-T} n_ref phi for a scalar concentration phi.
CoefficientSamples coefficient_field_c7(const fem::Discretization& disc, const fem::Field& psi,
                                        const fem::Field& phi);

}  // namespace osmorom::ale
