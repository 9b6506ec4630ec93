#pragma once

#include <vector>

#include <Eigen/Dense>

#include "osmorom/fem/field.hpp"
#include "osmorom/fem/space.hpp"

namespace osmorom::ale {

/// Transformation data at a boundary point: Jacobian F, J = det F, the
/// length ratio J_Gamma = |F^{-T} n_ref| J, the mapped unit normal n and the
/// tangential projector P = I - n n^T.
struct BoundaryGeometry {
  Eigen::Matrix2d F;
  double J;
  double J_gamma;
  Eigen::Vector2d n;
  Eigen::Matrix2d P;
};

/// Transformation quantities at every quadrature point. For P1 maps F is
/// constant per cell; boundary points take F from the adjacent cell.
struct TransformQuantities {
  std::vector<Eigen::Matrix2d> F;  // per volume point
  std::vector<double> J;           // per volume point
  std::vector<BoundaryGeometry> boundary;
};

/// Jacobian of a P1 vector field on one cell: F_ab = d_b psi_a.
Eigen::Matrix2d cell_jacobian(const fem::Discretization& disc, int cell, const fem::Field& psi);

/// Boundary data for a given Jacobian and reference outward normal.
/// Throws DegenerateMapping when det F <= 1e-12.
BoundaryGeometry boundary_geometry(const Eigen::Matrix2d& F, const Eigen::Vector2d& n_ref);

/// Throws DegenerateMapping when the map folds (J <= 1e-12 anywhere).
TransformQuantities transform_quantities(const fem::Discretization& disc, const fem::Field& psi);

/// Smallest Jacobian determinant over all cells.
double min_jacobian(const fem::Discretization& disc, const fem::Field& psi);

inline constexpr double kDegenerateJ = 1e-12;

}  // namespace osmorom::ale
