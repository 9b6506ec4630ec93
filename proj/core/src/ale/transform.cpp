#include "osmorom/ale/transform.hpp"

#include <cmath>
#include <limits>

#include "osmorom/errors.hpp"

namespace osmorom::ale {

Eigen::Matrix2d cell_jacobian(const fem::Discretization& disc, int cell, const fem::Field& psi) {
  const auto& c = disc.cell(cell);
  Eigen::Matrix2d F = Eigen::Matrix2d::Zero();
  for (int i = 0; i < 3; ++i) {
    const int v = c.vertices[i];
    const Eigen::Vector2d value(psi.values[2 * v], psi.values[2 * v + 1]);
    F.noalias() += value * c.grad.row(i);
  }
  return F;
}

namespace {

void check_jacobian(double J) {
  if (!(J > kDegenerateJ)) {
    throw DegenerateMapping("transformation folds the mesh (J = " + std::to_string(J) + ")");
  }
}

}  // namespace

BoundaryGeometry boundary_geometry(const Eigen::Matrix2d& F, const Eigen::Vector2d& n_ref) {
  BoundaryGeometry g;
  g.F = F;
  g.J = F.determinant();
  check_jacobian(g.J);
  const Eigen::Vector2d m = F.inverse().transpose() * n_ref;
  const double len = m.norm();
  g.J_gamma = len * g.J;
  g.n = m / len;
  g.P = Eigen::Matrix2d::Identity() - g.n * g.n.transpose();
  return g;
}

TransformQuantities transform_quantities(const fem::Discretization& disc, const fem::Field& psi) {
  if (psi.kind != fem::FieldKind::vector || psi.values.size() != disc.vector_dofs()) {
    throw ShapeMismatch("transform_quantities expects a vector field on the volume mesh");
  }
  const int nq = disc.quadrature().volume_size();
  const int nqb = disc.quadrature().boundary_size();
  std::vector<Eigen::Matrix2d> cellF(disc.num_cells());
  TransformQuantities tq;
  tq.F.resize(disc.volume_points());
  tq.J.resize(disc.volume_points());
  for (int t = 0; t < disc.num_cells(); ++t) {
    cellF[t] = cell_jacobian(disc, t, psi);
    const double J = cellF[t].determinant();
    check_jacobian(J);
    for (int q = 0; q < nq; ++q) {
      tq.F[t * nq + q] = cellF[t];
      tq.J[t * nq + q] = J;
    }
  }
  tq.boundary.resize(disc.boundary_points());
  for (int e = 0; e < disc.mesh().num_boundary_edges(); ++e) {
    const auto& edge = disc.edge(e);
    const BoundaryGeometry g = boundary_geometry(cellF[edge.cell], edge.normal);
    for (int q = 0; q < nqb; ++q) tq.boundary[e * nqb + q] = g;
  }
  return tq;
}

double min_jacobian(const fem::Discretization& disc, const fem::Field& psi) {
  double m = std::numeric_limits<double>::infinity();
  for (int t = 0; t < disc.num_cells(); ++t) m = std::min(m, cell_jacobian(disc, t, psi).determinant());
  return m;
}

}  // namespace osmorom::ale
