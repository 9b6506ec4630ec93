#include "osmorom/ale/coefficients.hpp"

#include "osmorom/errors.hpp"

namespace osmorom::ale {

int coefficient_components(int i) {
  switch (i) {
    case 1:
    case 3: return 1;
    case 4:
    case 7: return 2;
    case 2:
    case 5:
    case 6: return 4;
    default: throw ShapeMismatch("coefficient index out of range: " + std::to_string(i));
  }
}

fem::PointSet coefficient_point_set(int i) {
  coefficient_components(i);
  return (i == 3 || i == 4 || i == 5) ? fem::PointSet::volume : fem::PointSet::boundary;
}

namespace {

void store(const Eigen::Matrix2d& M, std::span<double> out) {
  out[0] = M(0, 0);
  out[1] = M(0, 1);
  out[2] = M(1, 0);
  out[3] = M(1, 1);
}

}  // namespace

void volume_coefficient(int i, const Eigen::Matrix2d& F, const Eigen::Vector2d& eta, std::span<double> out) {
  const double J = F.determinant();
  if (!(J > kDegenerateJ)) throw DegenerateMapping("transformation folds the mesh");
  switch (i) {
    case 3: out[0] = J; break;
    case 4: {
      const Eigen::Vector2d v = J * F.inverse() * eta;
      out[0] = v.x();
      out[1] = v.y();
      break;
    }
    case 5: {
      const Eigen::Matrix2d Finv = F.inverse();
      store(J * Finv * Finv.transpose(), out);
      break;
    }
    default: throw ShapeMismatch("c" + std::to_string(i) + " is not a volume coefficient");
  }
}

void boundary_coefficient(int i, const BoundaryGeometry& g, const Eigen::Vector2d& n_ref, double phi,
                          std::span<double> out) {
  const Eigen::Matrix2d Finv = g.F.inverse();
  switch (i) {
    case 1: out[0] = g.J_gamma; break;
    case 2: store(g.J_gamma * Finv * g.P * Finv.transpose(), out); break;
    case 6: store(g.J_gamma * Finv * g.P, out); break;
    case 7: {
      const Eigen::Vector2d v = g.J_gamma * phi * (Finv.transpose() * n_ref);
      out[0] = v.x();
      out[1] = v.y();
      break;
    }
    default: throw ShapeMismatch("c" + std::to_string(i) + " is not a boundary coefficient");
  }
}

namespace {

CoefficientSamples make_samples(const fem::Discretization& disc, int i) {
  CoefficientSamples s;
  s.id = i;
  s.set = coefficient_point_set(i);
  s.components = coefficient_components(i);
  s.values.resize(static_cast<Eigen::Index>(disc.num_points(s.set)) * s.components);
  return s;
}

std::span<double> slot(CoefficientSamples& s, int p) {
  return {s.values.data() + static_cast<std::size_t>(p) * s.components, static_cast<std::size_t>(s.components)};
}

CoefficientSamples sample(const fem::Discretization& disc, int i, const fem::Field& psi, const Eigen::VectorXd* eta,
                          const Eigen::VectorXd* phi) {
  const TransformQuantities tq = transform_quantities(disc, psi);
  CoefficientSamples s = make_samples(disc, i);
  const int np = disc.num_points(s.set);
  if (s.set == fem::PointSet::volume) {
    Eigen::Vector2d e = Eigen::Vector2d::Zero();
    for (int p = 0; p < np; ++p) {
      if (eta) e = Eigen::Vector2d((*eta)[2 * p], (*eta)[2 * p + 1]);
      volume_coefficient(i, tq.F[p], e, slot(s, p));
    }
  } else {
    const int nq = disc.quadrature().boundary_size();
    for (int p = 0; p < np; ++p) {
      const double f = phi ? (*phi)[p] : 0.0;
      boundary_coefficient(i, tq.boundary[p], disc.edge(p / nq).normal, f, slot(s, p));
    }
  }
  return s;
}

}  // namespace

CoefficientSamples coefficient_field(const fem::Discretization& disc, int i, const fem::Field& psi) {
  if (i == 4 || i == 7) throw ShapeMismatch("c4 and c7 need an additional field argument");
  return sample(disc, i, psi, nullptr, nullptr);
}

CoefficientSamples coefficient_field_c4(const fem::Discretization& disc, const fem::Field& psi,
                                        const fem::Field& eta) {
  if (eta.kind != fem::FieldKind::vector || eta.values.size() != disc.vector_dofs())
    throw ShapeMismatch("c4 expects a vector velocity field");
  const Eigen::VectorXd e = disc.evaluate(eta, fem::PointSet::volume);
  return sample(disc, 4, psi, &e, nullptr);
}

CoefficientSamples coefficient_field_c7(const fem::Discretization& disc, const fem::Field& psi,
                                        const fem::Field& phi) {
  if (phi.kind != fem::FieldKind::scalar || phi.values.size() != disc.scalar_dofs())
    throw ShapeMismatch("c7 expects a scalar concentration field");
  const Eigen::VectorXd f = disc.evaluate(phi, fem::PointSet::boundary);
  return sample(disc, 7, psi, nullptr, &f);
}

}  // namespace osmorom::ale
