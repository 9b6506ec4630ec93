#include "osmorom/fem/forms.hpp"

#include <vector>

#include "osmorom/errors.hpp"

namespace osmorom::fem {

using Triplet = Eigen::Triplet<double>;

std::string_view form_name(FormId id) {
  switch (id) {
    case FormId::a1: return "a1";
    case FormId::a2: return "a2";
    case FormId::a3: return "a3";
    case FormId::a4: return "a4";
    case FormId::a5: return "a5";
    case FormId::l1: return "l1";
    case FormId::l2: return "l2";
  }
  return "?";
}

bool is_bilinear(FormId id) { return id != FormId::l1 && id != FormId::l2; }

PointSet form_point_set(FormId id) {
  switch (id) {
    case FormId::a3:
    case FormId::a4:
    case FormId::a5: return PointSet::volume;
    default: return PointSet::boundary;
  }
}

int form_components(FormId id) {
  switch (id) {
    case FormId::a1:
    case FormId::a3: return 1;
    case FormId::a4:
    case FormId::l2: return 2;
    default: return 4;
  }
}

FormId form_of_coefficient(int i) {
  static constexpr FormId table[] = {FormId::a1, FormId::a2, FormId::a3, FormId::a4,
                                     FormId::a5, FormId::l1, FormId::l2};
  if (i < 1 || i > 7) throw ShapeMismatch("coefficient index out of range");
  return table[i - 1];
}

namespace {

void check_shape(const Discretization& disc, FormId id, std::span<const double> samples) {
  const std::size_t expected =
      static_cast<std::size_t>(disc.num_points(form_point_set(id))) * form_components(id);
  if (samples.size() != expected) {
    throw ShapeMismatch(std::string(form_name(id)) + ": expected " + std::to_string(expected) +
                        " coefficient values, got " + std::to_string(samples.size()));
  }
}

SparseMatrix from_triplets(int n, const std::vector<Triplet>& trip) {
  SparseMatrix A(n, n);
  A.setFromTriplets(trip.begin(), trip.end());
  return A;
}

SparseMatrix assemble_volume(const Discretization& disc, FormId id, std::span<const double> c) {
  const auto& quad = disc.quadrature();
  const int nq = quad.volume_size();
  std::vector<Triplet> trip;
  trip.reserve(static_cast<std::size_t>(disc.num_cells()) * 9);
  for (int t = 0; t < disc.num_cells(); ++t) {
    const auto& cell = disc.cell(t);
    Eigen::Matrix3d local = Eigen::Matrix3d::Zero();
    for (int q = 0; q < nq; ++q) {
      const int p = t * nq + q;
      const double w = quad.volume_weights[q] * 2.0 * cell.area;
      const auto& lam = quad.volume_points[q];
      switch (id) {
        case FormId::a3: {
          const double k = w * c[p];
          for (int i = 0; i < 3; ++i)
            for (int j = 0; j < 3; ++j) local(i, j) += k * lam[i] * lam[j];
          break;
        }
        case FormId::a4: {
          const Eigen::Vector2d b(c[2 * p], c[2 * p + 1]);
          for (int i = 0; i < 3; ++i) {
            const double bg = w * b.dot(cell.grad.row(i).transpose());
            for (int j = 0; j < 3; ++j) local(i, j) += bg * lam[j];
          }
          break;
        }
        case FormId::a5: {
          Eigen::Matrix2d C;
          C << c[4 * p], c[4 * p + 1], c[4 * p + 2], c[4 * p + 3];
          local.noalias() += w * cell.grad * C * cell.grad.transpose();
          break;
        }
        default: break;
      }
    }
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) trip.emplace_back(cell.vertices[i], cell.vertices[j], local(i, j));
  }
  return from_triplets(disc.scalar_dofs(), trip);
}

SparseMatrix assemble_boundary(const Discretization& disc, FormId id, std::span<const double> c) {
  const auto& quad = disc.quadrature();
  const int nq = quad.boundary_size();
  const int ne = disc.mesh().num_boundary_edges();
  std::vector<Triplet> trip;
  trip.reserve(static_cast<std::size_t>(ne) * 8);
  for (int e = 0; e < ne; ++e) {
    const auto& edge = disc.edge(e);
    const double dphi[2] = {-1.0 / edge.length, 1.0 / edge.length};
    Eigen::Matrix2d local = Eigen::Matrix2d::Zero();
    for (int q = 0; q < nq; ++q) {
      const int p = e * nq + q;
      const double w = quad.boundary_weights[q] * edge.length;
      const double s = quad.boundary_points[q];
      const double phi[2] = {1.0 - s, s};
      if (id == FormId::a1) {
        for (int i = 0; i < 2; ++i)
          for (int j = 0; j < 2; ++j) local(i, j) += w * c[p] * phi[i] * phi[j];
      } else {
        Eigen::Matrix2d C;
        C << c[4 * p], c[4 * p + 1], c[4 * p + 2], c[4 * p + 3];
        const double k = w * edge.tangent.dot(C * edge.tangent);
        for (int i = 0; i < 2; ++i)
          for (int j = 0; j < 2; ++j) local(i, j) += k * dphi[i] * dphi[j];
      }
    }
    // Both vector components see the same scalar block.
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j)
        for (int comp = 0; comp < 2; ++comp)
          trip.emplace_back(2 * edge.trace[i] + comp, 2 * edge.trace[j] + comp, local(i, j));
  }
  return from_triplets(disc.trace_dofs(), trip);
}

}  // namespace

SparseMatrix assemble_bilinear(const Discretization& disc, FormId id, std::span<const double> samples) {
  if (!is_bilinear(id)) throw ShapeMismatch(std::string(form_name(id)) + " is a linear form");
  check_shape(disc, id, samples);
  return form_point_set(id) == PointSet::volume ? assemble_volume(disc, id, samples)
                                                : assemble_boundary(disc, id, samples);
}

Eigen::VectorXd assemble_linear(const Discretization& disc, FormId id, std::span<const double> c) {
  if (is_bilinear(id)) throw ShapeMismatch(std::string(form_name(id)) + " is a bilinear form");
  check_shape(disc, id, c);
  const auto& quad = disc.quadrature();
  const int nq = quad.boundary_size();
  Eigen::VectorXd out = Eigen::VectorXd::Zero(disc.trace_dofs());
  for (int e = 0; e < disc.mesh().num_boundary_edges(); ++e) {
    const auto& edge = disc.edge(e);
    const double dphi[2] = {-1.0 / edge.length, 1.0 / edge.length};
    for (int q = 0; q < nq; ++q) {
      const int p = e * nq + q;
      const double w = quad.boundary_weights[q] * edge.length;
      const double s = quad.boundary_points[q];
      const double phi[2] = {1.0 - s, s};
      for (int i = 0; i < 2; ++i) {
        for (int comp = 0; comp < 2; ++comp) {
          double v;
          if (id == FormId::l1) {
            // c6 : grad_Gamma(phi e_comp), with (grad s)_{ab} = d_a s_b.
            v = (c[4 * p + comp] * edge.tangent.x() + c[4 * p + 2 + comp] * edge.tangent.y()) * dphi[i];
          } else {
            v = c[2 * p + comp] * phi[i];
          }
          out[2 * edge.trace[i] + comp] += w * v;
        }
      }
    }
  }
  return out;
}

SparseMatrix mass_matrix(const Discretization& disc) {
  std::vector<Triplet> trip;
  for (int t = 0; t < disc.num_cells(); ++t) {
    const auto& cell = disc.cell(t);
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        trip.emplace_back(cell.vertices[i], cell.vertices[j], cell.area * (i == j ? 2.0 : 1.0) / 12.0);
  }
  return from_triplets(disc.scalar_dofs(), trip);
}

SparseMatrix stiffness_matrix(const Discretization& disc) {
  std::vector<Triplet> trip;
  for (int t = 0; t < disc.num_cells(); ++t) {
    const auto& cell = disc.cell(t);
    const Eigen::Matrix3d K = cell.area * cell.grad * cell.grad.transpose();
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) trip.emplace_back(cell.vertices[i], cell.vertices[j], K(i, j));
  }
  return from_triplets(disc.scalar_dofs(), trip);
}

namespace {

SparseMatrix blockify(const SparseMatrix& S) {
  std::vector<Triplet> trip;
  trip.reserve(2 * S.nonZeros());
  for (int k = 0; k < S.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(S, k); it; ++it)
      for (int comp = 0; comp < 2; ++comp)
        trip.emplace_back(2 * it.row() + comp, 2 * it.col() + comp, it.value());
  SparseMatrix V(2 * S.rows(), 2 * S.cols());
  V.setFromTriplets(trip.begin(), trip.end());
  return V;
}

}  // namespace

InnerProduct inner_product_matrix(const Discretization& disc, InnerProductKind kind) {
  switch (kind) {
    case InnerProductKind::h1_scalar: {
      SparseMatrix M = mass_matrix(disc) + stiffness_matrix(disc);
      return {kind, M};
    }
    case InnerProductKind::h1_vector:
      return {kind, blockify(mass_matrix(disc) + stiffness_matrix(disc))};
    case InnerProductKind::l2_boundary_vector: {
      std::vector<double> ones(disc.boundary_points(), 1.0);
      return {kind, assemble_bilinear(disc, FormId::a1, ones)};
    }
  }
  throw ShapeMismatch("unknown inner product kind");
}

}  // namespace osmorom::fem
