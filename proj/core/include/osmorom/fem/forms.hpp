#pragma once

#include <span>
#include <string_view>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "osmorom/fem/space.hpp"

namespace osmorom::fem {

using SparseMatrix = Eigen::SparseMatrix<double>;

/// The seven coefficient-driven forms. a1, a2, l1, l2 act on the boundary
/// trace space; a3, a4, a5 on the scalar volume space.
enum class FormId { a1, a2, a3, a4, a5, l1, l2 };

std::string_view form_name(FormId id);
bool is_bilinear(FormId id);
PointSet form_point_set(FormId id);
/// Components per quadrature point of the coefficient feeding the form.
int form_components(FormId id);
/// Form driven by coefficient c_i, i in 1..7 (c6 -> l1, c7 -> l2).
FormId form_of_coefficient(int i);

/// Assembles a bilinear form with the coefficient frozen at the given
/// samples (point-major, form_components() values per quadrature point;
/// 2x2 tensors row-major). Matrix rows are test functions.
SparseMatrix assemble_bilinear(const Discretization& disc, FormId id, std::span<const double> samples);
Eigen::VectorXd assemble_linear(const Discretization& disc, FormId id, std::span<const double> samples);

inline SparseMatrix assemble_bilinear(const Discretization& disc, FormId id, const Eigen::VectorXd& samples) {
  return assemble_bilinear(disc, id, std::span<const double>(samples.data(), samples.size()));
}
inline Eigen::VectorXd assemble_linear(const Discretization& disc, FormId id, const Eigen::VectorXd& samples) {
  return assemble_linear(disc, id, std::span<const double>(samples.data(), samples.size()));
}

enum class InnerProductKind { h1_scalar, h1_vector, l2_boundary_vector };

/// Symmetric positive definite Gram matrix of an inner product on the
/// matching coefficient space. The H1 products use the full norm.
struct InnerProduct {
  InnerProductKind kind;
  SparseMatrix matrix;
};

InnerProduct inner_product_matrix(const Discretization& disc, InnerProductKind kind);

/// Plain P1 mass and stiffness matrices on the scalar space.
SparseMatrix mass_matrix(const Discretization& disc);
SparseMatrix stiffness_matrix(const Discretization& disc);

}  // namespace osmorom::fem
