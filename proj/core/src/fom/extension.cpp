#include "osmorom/fom/extension.hpp"

#include "osmorom/errors.hpp"

namespace osmorom::fom {

using Triplet = Eigen::Triplet<double>;

ExtensionOperator::ExtensionOperator(const fem::Discretization& disc) : disc_(&disc) {
  const auto& mesh = disc.mesh();
  std::vector<Triplet> trip;
  trip.reserve(static_cast<std::size_t>(disc.num_cells()) * 36);
  for (int t = 0; t < disc.num_cells(); ++t) {
    const auto& cell = disc.cell(t);
    const double w = cell.area / mesh.cell_size[t];
    // (G_j + G_j^T) : G_i with G = grad(lambda e_c) gives
    // g_i.g_j delta_cd + g_i[c] g_j[d] for trial (j, c), test (i, d).
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        const double gg = cell.grad.row(i).dot(cell.grad.row(j));
        for (int d = 0; d < 2; ++d) {
          for (int c = 0; c < 2; ++c) {
            const double v = w * ((c == d ? gg : 0.0) + cell.grad(i, c) * cell.grad(j, d));
            trip.emplace_back(2 * cell.vertices[i] + d, 2 * cell.vertices[j] + c, v);
          }
        }
      }
    }
  }
  K_.resize(disc.vector_dofs(), disc.vector_dofs());
  K_.setFromTriplets(trip.begin(), trip.end());

  // Renumber: interior unknowns, and boundary dofs by their trace position.
  std::vector<int> interior_index(disc.vector_dofs(), -1);
  for (int v = 0; v < disc.num_vertices(); ++v) {
    if (disc.boundary_index(v) >= 0) continue;
    for (int c = 0; c < 2; ++c) {
      interior_index[2 * v + c] = static_cast<int>(interior_.size());
      interior_.push_back(2 * v + c);
    }
  }
  const int ni = static_cast<int>(interior_.size());
  std::vector<Triplet> tii, tib;
  for (int k = 0; k < K_.outerSize(); ++k) {
    for (fem::SparseMatrix::InnerIterator it(K_, k); it; ++it) {
      const int r = interior_index[it.row()];
      if (r < 0) continue;
      const int col = static_cast<int>(it.col());
      if (interior_index[col] >= 0) {
        tii.emplace_back(r, interior_index[col], it.value());
      } else {
        const int b = disc.boundary_index(col / 2);
        tib.emplace_back(r, 2 * b + col % 2, it.value());
      }
    }
  }
  fem::SparseMatrix Kii(ni, ni);
  Kii.setFromTriplets(tii.begin(), tii.end());
  K_ib_.resize(ni, disc.trace_dofs());
  K_ib_.setFromTriplets(tib.begin(), tib.end());
  if (ni > 0) {
    solver_.compute(Kii);
    if (solver_.info() != Eigen::Success) throw SingularSystem("extension operator factorization failed");
  }
}

Eigen::MatrixXd ExtensionOperator::apply(const Eigen::MatrixXd& traces) const {
  if (traces.rows() != disc_->trace_dofs()) throw ShapeMismatch("extension expects trace coefficient columns");
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(disc_->vector_dofs(), traces.cols());
  for (int b = 0; b < disc_->num_boundary(); ++b) {
    const int v = disc_->mesh().boundary_vertices[b];
    out.row(2 * v) = traces.row(2 * b);
    out.row(2 * v + 1) = traces.row(2 * b + 1);
  }
  if (!interior_.empty()) {
    const Eigen::MatrixXd rhs = -(K_ib_ * traces);
    const Eigen::MatrixXd qi = solver_.solve(rhs);
    if (solver_.info() != Eigen::Success) throw SingularSystem("extension solve failed");
    for (std::size_t k = 0; k < interior_.size(); ++k) out.row(interior_[k]) = qi.row(static_cast<Eigen::Index>(k));
  }
  return out;
}

fem::Field ExtensionOperator::apply(const fem::TraceField& g) const {
  return fem::Field::vector(apply(Eigen::MatrixXd(g.values)).col(0));
}

}  // namespace osmorom::fom
