#pragma once

#include <vector>

#include <Eigen/SparseCholesky>

#include "osmorom/fem/forms.hpp"
#include "osmorom/fem/space.hpp"

namespace osmorom::fom {

/// Discrete extension E_h: given boundary values g, solves
///   -div[h_T^{-1} (grad q + grad q^T)] = 0,  q = g on the boundary,
/// on the fixed reference mesh. The interior block is factorized once.
class ExtensionOperator {
 public:
  explicit ExtensionOperator(const fem::Discretization& disc);

  fem::Field apply(const fem::TraceField& g) const;
  /// Column-wise extension of trace coefficient vectors.
  Eigen::MatrixXd apply(const Eigen::MatrixXd& traces) const;

  /// Full weighted symmetric-gradient stiffness on the vector space.
  const fem::SparseMatrix& stiffness() const { return K_; }

 private:
  const fem::Discretization* disc_;
  fem::SparseMatrix K_;
  fem::SparseMatrix K_ib_;  // interior rows, trace columns
  std::vector<int> interior_;  // vector dof per interior unknown
  Eigen::SimplicialLDLT<fem::SparseMatrix> solver_;
};

}  // namespace osmorom::fom
