#pragma once

#include <Eigen/Core>

#include "osmorom/fem/forms.hpp"

namespace osmorom::offline {

/// Inner-product orthonormal modes of a snapshot matrix.
///
/// For concentration bases the first mode is the normalized constant and
/// `singular_values[0]` is the norm of the snapshots' constant component;
/// the remaining entries are the POD spectrum of the orthogonal remainder.
struct ReducedBasis {
  fem::InnerProductKind ip_kind = fem::InnerProductKind::h1_scalar;
  Eigen::MatrixXd modes;
  Eigen::VectorXd singular_values;
  double eps_rb = 0.0;
  bool constant_included = false;

  int size() const { return static_cast<int>(modes.cols()); }
  /// Keeps the first k modes.
  ReducedBasis truncated(int k) const;
  /// Coefficients of the ip-orthogonal projection: V^T W x.
  Eigen::VectorXd project(const fem::InnerProduct& ip, const Eigen::VectorXd& x) const;
};

/// Minimal K with sigma_{K+1} / reference < eps (all values if none drop below).
int truncation_size(const Eigen::VectorXd& sigma, double reference, double eps);

/// Method-of-snapshots POD of the columns of `snapshots` with respect to `ip`.
/// With `constant_first` the ip-normalized constant is prepended and the
/// snapshots are orthogonalized against it before the decomposition. A
/// positive `max_modes` caps the number of POD modes (not counting the
/// constant). Throws EmptySnapshotSet for an empty matrix.
ReducedBasis pod(const Eigen::MatrixXd& snapshots, const fem::InnerProduct& ip, double eps_rb,
                 bool constant_first = false, int max_modes = -1);

/// Orthonormal basis of the whole coefficient space (the constant first when
/// requested). Used to build full-dimensional reference models.
ReducedBasis complete_basis(const fem::InnerProduct& ip, bool constant_first);

/// Gram matrix V^T W V.
Eigen::MatrixXd gram(const fem::InnerProduct& ip, const Eigen::MatrixXd& modes);

}  // namespace osmorom::offline
