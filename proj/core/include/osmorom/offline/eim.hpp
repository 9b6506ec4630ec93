#pragma once

#include <vector>

#include <Eigen/Core>

#include "osmorom/fem/space.hpp"

namespace osmorom::offline {

/// Training samples of one coefficient field: column s holds the flattened
/// values (point-major, `components` entries per point) of sample s.
struct TrainingSet {
  int id = 0;
  fem::PointSet set = fem::PointSet::volume;
  int components = 1;
  Eigen::MatrixXd samples;
  /// (trajectory index, time step) per column.
  std::vector<std::pair<int, int>> provenance;
};

/// Empirical interpolation of a tensor-valued coefficient on the flattened
/// (point, component) index set.
struct EimData {
  int id = 0;
  fem::PointSet set = fem::PointSet::volume;
  int components = 1;
  Eigen::MatrixXd basis;         // flattened length x M
  std::vector<int> index;        // flattened interpolation index per basis vector
  Eigen::MatrixXd interpolation; // basis.rows(index): unit lower triangular
  Eigen::MatrixXd gamma;         // samples x M, basis = samples * gamma
  /// Max relative l-inf training error with m = 0..M basis vectors.
  std::vector<double> error_history;
  double eps_ei = 0.0;

  int size() const { return static_cast<int>(index.size()); }
  int point(int m) const { return index[m] / components; }
  int component(int m) const { return index[m] % components; }
  double achieved_error() const { return error_history.empty() ? 0.0 : error_history.back(); }

  /// Smallest M whose training error is below eps (capped at size()).
  int size_for(double eps) const;
  EimData truncated(int m) const;
};

/// Greedy EIM. Stops once every training sample is reproduced with relative
/// l-inf error < eps_ei or after `max_size` basis vectors (if positive).
/// Ties pick the lowest flattened index and the earliest sample.
/// Takes the training set by value so callers can move large sets in; the
/// samples are overwritten by the residuals. Throws ZeroTrainingSet if all
/// samples vanish.
EimData eim_greedy(TrainingSet training, double eps_ei, int max_size = -1);

/// Interpolation coefficients from values at the first theta.size()
/// interpolation pairs (forward substitution).
Eigen::VectorXd eim_theta(const EimData& eim, const Eigen::VectorXd& values_at_pairs);
/// Same, with an explicit unit lower triangular interpolation matrix.
Eigen::VectorXd eim_theta(const Eigen::MatrixXd& interpolation, const Eigen::VectorXd& values_at_pairs);

}  // namespace osmorom::offline
