#pragma once

#include <Eigen/Core>

namespace osmorom::fem {

enum class FieldKind { scalar, vector };

/// Coefficient vector of a P1 function on the reference disk. Vector fields
/// interleave components: entry 2*v + c belongs to vertex v, component c.
struct Field {
  FieldKind kind = FieldKind::scalar;
  Eigen::VectorXd values;

  int components() const { return kind == FieldKind::scalar ? 1 : 2; }

  static Field scalar(Eigen::VectorXd v) { return {FieldKind::scalar, std::move(v)}; }
  static Field vector(Eigen::VectorXd v) { return {FieldKind::vector, std::move(v)}; }
};

/// Coefficients of a vector P1 function on the boundary loop; entry 2*b + c
/// belongs to the b-th boundary vertex.
struct TraceField {
  Eigen::VectorXd values;
};

}  // namespace osmorom::fem
