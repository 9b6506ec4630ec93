#pragma once

#include <array>
#include <functional>
#include <vector>

#include <Eigen/Dense>

#include "osmorom/fem/field.hpp"
#include "osmorom/fem/mesh.hpp"
#include "osmorom/fem/quadrature.hpp"

namespace osmorom::fem {

struct CellGeometry {
  std::array<int, 3> vertices;
  double area;
  /// Row i holds the (constant) gradient of the i-th barycentric function.
  Eigen::Matrix<double, 3, 2> grad;
};

struct EdgeGeometry {
  std::array<int, 2> vertices;  // global vertex ids
  std::array<int, 2> trace;     // positions in the boundary loop
  double length;
  Point tangent;  // unit, from vertices[0] to vertices[1]
  Point normal;   // unit outward polygonal normal
  int cell;       // adjacent cell
};

enum class PointSet { volume, boundary };

/// P1 finite element spaces on a fixed mesh together with the geometric data
/// every assembly loop needs. Immutable after construction.
class Discretization {
 public:
  explicit Discretization(Mesh mesh, QuadratureTable quadrature = QuadratureTable::degree4());

  const Mesh& mesh() const { return mesh_; }
  const QuadratureTable& quadrature() const { return quad_; }

  int num_vertices() const { return mesh_.num_vertices(); }
  int num_cells() const { return mesh_.num_cells(); }
  int num_boundary() const { return mesh_.num_boundary_vertices(); }

  int scalar_dofs() const { return num_vertices(); }
  int vector_dofs() const { return 2 * num_vertices(); }
  int trace_dofs() const { return 2 * num_boundary(); }

  int num_points(PointSet set) const;
  int volume_points() const { return num_points(PointSet::volume); }
  int boundary_points() const { return num_points(PointSet::boundary); }

  const CellGeometry& cell(int t) const { return cells_[t]; }
  const EdgeGeometry& edge(int e) const { return edges_[e]; }
  /// Position in the boundary loop, or -1 for interior vertices.
  int boundary_index(int vertex) const { return boundary_index_[vertex]; }

  /// Quadrature point p = t * nq + q (volume) or e * nq + q (boundary).
  Point point(PointSet set, int p) const;
  /// Cell containing a quadrature point (boundary points: the adjacent cell).
  int point_cell(PointSet set, int p) const;
  /// Barycentric coordinates of a volume point within its cell.
  const std::array<double, 3>& volume_barycentric(int p) const;
  /// Edge parameter s of a boundary point (0 at vertices[0], 1 at vertices[1]).
  double boundary_parameter(int p) const;

  Field interpolate(const std::function<double(const Point&)>& f) const;
  Field interpolate_vector(const std::function<Point(const Point&)>& f) const;
  TraceField interpolate_boundary(const std::function<Point(const Point&)>& g) const;

  /// Restriction of a vector field to the boundary loop.
  TraceField trace(const Field& f) const;
  /// Vector field with the given boundary values and zero in the interior.
  Field lift(const TraceField& g) const;

  /// Values of a P1 field at all quadrature points of `set`, point-major
  /// (components() entries per point).
  Eigen::VectorXd evaluate(const Field& f, PointSet set) const;
  /// Values of a trace field at all boundary quadrature points (2 per point).
  Eigen::VectorXd evaluate(const TraceField& g) const;

 private:
  Mesh mesh_;
  QuadratureTable quad_;
  std::vector<CellGeometry> cells_;
  std::vector<EdgeGeometry> edges_;
  std::vector<int> boundary_index_;
};

}  // namespace osmorom::fem
