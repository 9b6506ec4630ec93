#pragma once

#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace osmorom::fem {

using Point = Eigen::Vector2d;

/// Simplicial triangulation of the reference disk.
///
/// Cells are counterclockwise vertex triples. The boundary is stored as one
/// closed, positively oriented loop: `boundary_vertices[k]` and
/// `boundary_vertices[k+1 mod nb]` are the endpoints of `boundary_edges[k]`.
/// A trace degree of freedom is addressed by its position in that loop.
struct Mesh {
  std::vector<Point> vertices;
  std::vector<std::array<int, 3>> cells;
  std::vector<std::array<int, 2>> boundary_edges;
  std::vector<int> boundary_vertices;
  std::vector<double> cell_size;

  int num_vertices() const { return static_cast<int>(vertices.size()); }
  int num_cells() const { return static_cast<int>(cells.size()); }
  int num_boundary_vertices() const { return static_cast<int>(boundary_vertices.size()); }
  int num_boundary_edges() const { return static_cast<int>(boundary_edges.size()); }

  double signed_area(int cell) const;
  double total_area() const;
  double perimeter() const;
  double max_cell_size() const;

  /// Throws MeshGenerationFailure if any structural invariant is violated.
  void validate() const;
};

/// Concentric-ring triangulation of the unit disk with ring spacing at most
/// `target_h`. Boundary vertices sit exactly on the unit circle.
Mesh generate_disk_mesh(double target_h);

/// Longest edge of every cell.
std::vector<double> local_mesh_size(const Mesh& mesh);

/// Axis-aligned structured triangulation of [lo, hi]^2 with `n` intervals per
/// axis. Only used for embedding fields into a fixed background domain.
Mesh generate_square_mesh(double lo, double hi, int n);

/// Plain-text mesh format: header `vertices N cells M bedges K`, then the
/// coordinate rows, the cell rows and the boundary edge rows.
void write_mesh(std::ostream& os, const Mesh& mesh);
Mesh read_mesh(std::istream& is);
void save_mesh(const std::string& path, const Mesh& mesh);
Mesh load_mesh(const std::string& path);

}  // namespace osmorom::fem
