#include "osmorom/fem/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>

#include "osmorom/errors.hpp"

namespace osmorom::fem {

double Mesh::signed_area(int cell) const {
  const auto& c = cells[cell];
  const Point e1 = vertices[c[1]] - vertices[c[0]];
  const Point e2 = vertices[c[2]] - vertices[c[0]];
  return 0.5 * (e1.x() * e2.y() - e1.y() * e2.x());
}

double Mesh::total_area() const {
  double a = 0.0;
  for (int t = 0; t < num_cells(); ++t) a += signed_area(t);
  return a;
}

double Mesh::perimeter() const {
  double p = 0.0;
  for (const auto& e : boundary_edges) p += (vertices[e[1]] - vertices[e[0]]).norm();
  return p;
}

double Mesh::max_cell_size() const {
  return cell_size.empty() ? 0.0 : *std::max_element(cell_size.begin(), cell_size.end());
}

void Mesh::validate() const {
  if (cells.empty() || vertices.empty()) throw MeshGenerationFailure("empty mesh");
  for (int t = 0; t < num_cells(); ++t) {
    for (int v : cells[t]) {
      if (v < 0 || v >= num_vertices()) throw MeshGenerationFailure("cell references unknown vertex");
    }
    if (!(signed_area(t) > 0.0)) {
      throw MeshGenerationFailure("cell " + std::to_string(t) + " is inverted or degenerate");
    }
  }
  const int nb = num_boundary_vertices();
  if (nb < 3 || num_boundary_edges() != nb) throw MeshGenerationFailure("boundary is not a closed loop");
  for (int k = 0; k < nb; ++k) {
    const auto& e = boundary_edges[k];
    if (e[0] != boundary_vertices[k] || e[1] != boundary_vertices[(k + 1) % nb]) {
      throw MeshGenerationFailure("boundary edges do not follow the boundary vertex loop");
    }
    if (std::abs(vertices[e[0]].norm() - 1.0) > 1e-12) {
      throw MeshGenerationFailure("boundary vertex off the unit circle");
    }
  }
  // Positive orientation: the enclosed polygon area is positive.
  double shoelace = 0.0;
  for (const auto& e : boundary_edges) {
    const Point& a = vertices[e[0]];
    const Point& b = vertices[e[1]];
    shoelace += a.x() * b.y() - a.y() * b.x();
  }
  if (shoelace <= 0.0) throw MeshGenerationFailure("boundary loop is not positively oriented");
  if (static_cast<int>(cell_size.size()) != num_cells()) throw MeshGenerationFailure("cell_size size mismatch");
}

std::vector<double> local_mesh_size(const Mesh& mesh) {
  std::vector<double> h(mesh.cells.size());
  for (std::size_t t = 0; t < mesh.cells.size(); ++t) {
    const auto& c = mesh.cells[t];
    double d = 0.0;
    for (int i = 0; i < 3; ++i) {
      d = std::max(d, (mesh.vertices[c[(i + 1) % 3]] - mesh.vertices[c[i]]).norm());
    }
    h[t] = d;
  }
  return h;
}

namespace {

struct Ring {
  std::vector<int> ids;
  std::vector<double> angles;  // increasing in [0, 2pi)
};

// Stitches two concentric rings by always advancing along the ring whose next
// vertex has the smaller polar angle.
void stitch(const Ring& inner, const Ring& outer, std::vector<std::array<int, 3>>& cells) {
  const int m = static_cast<int>(inner.ids.size());
  const int n = static_cast<int>(outer.ids.size());
  constexpr double two_pi = 2.0 * std::numbers::pi;
  auto inner_angle = [&](int i) { return i < m ? inner.angles[i] : inner.angles[i - m] + two_pi; };
  auto outer_angle = [&](int k) { return k < n ? outer.angles[k] : outer.angles[k - n] + two_pi; };
  int i = 0;
  int k = 0;
  while (i < m || k < n) {
    const bool advance_outer = k < n && (i == m || outer_angle(k + 1) <= inner_angle(i + 1));
    if (advance_outer) {
      cells.push_back({inner.ids[i % m], outer.ids[k % n], outer.ids[(k + 1) % n]});
      ++k;
    } else {
      cells.push_back({inner.ids[i % m], outer.ids[k % n], inner.ids[(i + 1) % m]});
      ++i;
    }
  }
}

}  // namespace

Mesh generate_disk_mesh(double target_h) {
  if (!(target_h > 0.0 && target_h < 1.0)) {
    throw MeshGenerationFailure("target_h must lie in (0, 1)");
  }
  constexpr double two_pi = 2.0 * std::numbers::pi;
  const int nr = static_cast<int>(std::ceil(1.0 / target_h - 1e-12));

  Mesh mesh;
  mesh.vertices.emplace_back(0.0, 0.0);
  std::vector<Ring> rings;
  for (int j = 1; j <= nr; ++j) {
    const double r = static_cast<double>(j) / nr;
    const int count = static_cast<int>(std::ceil(two_pi * j - 1e-12));
    Ring ring;
    for (int k = 0; k < count; ++k) {
      const double a = two_pi * k / count;
      ring.ids.push_back(mesh.num_vertices());
      ring.angles.push_back(a);
      if (j == nr) {
        mesh.vertices.emplace_back(std::cos(a), std::sin(a));
      } else {
        mesh.vertices.emplace_back(r * std::cos(a), r * std::sin(a));
      }
    }
    rings.push_back(std::move(ring));
  }

  const Ring& first = rings.front();
  const int n1 = static_cast<int>(first.ids.size());
  for (int k = 0; k < n1; ++k) mesh.cells.push_back({0, first.ids[k], first.ids[(k + 1) % n1]});
  for (int j = 1; j < nr; ++j) stitch(rings[j - 1], rings[j], mesh.cells);

  const Ring& outer = rings.back();
  const int nb = static_cast<int>(outer.ids.size());
  mesh.boundary_vertices = outer.ids;
  for (int k = 0; k < nb; ++k) mesh.boundary_edges.push_back({outer.ids[k], outer.ids[(k + 1) % nb]});
  mesh.cell_size = local_mesh_size(mesh);
  mesh.validate();
  return mesh;
}

Mesh generate_square_mesh(double lo, double hi, int n) {
  if (n < 1 || !(hi > lo)) throw MeshGenerationFailure("invalid square mesh request");
  Mesh mesh;
  const double h = (hi - lo) / n;
  for (int j = 0; j <= n; ++j) {
    for (int i = 0; i <= n; ++i) mesh.vertices.emplace_back(lo + i * h, lo + j * h);
  }
  auto id = [n](int i, int j) { return j * (n + 1) + i; };
  for (int j = 0; j < n; ++j) {
    for (int i = 0; i < n; ++i) {
      mesh.cells.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      mesh.cells.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  }
  mesh.cell_size = local_mesh_size(mesh);
  return mesh;
}

void write_mesh(std::ostream& os, const Mesh& mesh) {
  os << "vertices " << mesh.num_vertices() << " cells " << mesh.num_cells() << " bedges "
     << mesh.num_boundary_edges() << '\n';
  os << std::setprecision(17);
  for (const auto& v : mesh.vertices) os << v.x() << ' ' << v.y() << '\n';
  for (const auto& c : mesh.cells) os << c[0] << ' ' << c[1] << ' ' << c[2] << '\n';
  for (const auto& e : mesh.boundary_edges) os << e[0] << ' ' << e[1] << '\n';
}

Mesh read_mesh(std::istream& is) {
  std::string kw_v, kw_c, kw_b;
  long nv = -1, nc = -1, nb = -1;
  if (!(is >> kw_v >> nv >> kw_c >> nc >> kw_b >> nb) || kw_v != "vertices" || kw_c != "cells" ||
      kw_b != "bedges" || nv < 0 || nc < 0 || nb < 0) {
    throw MeshFormatError("malformed mesh header");
  }
  Mesh mesh;
  mesh.vertices.resize(nv);
  mesh.cells.resize(nc);
  mesh.boundary_edges.resize(nb);
  for (auto& v : mesh.vertices) {
    if (!(is >> v.x() >> v.y())) throw MeshFormatError("truncated vertex block");
  }
  for (auto& c : mesh.cells) {
    if (!(is >> c[0] >> c[1] >> c[2])) throw MeshFormatError("truncated cell block");
  }
  for (auto& e : mesh.boundary_edges) {
    if (!(is >> e[0] >> e[1])) throw MeshFormatError("truncated boundary edge block");
  }
  for (const auto& e : mesh.boundary_edges) mesh.boundary_vertices.push_back(e[0]);
  mesh.cell_size = local_mesh_size(mesh);
  return mesh;
}

void save_mesh(const std::string& path, const Mesh& mesh) {
  std::ofstream os(path);
  if (!os) throw MeshFormatError("cannot open " + path + " for writing");
  write_mesh(os, mesh);
}

Mesh load_mesh(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw MeshFormatError("cannot open " + path);
  return read_mesh(is);
}

}  // namespace osmorom::fem
