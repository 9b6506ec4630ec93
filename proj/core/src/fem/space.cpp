#include "osmorom/fem/space.hpp"

#include <cmath>
#include <map>

#include "osmorom/errors.hpp"

namespace osmorom::fem {

namespace {

void require_finite(double v, const char* what) {
  if (!std::isfinite(v)) throw NonFiniteValue(std::string(what) + " produced a non-finite value");
}

}  // namespace

Discretization::Discretization(Mesh mesh, QuadratureTable quadrature)
    : mesh_(std::move(mesh)), quad_(std::move(quadrature)) {
  cells_.reserve(mesh_.cells.size());
  for (int t = 0; t < mesh_.num_cells(); ++t) {
    const auto& c = mesh_.cells[t];
    const Point& x0 = mesh_.vertices[c[0]];
    const Point& x1 = mesh_.vertices[c[1]];
    const Point& x2 = mesh_.vertices[c[2]];
    Eigen::Matrix2d B;
    B.col(0) = x1 - x0;
    B.col(1) = x2 - x0;
    const double det = B.determinant();
    if (!(det > 0.0)) throw MeshGenerationFailure("inverted cell in discretization");
    // Gradients of lambda_1, lambda_2 are the rows of B^{-1}.
    const Eigen::Matrix2d Binv = B.inverse();
    CellGeometry g;
    g.vertices = c;
    g.area = 0.5 * det;
    g.grad.row(1) = Binv.row(0);
    g.grad.row(2) = Binv.row(1);
    g.grad.row(0) = -g.grad.row(1) - g.grad.row(2);
    cells_.push_back(g);
  }

  boundary_index_.assign(mesh_.num_vertices(), -1);
  for (int b = 0; b < mesh_.num_boundary_vertices(); ++b) boundary_index_[mesh_.boundary_vertices[b]] = b;

  std::map<std::pair<int, int>, int> edge_cell;
  for (int t = 0; t < mesh_.num_cells(); ++t) {
    const auto& c = mesh_.cells[t];
    for (int i = 0; i < 3; ++i) {
      int a = c[i];
      int b = c[(i + 1) % 3];
      if (boundary_index_[a] >= 0 && boundary_index_[b] >= 0) edge_cell[{std::min(a, b), std::max(a, b)}] = t;
    }
  }
  edges_.reserve(mesh_.boundary_edges.size());
  for (const auto& e : mesh_.boundary_edges) {
    EdgeGeometry g;
    g.vertices = e;
    g.trace = {boundary_index_[e[0]], boundary_index_[e[1]]};
    const Point d = mesh_.vertices[e[1]] - mesh_.vertices[e[0]];
    g.length = d.norm();
    g.tangent = d / g.length;
    g.normal = Point(g.tangent.y(), -g.tangent.x());
    auto it = edge_cell.find({std::min(e[0], e[1]), std::max(e[0], e[1])});
    if (it == edge_cell.end()) throw MeshGenerationFailure("boundary edge without adjacent cell");
    g.cell = it->second;
    edges_.push_back(g);
  }
}

int Discretization::num_points(PointSet set) const {
  return set == PointSet::volume ? num_cells() * quad_.volume_size()
                                 : mesh_.num_boundary_edges() * quad_.boundary_size();
}

Point Discretization::point(PointSet set, int p) const {
  if (set == PointSet::volume) {
    const auto& c = cells_[p / quad_.volume_size()];
    const auto& l = quad_.volume_points[p % quad_.volume_size()];
    return l[0] * mesh_.vertices[c.vertices[0]] + l[1] * mesh_.vertices[c.vertices[1]] +
           l[2] * mesh_.vertices[c.vertices[2]];
  }
  const auto& e = edges_[p / quad_.boundary_size()];
  const double s = quad_.boundary_points[p % quad_.boundary_size()];
  return (1.0 - s) * mesh_.vertices[e.vertices[0]] + s * mesh_.vertices[e.vertices[1]];
}

int Discretization::point_cell(PointSet set, int p) const {
  return set == PointSet::volume ? p / quad_.volume_size() : edges_[p / quad_.boundary_size()].cell;
}

const std::array<double, 3>& Discretization::volume_barycentric(int p) const {
  return quad_.volume_points[p % quad_.volume_size()];
}

double Discretization::boundary_parameter(int p) const {
  return quad_.boundary_points[p % quad_.boundary_size()];
}

Field Discretization::interpolate(const std::function<double(const Point&)>& f) const {
  Eigen::VectorXd v(num_vertices());
  for (int i = 0; i < num_vertices(); ++i) {
    v[i] = f(mesh_.vertices[i]);
    require_finite(v[i], "interpolate");
  }
  return Field::scalar(std::move(v));
}

Field Discretization::interpolate_vector(const std::function<Point(const Point&)>& f) const {
  Eigen::VectorXd v(vector_dofs());
  for (int i = 0; i < num_vertices(); ++i) {
    const Point y = f(mesh_.vertices[i]);
    v[2 * i] = y.x();
    v[2 * i + 1] = y.y();
    require_finite(y.x(), "interpolate_vector");
    require_finite(y.y(), "interpolate_vector");
  }
  return Field::vector(std::move(v));
}

TraceField Discretization::interpolate_boundary(const std::function<Point(const Point&)>& g) const {
  TraceField out{Eigen::VectorXd(trace_dofs())};
  for (int b = 0; b < num_boundary(); ++b) {
    const Point y = g(mesh_.vertices[mesh_.boundary_vertices[b]]);
    require_finite(y.x(), "interpolate_boundary");
    require_finite(y.y(), "interpolate_boundary");
    out.values[2 * b] = y.x();
    out.values[2 * b + 1] = y.y();
  }
  return out;
}

TraceField Discretization::trace(const Field& f) const {
  if (f.kind != FieldKind::vector) throw ShapeMismatch("trace requires a vector field");
  TraceField out{Eigen::VectorXd(trace_dofs())};
  for (int b = 0; b < num_boundary(); ++b) {
    const int v = mesh_.boundary_vertices[b];
    out.values[2 * b] = f.values[2 * v];
    out.values[2 * b + 1] = f.values[2 * v + 1];
  }
  return out;
}

Field Discretization::lift(const TraceField& g) const {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(vector_dofs());
  for (int b = 0; b < num_boundary(); ++b) {
    const int vid = mesh_.boundary_vertices[b];
    v[2 * vid] = g.values[2 * b];
    v[2 * vid + 1] = g.values[2 * b + 1];
  }
  return Field::vector(std::move(v));
}

Eigen::VectorXd Discretization::evaluate(const Field& f, PointSet set) const {
  const int d = f.components();
  const int np = num_points(set);
  Eigen::VectorXd out(np * d);
  if (set == PointSet::volume) {
    const int nq = quad_.volume_size();
    for (int t = 0; t < num_cells(); ++t) {
      const auto& c = cells_[t].vertices;
      for (int q = 0; q < nq; ++q) {
        const auto& l = quad_.volume_points[q];
        for (int k = 0; k < d; ++k) {
          out[(t * nq + q) * d + k] = l[0] * f.values[d * c[0] + k] + l[1] * f.values[d * c[1] + k] +
                                      l[2] * f.values[d * c[2] + k];
        }
      }
    }
  } else {
    const int nq = quad_.boundary_size();
    for (int e = 0; e < mesh_.num_boundary_edges(); ++e) {
      const auto& v = edges_[e].vertices;
      for (int q = 0; q < nq; ++q) {
        const double s = quad_.boundary_points[q];
        for (int k = 0; k < d; ++k) {
          out[(e * nq + q) * d + k] = (1.0 - s) * f.values[d * v[0] + k] + s * f.values[d * v[1] + k];
        }
      }
    }
  }
  return out;
}

Eigen::VectorXd Discretization::evaluate(const TraceField& g) const {
  const int nq = quad_.boundary_size();
  Eigen::VectorXd out(boundary_points() * 2);
  for (int e = 0; e < mesh_.num_boundary_edges(); ++e) {
    const auto& b = edges_[e].trace;
    for (int q = 0; q < nq; ++q) {
      const double s = quad_.boundary_points[q];
      for (int k = 0; k < 2; ++k) {
        out[(e * nq + q) * 2 + k] = (1.0 - s) * g.values[2 * b[0] + k] + s * g.values[2 * b[1] + k];
      }
    }
  }
  return out;
}

}  // namespace osmorom::fem
