#include <cmath>
#include <numbers>
#include <sstream>

#include <Eigen/SparseCholesky>
#include <gtest/gtest.h>

#include "osmorom/errors.hpp"
#include "osmorom/fem/forms.hpp"
#include "osmorom/fem/mesh.hpp"
#include "osmorom/fem/space.hpp"

using namespace osmorom;
using namespace osmorom::fem;

namespace {

double max_abs(const SparseMatrix& A) {
  double m = 0.0;
  for (int k = 0; k < A.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(A, k); it; ++it) m = std::max(m, std::abs(it.value()));
  return m;
}

// Area of the regular polygon inscribed in the unit circle.
double inscribed_area(int n) { return 0.5 * n * std::sin(2.0 * std::numbers::pi / n); }

}  // namespace

TEST(DiskMesh, BoundaryVerticesOnUnitCircle) {
  const Mesh m = generate_disk_mesh(0.5);
  for (int v : m.boundary_vertices) EXPECT_NEAR(m.vertices[v].norm(), 1.0, 1e-12);
  EXPECT_NO_THROW(m.validate());
}

TEST(DiskMesh, SizeAndCountBounds) {
  for (double h : {0.5, 0.3, 0.2, 0.1, 0.05}) {
    const Mesh m = generate_disk_mesh(h);
    EXPECT_LE(m.max_cell_size(), 2.0 * h) << h;
    EXPECT_GE(m.num_boundary_vertices(), static_cast<int>(std::ceil(2.0 * std::numbers::pi / h))) << h;
    const double a = m.total_area();
    EXPECT_GT(a, std::numbers::pi - std::numbers::pi * h * h);
    EXPECT_LT(a, std::numbers::pi);
    // The boundary is a regular polygon, so the area is exactly the inscribed one.
    EXPECT_NEAR(a, inscribed_area(m.num_boundary_vertices()), 1e-12);
  }
}

TEST(DiskMesh, FineMeshAreaCloseToPi) {
  const Mesh m = generate_disk_mesh(0.05);
  EXPECT_LT(std::abs(m.total_area() - std::numbers::pi) / std::numbers::pi, 3e-3);
}

TEST(DiskMesh, RejectsInvalidTarget) {
  EXPECT_THROW(generate_disk_mesh(0.0), MeshGenerationFailure);
  EXPECT_THROW(generate_disk_mesh(1.5), MeshGenerationFailure);
}

TEST(DiskMesh, HasVertexAtAngleZero) {
  const Mesh m = generate_disk_mesh(0.2);
  bool found = false;
  for (int v : m.boundary_vertices) found |= (m.vertices[v] - Point(1.0, 0.0)).norm() < 1e-15;
  EXPECT_TRUE(found);
}

TEST(LocalMeshSize, Diameters) {
  Mesh m;
  const double s = 0.7;
  m.vertices = {Point(0, 0), Point(s, 0), Point(0.5 * s, 0.5 * std::sqrt(3.0) * s)};
  m.cells = {{0, 1, 2}};
  EXPECT_NEAR(local_mesh_size(m)[0], s, 1e-15);
  m.vertices = {Point(0, 0), Point(3, 0), Point(0, 4)};
  EXPECT_DOUBLE_EQ(local_mesh_size(m)[0], 5.0);
}

TEST(MeshIo, RoundTripIsBitExact) {
  const Mesh m = generate_disk_mesh(0.3);
  std::stringstream ss;
  write_mesh(ss, m);
  const std::string first = ss.str();
  EXPECT_EQ(first.rfind("vertices ", 0), 0u);
  const Mesh r = read_mesh(ss);
  ASSERT_EQ(r.num_vertices(), m.num_vertices());
  for (int v = 0; v < m.num_vertices(); ++v) EXPECT_EQ(r.vertices[v], m.vertices[v]);
  EXPECT_EQ(r.cells, m.cells);
  EXPECT_EQ(r.boundary_edges, m.boundary_edges);
  EXPECT_EQ(r.boundary_vertices, m.boundary_vertices);
  std::stringstream again;
  write_mesh(again, r);
  EXPECT_EQ(again.str(), first);
}

TEST(MeshIo, TruncatedInputFails) {
  std::stringstream ss("vertices 3 cells 1 bedges 3\n0 0\n1 0\n");
  EXPECT_THROW(read_mesh(ss), MeshFormatError);
}

TEST(Quadrature, WeightsAndExactness) {
  const auto q = QuadratureTable::degree4();
  double ws = 0.0;
  for (double w : q.volume_weights) {
    EXPECT_GT(w, 0.0);
    ws += w;
  }
  EXPECT_NEAR(ws, 0.5, 1e-15);
  // x^2 y^2 over the reference triangle equals 2! 2! / 6! = 1/180.
  double val = 0.0;
  for (int i = 0; i < q.volume_size(); ++i) {
    const double x = q.volume_points[i][1];
    const double y = q.volume_points[i][2];
    val += q.volume_weights[i] * x * x * y * y;
  }
  EXPECT_NEAR(val, 1.0 / 180.0, 1e-13);
  double es = 0.0, e4 = 0.0;
  for (int i = 0; i < q.boundary_size(); ++i) {
    es += q.boundary_weights[i];
    e4 += q.boundary_weights[i] * std::pow(q.boundary_points[i], 4);
  }
  EXPECT_NEAR(es, 1.0, 1e-15);
  EXPECT_NEAR(e4, 0.2, 1e-15);
}

class DiscretizationTest : public ::testing::Test {
 protected:
  Discretization disc{generate_disk_mesh(0.2)};
};

TEST_F(DiscretizationTest, InterpolationBasics) {
  const Field one = disc.interpolate([](const Point&) { return 1.0; });
  EXPECT_TRUE((one.values.array() == 1.0).all());
  const Field x1 = disc.interpolate([](const Point& x) { return x.x(); });
  for (int v = 0; v < disc.num_vertices(); ++v) EXPECT_EQ(x1.values[v], disc.mesh().vertices[v].x());
  const Field r2 = disc.interpolate([](const Point& x) { return x.squaredNorm(); });
  for (int b : disc.mesh().boundary_vertices) EXPECT_NEAR(r2.values[b], 1.0, 1e-12);
  EXPECT_THROW(disc.interpolate([](const Point&) { return std::nan(""); }), NonFiniteValue);
}

TEST_F(DiscretizationTest, BoundaryInterpolation) {
  const TraceField n = disc.interpolate_boundary([](const Point& x) { return x; });
  for (int b = 0; b < disc.num_boundary(); ++b) {
    const Point& x = disc.mesh().vertices[disc.mesh().boundary_vertices[b]];
    EXPECT_EQ(n.values[2 * b], x.x());
    EXPECT_EQ(n.values[2 * b + 1], x.y());
  }
  const TraceField z = disc.interpolate_boundary([](const Point&) { return Point(0, 0); });
  EXPECT_EQ(z.values.norm(), 0.0);
  const TraceField r1 =
      disc.interpolate_boundary([](const Point& x) { return std::exp(-std::pow(std::atan2(x.y(), x.x()), 2)) * x; });
  bool checked = false;
  for (int b = 0; b < disc.num_boundary(); ++b) {
    const Point& x = disc.mesh().vertices[disc.mesh().boundary_vertices[b]];
    if (x == Point(1.0, 0.0)) {
      EXPECT_EQ(r1.values[2 * b], 1.0);
      EXPECT_EQ(r1.values[2 * b + 1], 0.0);
      checked = true;
    }
  }
  EXPECT_TRUE(checked);
}

TEST_F(DiscretizationTest, AffineReproductionAtBarycenters) {
  auto f = [](const Point& x) { return 0.3 + 1.7 * x.x() - 2.2 * x.y(); };
  const Field u = disc.interpolate(f);
  for (int t = 0; t < disc.num_cells(); ++t) {
    const auto& c = disc.cell(t).vertices;
    Point bc = Point::Zero();
    double val = 0.0;
    for (int i = 0; i < 3; ++i) {
      bc += disc.mesh().vertices[c[i]] / 3.0;
      val += u.values[c[i]] / 3.0;
    }
    EXPECT_NEAR(val, f(bc), 1e-12);
  }
}

TEST_F(DiscretizationTest, InnerProducts) {
  const double area = disc.mesh().total_area();
  const double perim = disc.mesh().perimeter();
  const InnerProduct h1 = inner_product_matrix(disc, InnerProductKind::h1_scalar);
  const Eigen::VectorXd one = Eigen::VectorXd::Ones(disc.scalar_dofs());
  EXPECT_NEAR(one.dot(h1.matrix * one), area, 1e-12 * area);
  const InnerProduct l2b = inner_product_matrix(disc, InnerProductKind::l2_boundary_vector);
  Eigen::VectorXd e1 = Eigen::VectorXd::Zero(disc.trace_dofs());
  for (int b = 0; b < disc.num_boundary(); ++b) e1[2 * b] = 1.0;
  EXPECT_NEAR(e1.dot(l2b.matrix * e1), perim, 1e-12 * perim);
  EXPECT_NEAR(perim, 2.0 * std::numbers::pi, 0.05);
  for (auto kind : {InnerProductKind::h1_scalar, InnerProductKind::h1_vector, InnerProductKind::l2_boundary_vector}) {
    const InnerProduct ip = inner_product_matrix(disc, kind);
    const SparseMatrix asym = ip.matrix - SparseMatrix(ip.matrix.transpose());
    EXPECT_LE(max_abs(asym), 1e-12 * max_abs(ip.matrix));
    Eigen::SimplicialLLT<SparseMatrix> llt(ip.matrix);
    EXPECT_EQ(llt.info(), Eigen::Success);
  }
}

TEST_F(DiscretizationTest, FormBasics) {
  const std::vector<double> ones(disc.volume_points(), 1.0);
  const SparseMatrix A3 = assemble_bilinear(disc, FormId::a3, ones);
  const Eigen::VectorXd one = Eigen::VectorXd::Ones(disc.scalar_dofs());
  EXPECT_NEAR(one.dot(A3 * one), disc.mesh().total_area(), 1e-12 * disc.mesh().total_area());
  EXPECT_LE(max_abs(A3 - mass_matrix(disc)), 1e-12 * max_abs(A3));

  std::vector<double> ident(4 * disc.volume_points());
  for (int p = 0; p < disc.volume_points(); ++p) {
    ident[4 * p] = 1.0;
    ident[4 * p + 3] = 1.0;
  }
  const SparseMatrix A5 = assemble_bilinear(disc, FormId::a5, ident);
  EXPECT_LE(max_abs(A5 - stiffness_matrix(disc)), 1e-12 * max_abs(A5));
  // Row of the constant test function vanishes for every trial function.
  const Eigen::VectorXd row = A5.transpose() * one;
  EXPECT_LE(row.cwiseAbs().maxCoeff(), 1e-12);

  const std::vector<double> zeros(2 * disc.volume_points(), 0.0);
  EXPECT_EQ(max_abs(assemble_bilinear(disc, FormId::a4, zeros)), 0.0);

  EXPECT_THROW(assemble_bilinear(disc, FormId::a5, ones), ShapeMismatch);
  EXPECT_THROW(assemble_linear(disc, FormId::a1, ones), ShapeMismatch);
}

TEST_F(DiscretizationTest, FormsAreLinearInCoefficients) {
  std::srand(7);
  for (FormId id : {FormId::a1, FormId::a2, FormId::a3, FormId::a4, FormId::a5, FormId::l1, FormId::l2}) {
    const int n = disc.num_points(form_point_set(id)) * form_components(id);
    const Eigen::VectorXd c1 = Eigen::VectorXd::Random(n);
    const Eigen::VectorXd c2 = Eigen::VectorXd::Random(n);
    const Eigen::VectorXd c12 = c1 + c2;
    if (is_bilinear(id)) {
      const SparseMatrix A = assemble_bilinear(disc, id, c12);
      const SparseMatrix B = assemble_bilinear(disc, id, c1) + assemble_bilinear(disc, id, c2);
      EXPECT_LE(max_abs(A - B), 1e-12 * max_abs(A)) << form_name(id);
    } else {
      const Eigen::VectorXd a = assemble_linear(disc, id, c12);
      const Eigen::VectorXd b = assemble_linear(disc, id, c1) + assemble_linear(disc, id, c2);
      EXPECT_LE((a - b).cwiseAbs().maxCoeff(), 1e-12 * a.cwiseAbs().maxCoeff()) << form_name(id);
    }
  }
}

TEST_F(DiscretizationTest, TangentialStiffnessOfIdentity) {
  // With c2 = P (reference geometry) the a2 form is the edge-wise tangential
  // stiffness; applied to the identity trace it annihilates constants.
  std::vector<double> c2(4 * disc.boundary_points());
  const int nq = disc.quadrature().boundary_size();
  for (int p = 0; p < disc.boundary_points(); ++p) {
    const Point n = disc.edge(p / nq).normal;
    const Eigen::Matrix2d P = Eigen::Matrix2d::Identity() - n * n.transpose();
    c2[4 * p] = P(0, 0);
    c2[4 * p + 1] = P(0, 1);
    c2[4 * p + 2] = P(1, 0);
    c2[4 * p + 3] = P(1, 1);
  }
  const SparseMatrix A2 = assemble_bilinear(disc, FormId::a2, c2);
  Eigen::VectorXd c = Eigen::VectorXd::Zero(disc.trace_dofs());
  for (int b = 0; b < disc.num_boundary(); ++b) c[2 * b] = 1.0;
  EXPECT_LE((A2 * c).cwiseAbs().maxCoeff(), 1e-12);
}
