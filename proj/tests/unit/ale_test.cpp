#include <cmath>

#include <gtest/gtest.h>

#include "osmorom/ale/coefficients.hpp"
#include "osmorom/ale/transform.hpp"
#include "osmorom/errors.hpp"
#include "osmorom/fem/forms.hpp"

using namespace osmorom;
using namespace osmorom::fem;
using osmorom::ale::coefficient_field;

namespace {

class AleTest : public ::testing::Test {
 protected:
  Discretization disc{generate_disk_mesh(0.25)};

  Field scaled(double s) const {
    return disc.interpolate_vector([s](const Point& x) { return Point(s * x); });
  }
};

double max_abs(const SparseMatrix& A) {
  double m = 0.0;
  for (int k = 0; k < A.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(A, k); it; ++it) m = std::max(m, std::abs(it.value()));
  return m;
}

}  // namespace

TEST_F(AleTest, IdentityQuantities) {
  const auto tq = ale::transform_quantities(disc, scaled(1.0));
  for (std::size_t p = 0; p < tq.F.size(); ++p) {
    EXPECT_LE((tq.F[p] - Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_NEAR(tq.J[p], 1.0, 1e-12);
  }
  const int nq = disc.quadrature().boundary_size();
  for (std::size_t p = 0; p < tq.boundary.size(); ++p) {
    const auto& g = tq.boundary[p];
    const Point nref = disc.edge(static_cast<int>(p) / nq).normal;
    EXPECT_NEAR(g.J_gamma, 1.0, 1e-12);
    EXPECT_LE((g.n - nref).norm(), 1e-12);
    EXPECT_NEAR(g.n.norm(), 1.0, 1e-12);
    EXPECT_LE((g.P * g.P - g.P).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LE((g.P * g.n).norm(), 1e-12);
  }
}

TEST_F(AleTest, UniformScaling) {
  const auto tq = ale::transform_quantities(disc, scaled(2.0));
  for (double J : tq.J) EXPECT_NEAR(J, 4.0, 1e-12);
  const int nq = disc.quadrature().boundary_size();
  for (std::size_t p = 0; p < tq.boundary.size(); ++p) {
    EXPECT_NEAR(tq.boundary[p].J_gamma, 2.0, 1e-12);
    EXPECT_LE((tq.boundary[p].n - disc.edge(static_cast<int>(p) / nq).normal).norm(), 1e-12);
  }
}

TEST_F(AleTest, ReflectionIsDegenerate) {
  const Field flip = disc.interpolate_vector([](const Point& x) { return Point(x.x(), -x.y()); });
  EXPECT_THROW(ale::transform_quantities(disc, flip), DegenerateMapping);
  EXPECT_THROW(coefficient_field(disc, 3, flip), DegenerateMapping);
}

TEST_F(AleTest, CoefficientValuesForSimpleMaps) {
  const auto c3 = coefficient_field(disc, 3, scaled(1.0));
  const auto c5 = coefficient_field(disc, 5, scaled(1.0));
  const auto c1 = coefficient_field(disc, 1, scaled(1.0));
  EXPECT_LE((c3.values.array() - 1.0).abs().maxCoeff(), 1e-12);
  EXPECT_LE((c1.values.array() - 1.0).abs().maxCoeff(), 1e-12);
  for (int p = 0; p < disc.volume_points(); ++p) {
    EXPECT_NEAR(c5.values[4 * p], 1.0, 1e-12);
    EXPECT_NEAR(c5.values[4 * p + 1], 0.0, 1e-12);
    EXPECT_NEAR(c5.values[4 * p + 3], 1.0, 1e-12);
  }
  const auto c3s = coefficient_field(disc, 3, scaled(2.0));
  const auto c5s = coefficient_field(disc, 5, scaled(2.0));
  EXPECT_LE((c3s.values.array() - 4.0).abs().maxCoeff(), 1e-12);
  for (int p = 0; p < disc.volume_points(); ++p) {
    EXPECT_NEAR(c5s.values[4 * p], 1.0, 1e-12);
    EXPECT_NEAR(c5s.values[4 * p + 3], 1.0, 1e-12);
  }

  const Field eta = disc.interpolate_vector([](const Point&) { return Point(1.0, 0.0); });
  const auto c4 = ale::coefficient_field_c4(disc, scaled(1.0), eta);
  for (int p = 0; p < disc.volume_points(); ++p) {
    EXPECT_NEAR(c4.values[2 * p], 1.0, 1e-12);
    EXPECT_NEAR(c4.values[2 * p + 1], 0.0, 1e-12);
  }
  const Field two = disc.interpolate([](const Point&) { return 2.0; });
  const auto c7 = ale::coefficient_field_c7(disc, scaled(1.0), two);
  const int nq = disc.quadrature().boundary_size();
  for (int p = 0; p < disc.boundary_points(); ++p) {
    const Point n = disc.edge(p / nq).normal;
    EXPECT_NEAR(c7.values[2 * p], 2.0 * n.x(), 1e-12);
    EXPECT_NEAR(c7.values[2 * p + 1], 2.0 * n.y(), 1e-12);
  }
}

TEST_F(AleTest, ComponentCountsAndSets) {
  const int expected[] = {0, 1, 4, 1, 2, 4, 4, 2};
  for (int i = 1; i <= 7; ++i) {
    EXPECT_EQ(ale::coefficient_components(i), expected[i]);
    EXPECT_EQ(ale::coefficient_components(i), form_components(form_of_coefficient(i)));
    EXPECT_EQ(ale::coefficient_point_set(i), form_point_set(form_of_coefficient(i)));
  }
}

TEST_F(AleTest, IdentityReproducesPlainForms) {
  const auto c3 = coefficient_field(disc, 3, scaled(1.0));
  const SparseMatrix A = assemble_bilinear(disc, FormId::a3, c3.values);
  EXPECT_LE(max_abs(A - mass_matrix(disc)), 1e-12 * max_abs(A));
  const auto c5 = coefficient_field(disc, 5, scaled(1.0));
  const SparseMatrix K = assemble_bilinear(disc, FormId::a5, c5.values);
  EXPECT_LE(max_abs(K - stiffness_matrix(disc)), 1e-12 * max_abs(K));
}

TEST_F(AleTest, PullbackAreaScaling) {
  const Eigen::VectorXd one = Eigen::VectorXd::Ones(disc.scalar_dofs());
  const double area = disc.mesh().total_area();
  for (double s : {0.5, 1.5}) {
    const auto c3 = coefficient_field(disc, 3, scaled(s));
    const double m = one.dot(assemble_bilinear(disc, FormId::a3, c3.values) * one);
    EXPECT_NEAR(m, s * s * area, 1e-10 * s * s * area);
  }
}

TEST_F(AleTest, SymmetricTensorsUnderGeneralMap) {
  const Field psi = disc.interpolate_vector([](const Point& x) {
    return Point(x.x() + 0.2 * x.y() * x.y() + 0.1 * x.x() * x.y(), x.y() + 0.15 * std::sin(x.x()));
  });
  for (int i : {2, 5}) {
    const auto c = coefficient_field(disc, i, psi);
    const int np = static_cast<int>(c.values.size() / 4);
    for (int p = 0; p < np; ++p) EXPECT_NEAR(c.values[4 * p + 1], c.values[4 * p + 2], 1e-12) << i;
  }
  // J_Gamma = |F^{-T} n_ref| J pointwise.
  const auto tq = ale::transform_quantities(disc, psi);
  const int nq = disc.quadrature().boundary_size();
  for (std::size_t p = 0; p < tq.boundary.size(); ++p) {
    const auto& g = tq.boundary[p];
    const Point nref = disc.edge(static_cast<int>(p) / nq).normal;
    EXPECT_NEAR(g.J_gamma, (g.F.inverse().transpose() * nref).norm() * g.F.determinant(), 1e-13);
    EXPECT_NEAR(g.J, g.F.determinant(), 1e-14);
  }
}

TEST_F(AleTest, BoundaryLengthRatioMatchesMappedEdges) {
  // For P1 maps J_Gamma is exactly the ratio of mapped to reference edge length.
  const Field psi = disc.interpolate_vector([](const Point& x) { return Point(1.3 * x.x() + 0.2 * x.y() * x.y(), 0.8 * x.y()); });
  const auto c1 = coefficient_field(disc, 1, psi);
  const int nq = disc.quadrature().boundary_size();
  for (int e = 0; e < disc.mesh().num_boundary_edges(); ++e) {
    const auto& edge = disc.edge(e);
    const Point a(psi.values[2 * edge.vertices[0]], psi.values[2 * edge.vertices[0] + 1]);
    const Point b(psi.values[2 * edge.vertices[1]], psi.values[2 * edge.vertices[1] + 1]);
    EXPECT_NEAR(c1.values[e * nq], (b - a).norm() / edge.length, 1e-12);
  }
}
