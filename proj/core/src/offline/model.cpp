#include "osmorom/offline/model.hpp"

#include "osmorom/ale/coefficients.hpp"
#include "osmorom/errors.hpp"
#include "osmorom/fem/forms.hpp"

namespace osmorom::offline {

using fem::FormId;
using fem::InnerProductKind;

namespace {

// Vertices and P1 weights of a quadrature point (boundary points use the two
// edge vertices and a zero third weight).
struct PointStencil {
  std::array<int, 3> vertices;
  std::array<double, 3> weights;
};

PointStencil stencil(const fem::Discretization& disc, fem::PointSet set, int p) {
  PointStencil st;
  if (set == fem::PointSet::volume) {
    st.vertices = disc.cell(disc.point_cell(set, p)).vertices;
    st.weights = disc.volume_barycentric(p);
  } else {
    const auto& e = disc.edge(p / disc.quadrature().boundary_size());
    const double s = disc.boundary_parameter(p);
    st.vertices = {e.vertices[0], e.vertices[1], e.vertices[0]};
    st.weights = {1.0 - s, s, 0.0};
  }
  return st;
}

// Cell Jacobian increment of a vector P1 field: G_ab = d_b v_a.
Eigen::Matrix2d cell_gradient(const fem::CellGeometry& cell, const Eigen::Ref<const Eigen::VectorXd>& v) {
  Eigen::Matrix2d G = Eigen::Matrix2d::Zero();
  for (int i = 0; i < 3; ++i) {
    const Eigen::Vector2d val(v[2 * cell.vertices[i]], v[2 * cell.vertices[i] + 1]);
    G.noalias() += val * cell.grad.row(i);
  }
  return G;
}

InterpolationGeometry interpolation_geometry(const fem::Discretization& disc, const EimData& eim,
                                             const BasisSet& b) {
  InterpolationGeometry g;
  const int M = eim.size();
  const int Kd = b.def.size();
  const int Kc = b.conc.size();
  g.component.resize(M);
  g.dF.resize(M, 4 * Kd);
  g.eta.resize(M, 2 * Kd);
  g.phi.resize(M, Kc);
  g.normal = Eigen::MatrixXd::Zero(M, 2);
  g.interpolation = eim.interpolation;
  for (int m = 0; m < M; ++m) {
    const int p = eim.point(m);
    g.component[m] = eim.component(m);
    const auto& cell = disc.cell(disc.point_cell(eim.set, p));
    const PointStencil st = stencil(disc, eim.set, p);
    for (int k = 0; k < Kd; ++k) {
      const Eigen::Matrix2d G = cell_gradient(cell, b.def.modes.col(k));
      g.dF(m, 4 * k) = G(0, 0);
      g.dF(m, 4 * k + 1) = G(0, 1);
      g.dF(m, 4 * k + 2) = G(1, 0);
      g.dF(m, 4 * k + 3) = G(1, 1);
      for (int c = 0; c < 2; ++c) {
        double v = 0.0;
        for (int a = 0; a < 3; ++a) v += st.weights[a] * b.def.modes(2 * st.vertices[a] + c, k);
        g.eta(m, 2 * k + c) = v;
      }
    }
    for (int j = 0; j < Kc; ++j) {
      double v = 0.0;
      for (int a = 0; a < 3; ++a) v += st.weights[a] * b.conc.modes(st.vertices[a], j);
      g.phi(m, j) = v;
    }
    if (eim.set == fem::PointSet::boundary) {
      g.normal.row(m) = disc.edge(p / disc.quadrature().boundary_size()).normal.transpose();
    }
  }
  return g;
}

// Selects rows/cols of a tensor stored with a combined index a * n + b.
Eigen::VectorXi pair_index(int n_old, int n_new) {
  Eigen::VectorXi idx(n_new * n_new);
  for (int a = 0; a < n_new; ++a)
    for (int b = 0; b < n_new; ++b) idx[a * n_new + b] = a * n_old + b;
  return idx;
}

Eigen::MatrixXd select(const Eigen::MatrixXd& A, const Eigen::VectorXi& rows, const Eigen::VectorXi& cols) {
  Eigen::MatrixXd out(rows.size(), cols.size());
  for (Eigen::Index i = 0; i < rows.size(); ++i)
    for (Eigen::Index j = 0; j < cols.size(); ++j) out(i, j) = A(rows[i], cols[j]);
  return out;
}

Eigen::VectorXi prefix(int n) { return Eigen::VectorXi::LinSpaced(n, 0, n - 1); }

}  // namespace

std::array<int, 7> ReducedModel::eim_sizes() const {
  std::array<int, 7> s{};
  for (int i = 0; i < 7; ++i) s[i] = geometry[i].size();
  return s;
}

ReducedModel ReducedModel::truncated(int kb, int kd, int kc, const std::array<int, 7>& msz) const {
  if (kb < 1 || kb > k_bnd() || kd < 1 || kd > k_def() || kc < 1 || kc > k_conc()) {
    throw DimensionMismatch("truncation sizes exceed the model");
  }
  for (int i = 0; i < 7; ++i)
    if (msz[i] < 0 || msz[i] > m(i + 1)) throw DimensionMismatch("EIM truncation exceeds the model");
  ReducedModel r;
  r.config = config;
  r.num_shapes = num_shapes;
  r.bnd = bnd.truncated(kb);
  r.def = def.truncated(kd);
  r.conc = conc.truncated(kc);
  const int kdim[5] = {kb, kb, kc, kc, kc};
  for (int i = 0; i < 7; ++i) {
    r.eim[i] = eim[i].size() >= msz[i] ? eim[i].truncated(msz[i]) : eim[i];
    const auto& g = geometry[i];
    auto& t = r.geometry[i];
    const int M = msz[i];
    t.component.assign(g.component.begin(), g.component.begin() + M);
    t.dF = g.dF.topLeftCorner(M, 4 * kd);
    t.eta = g.eta.topLeftCorner(M, 2 * kd);
    t.phi = g.phi.topLeftCorner(M, kc);
    t.normal = g.normal.topRows(M);
    t.interpolation = g.interpolation.topLeftCorner(M, M);
  }
  for (int f = 0; f < 5; ++f) {
    for (int m = 0; m < msz[f]; ++m) r.a[f].push_back(a[f][m].topLeftCorner(kdim[f], kdim[f]));
  }
  for (int f = 0; f < 2; ++f) {
    for (int m = 0; m < msz[5 + f]; ++m) r.l[f].push_back(l[f][m].head(kb));
  }
  r.extension = extension.topLeftCorner(kd, kb);
  r.u0 = u0.head(kc);
  r.shapes0 = shapes0.topRows(kd);
  r.norm_one = norm_one;
  r.mass0 = mass0.head(kc);
  r.mass1 = mass1.topLeftCorner(kc, kd);
  r.mass2 = select(mass2, prefix(kc), pair_index(k_def(), kd));
  r.has_variance = has_variance;
  if (has_variance) {
    const Eigen::VectorXi rows = pair_index(k_conc(), kc);
    r.var0 = var0.topLeftCorner(kc, kc);
    r.var1 = select(var1, rows, prefix(kd));
    r.var2 = select(var2, rows, pair_index(k_def(), kd));
  }
  return r;
}

ReducedModel ReducedModel::truncated_to(double eps_rb, double eps_ei) const {
  auto size_for = [&](const ReducedBasis& b) {
    const auto& sv = b.singular_values;
    if (sv.size() == 0 || !(sv.maxCoeff() > 0.0)) return b.size();
    int k;
    if (b.constant_included) {
      const double ref = sv.maxCoeff();
      k = 1 + truncation_size(sv.tail(sv.size() - 1), ref, eps_rb);
    } else {
      k = std::max(1, truncation_size(sv, sv[0], eps_rb));
    }
    return std::min(k, b.size());
  };
  std::array<int, 7> msz{};
  for (int i = 0; i < 7; ++i) msz[i] = eim[i].size() > 0 ? std::min(eim[i].size_for(eps_ei), m(i + 1)) : m(i + 1);
  ReducedModel r = truncated(size_for(bnd), size_for(def), size_for(conc), msz);
  r.config.eps_rb = eps_rb;
  r.config.eps_ei = eps_ei;
  r.bnd.eps_rb = r.def.eps_rb = r.conc.eps_rb = eps_rb;
  for (auto& e : r.eim) e.eps_ei = eps_ei;
  return r;
}

BasisSet build_bases(const fom::FomSolver& solver, const Campaign& campaign, const TrainingConfig& config) {
  const auto& disc = solver.discretization();
  const auto ip_b = fem::inner_product_matrix(disc, InnerProductKind::l2_boundary_vector);
  const auto ip_d = fem::inner_product_matrix(disc, InnerProductKind::h1_vector);
  const auto ip_c = fem::inner_product_matrix(disc, InnerProductKind::h1_scalar);
  BasisSet b;
  if (config.complete_bases) {
    b.bnd = complete_basis(ip_b, false);
    b.def = complete_basis(ip_d, false);
    b.conc = complete_basis(ip_c, true);
    return b;
  }
  b.bnd = pod(collect_snapshots(solver, campaign, SnapshotKind::boundary_velocity).vectors, ip_b, config.eps_rb,
              false, config.max_modes);
  b.def = pod(collect_snapshots(solver, campaign, SnapshotKind::deformation).vectors, ip_d, config.eps_rb, false,
              config.max_modes);
  b.conc = pod(collect_snapshots(solver, campaign, SnapshotKind::concentration).vectors, ip_c, config.eps_rb, true,
               config.max_modes > 0 ? config.max_modes - 1 : config.max_modes);
  return b;
}

std::array<EimData, 7> build_eim(const fom::FomSolver& solver, const Campaign& campaign,
                                 const TrainingConfig& config) {
  std::array<EimData, 7> out;
  for (int i = 1; i <= 7; ++i) {
    out[i - 1] = eim_greedy(build_training_set(solver, campaign, i), config.eps_ei, config.max_eim);
  }
  return out;
}

ReducedModel project_operators(const fom::FomSolver& solver, const BasisSet& bases, std::array<EimData, 7> eim,
                               const TrainingConfig& config) {
  const auto& disc = solver.discretization();
  ReducedModel r;
  r.config = config;
  r.num_shapes = solver.num_shapes();
  r.bnd = bases.bnd;
  r.def = bases.def;
  r.conc = bases.conc;
  if (!r.conc.constant_included) throw DimensionMismatch("concentration basis must start with the constant");
  const Eigen::MatrixXd& Vb = r.bnd.modes;
  const Eigen::MatrixXd& Vd = r.def.modes;
  const Eigen::MatrixXd& Vc = r.conc.modes;
  if (Vb.rows() != disc.trace_dofs() || Vd.rows() != disc.vector_dofs() || Vc.rows() != disc.scalar_dofs()) {
    throw DimensionMismatch("basis lengths do not match the mesh");
  }

  for (int i = 1; i <= 7; ++i) {
    const EimData& e = eim[i - 1];
    if (e.id != i || e.components != ale::coefficient_components(i) ||
        e.basis.rows() != static_cast<Eigen::Index>(disc.num_points(e.set)) * e.components) {
      throw DimensionMismatch("EIM data for c" + std::to_string(i) + " does not match the mesh");
    }
    r.geometry[i - 1] = interpolation_geometry(disc, e, bases);
    const FormId form = fem::form_of_coefficient(i);
    for (int m = 0; m < e.size(); ++m) {
      const Eigen::VectorXd cm = e.basis.col(m);
      if (i <= 5) {
        const fem::SparseMatrix A = fem::assemble_bilinear(disc, form, cm);
        const Eigen::MatrixXd& V = (i <= 2) ? Vb : Vc;
        r.a[i - 1].push_back(V.transpose() * (A * V));
      } else {
        r.l[i - 6].push_back(Vb.transpose() * fem::assemble_linear(disc, form, cm));
      }
    }
  }
  r.eim = std::move(eim);

  const auto ip_d = fem::inner_product_matrix(disc, InnerProductKind::h1_vector);
  const auto ip_c = fem::inner_product_matrix(disc, InnerProductKind::h1_scalar);
  r.extension = Vd.transpose() * (ip_d.matrix * solver.extension().apply(Vb));
  const Eigen::VectorXd one = Eigen::VectorXd::Ones(disc.scalar_dofs());
  r.u0 = Vc.transpose() * (ip_c.matrix * one);
  r.norm_one = std::sqrt(one.dot(ip_c.matrix * one));
  r.shapes0.resize(Vd.cols(), solver.num_shapes());
  for (int l = 0; l < solver.num_shapes(); ++l) {
    r.shapes0.col(l) = Vd.transpose() * (ip_d.matrix * solver.shape_extension(l).values);
  }

  // J(id + D) = 1 + div D + det(grad D) is exact and cellwise constant for
  // P1 maps; integrate it against each concentration mode.
  const int nc = disc.num_cells();
  const int Kd = static_cast<int>(Vd.cols());
  const int Kc = static_cast<int>(Vc.cols());
  Eigen::MatrixXd mc(Kc, nc);
  Eigen::MatrixXd dv(nc, Kd);
  Eigen::MatrixXd bf(nc, static_cast<Eigen::Index>(Kd) * Kd);
  std::vector<Eigen::Matrix2d> G(Kd);
  for (int t = 0; t < nc; ++t) {
    const auto& cell = disc.cell(t);
    for (int j = 0; j < Kc; ++j) {
      mc(j, t) = cell.area * (Vc(cell.vertices[0], j) + Vc(cell.vertices[1], j) + Vc(cell.vertices[2], j)) / 3.0;
    }
    for (int k = 0; k < Kd; ++k) {
      G[k] = cell_gradient(cell, Vd.col(k));
      dv(t, k) = G[k].trace();
    }
    for (int k = 0; k < Kd; ++k) {
      for (int l = 0; l < Kd; ++l) {
        bf(t, k * Kd + l) =
            0.5 * (G[k](0, 0) * G[l](1, 1) + G[l](0, 0) * G[k](1, 1) - G[k](0, 1) * G[l](1, 0) -
                   G[l](0, 1) * G[k](1, 0));
      }
    }
  }
  r.mass0 = mc.rowwise().sum();
  r.mass1 = mc * dv;
  r.mass2 = mc * bf;

  r.has_variance = config.with_variance;
  if (config.with_variance) {
    // int_T phi_i phi_j = |T| / 12 (s_i s_j + sum_a phi_i(a) phi_j(a)), s = vertex sum.
    Eigen::MatrixXd mf(static_cast<Eigen::Index>(Kc) * Kc, nc);
    for (int t = 0; t < nc; ++t) {
      const auto& cell = disc.cell(t);
      Eigen::Matrix<double, 3, Eigen::Dynamic> vals(3, Kc);
      for (int a = 0; a < 3; ++a) vals.row(a) = Vc.row(cell.vertices[a]);
      const Eigen::RowVectorXd s = vals.colwise().sum();
      const Eigen::MatrixXd loc = cell.area / 12.0 * (s.transpose() * s + vals.transpose() * vals);
      mf.col(t) = Eigen::Map<const Eigen::VectorXd>(loc.data(), loc.size());
    }
    r.var0 = Eigen::Map<const Eigen::MatrixXd>(Eigen::VectorXd(mf.rowwise().sum()).data(), Kc, Kc);
    r.var1 = mf * dv;
    r.var2 = mf * bf;
  }
  return r;
}

ReducedModel build_reduced_model(const fom::FomSolver& solver, const Campaign& campaign) {
  const BasisSet bases = build_bases(solver, campaign, campaign.config);
  return project_operators(solver, bases, build_eim(solver, campaign, campaign.config), campaign.config);
}

}  // namespace osmorom::offline
