#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>

#include <gtest/gtest.h>

#include "osmorom/ale/coefficients.hpp"
#include "osmorom/errors.hpp"
#include "osmorom/fem/forms.hpp"
#include "osmorom/online/rom.hpp"

using namespace osmorom;
using namespace osmorom::online;
using offline::ReducedModel;
using offline::TrainingConfig;

namespace {

fom::Parameters make(double alpha, double beta, double d1, double d2) {
  fom::Parameters p;
  p.alpha = alpha;
  p.beta = beta;
  p.delta = {d1, d2};
  return p;
}

double rel_h1(const fem::InnerProduct& ip, const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const Eigen::VectorXd e = a - b;
  return std::sqrt(e.dot(ip.matrix * e) / b.dot(ip.matrix * b));
}

struct Setup {
  std::unique_ptr<fom::FomSolver> solver;
  offline::Campaign campaign;
  std::shared_ptr<const ReducedModel> full;    // complete bases, exact EIM
  std::shared_ptr<const ReducedModel> coarse;  // loose POD and EIM

  const fem::Discretization& disc() const { return solver->discretization(); }

  static const Setup& get() {
    static const Setup s = [] {
      Setup x;
      x.solver = std::make_unique<fom::FomSolver>(
          std::make_shared<const fem::Discretization>(fem::generate_disk_mesh(0.3)));
      TrainingConfig cfg;
      cfg.mesh_h = 0.3;
      cfg.explicit_parameters = {make(0.3, 0.05, 0.8, 0.4), make(0.1, 0.1, 0.0, 0.0)};
      cfg.N = 8;
      cfg.dt = 0.01;
      cfg.eps_rb = 1e-12;
      cfg.eps_ei = 1e-12;
      x.campaign = offline::run_campaign(*x.solver, cfg);
      TrainingConfig full = cfg;
      full.complete_bases = true;
      x.full = std::make_shared<const ReducedModel>(offline::project_operators(
          *x.solver, offline::build_bases(*x.solver, x.campaign, full),
          offline::build_eim(*x.solver, x.campaign, full), full));
      x.coarse = std::make_shared<const ReducedModel>(offline::build_reduced_model(*x.solver, x.campaign).truncated_to(1e-1, 1e-1));
      return x;
    }();
    return s;
  }
};

}  // namespace

TEST(Rom, FullBasisReproducesFom) {
  const auto& s = Setup::get();
  const RomSolver rom(s.full);
  const auto ip_c = fem::inner_product_matrix(s.disc(), fem::InnerProductKind::h1_scalar);
  const auto ip_d = fem::inner_product_matrix(s.disc(), fem::InnerProductKind::h1_vector);
  for (const auto& traj : s.campaign.trajectories) {
    const RomTrajectory rt = rom.solve(traj.mu, 8, 0.01);
    ASSERT_EQ(rt.states.size(), traj.states.size());
    for (std::size_t n = 0; n < traj.states.size(); ++n) {
      const Reconstruction rec = reconstruct(*s.full, s.solver->identity(), rt.states[n]);
      EXPECT_LE(rel_h1(ip_c, rec.u.values, traj.states[n].u.values), 1e-8) << n;
      EXPECT_LE(rel_h1(ip_d, rec.psi.values, traj.states[n].psi.values), 1e-8) << n;
      const Eigen::VectorXd dq = rec.q.values - traj.states[n].q_bnd.values;
      EXPECT_LE(dq.cwiseAbs().maxCoeff(), 1e-8 * (1.0 + traj.states[n].q_bnd.values.cwiseAbs().maxCoeff())) << n;
    }
  }
}

TEST(Rom, ConservativeAndPlainAgreeWhenInterpolationIsExact) {
  const auto& s = Setup::get();
  const RomSolver rom(s.full);
  const auto& mu = s.campaign.trajectories[0].mu;
  const RomTrajectory a = rom.solve(mu, 8, 0.01, true);
  const RomTrajectory b = rom.solve(mu, 8, 0.01, false);
  for (std::size_t n = 0; n < a.states.size(); ++n)
    EXPECT_LE((a.states[n].u - b.states[n].u).cwiseAbs().maxCoeff(), 1e-10 * a.states[n].u.cwiseAbs().maxCoeff());
}

TEST(Rom, ConservativeModeKeepsMassForLooseModels) {
  const auto& s = Setup::get();
  const RomSolver rom(s.coarse);
  for (const auto& mu : {make(0.5, 0.02, 1.0, 1.0), make(0.9, 0.09, 0.2, 0.7)}) {
    const RomTrajectory t = rom.solve(mu, 30, 0.01, true);
    const double m0 = rom_total_mass(*s.coarse, t.states[0]);
    for (const auto& st : t.states) EXPECT_LE(std::abs(rom_total_mass(*s.coarse, st) - m0), 1e-10 * m0);
  }
}

TEST(Rom, InitialState) {
  const auto& s = Setup::get();
  const RomSolver rom(s.full);
  const RomState z = rom.initial(make(0.2, 0.1, 0.0, 0.0), 0.01);
  EXPECT_EQ(z.d.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_NEAR(z.u[0], s.full->norm_one, 1e-12 * s.full->norm_one);
  EXPECT_LE(z.u.tail(z.u.size() - 1).cwiseAbs().maxCoeff(), 1e-10);
  const RomState a = rom.initial(make(0.2, 0.1, 0.3, 0.0), 0.01);
  const RomState b = rom.initial(make(0.2, 0.1, 0.0, 0.5), 0.01);
  const RomState ab = rom.initial(make(0.2, 0.1, 0.3, 0.5), 0.01);
  EXPECT_LE((ab.d - a.d - b.d).cwiseAbs().maxCoeff(), 1e-13);

  const Reconstruction rec = reconstruct(*s.full, s.solver->identity(), z);
  EXPECT_LE((rec.u.values.array() - 1.0).abs().maxCoeff(), 1e-10);
  EXPECT_EQ(rec.psi.values, s.solver->identity().values);
  const double area = s.disc().mesh().total_area();
  EXPECT_NEAR(rom_total_mass(*s.full, z), area, 1e-12 * area);
  EXPECT_NEAR(rom_variance(*s.full, z), 0.0, 1e-12);
}

TEST(Rom, EquilibriumVelocityMatchesFom) {
  const auto& s = Setup::get();
  const RomSolver rom(s.coarse);
  const auto& traj = s.campaign.trajectories[1];  // delta = 0, beta = gamma
  const auto ip_b = fem::inner_product_matrix(s.disc(), fem::InnerProductKind::l2_boundary_vector);
  const RomTrajectory rt = rom.solve(traj.mu, 8, 0.01);
  for (std::size_t n = 0; n < rt.states.size(); ++n) {
    const Eigen::VectorXd fom_q = s.coarse->bnd.project(ip_b, traj.states[n].q_bnd.values);
    EXPECT_LE((rt.states[n].q - fom_q).norm(), 0.1 * s.coarse->config.mesh_h) << n;
  }
}

TEST(Rom, QuantitiesMatchFullOrderEvaluation) {
  const auto& s = Setup::get();
  const auto& m = *s.full;
  fom::Rng rng(11);
  for (int trial = 0; trial < 3; ++trial) {
    RomState st;
    st.u = Eigen::VectorXd::NullaryExpr(m.k_conc(), [&] { return rng.uniform(-1.0, 1.0); });
    st.u[0] += 5.0;
    st.d = Eigen::VectorXd::NullaryExpr(m.k_def(), [&] { return rng.uniform(-0.02, 0.02); });
    st.q = Eigen::VectorXd::Zero(m.k_bnd());
    const Reconstruction rec = reconstruct(m, s.solver->identity(), st);
    const double mass = fom::total_mass(s.disc(), rec.u, rec.psi);
    EXPECT_NEAR(rom_total_mass(m, st), mass, 1e-10 * std::abs(mass));
    const double var = fom::variance(s.disc(), rec.u, rec.psi);
    EXPECT_NEAR(rom_variance(m, st), var, 1e-8 * var);
    // Shift invariance.
    RomState shifted = st;
    shifted.u[0] += 3.0 * m.norm_one;
    EXPECT_NEAR(rom_variance(m, shifted), rom_variance(m, st), 1e-9 * var);
    // Mass row against assembly with the reconstructed transformation.
    const RomSolver rom(s.full);
    const auto c3 = ale::coefficient_field(s.disc(), 3, rec.psi);
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(s.disc().scalar_dofs());
    const Eigen::VectorXd direct =
        m.conc.modes.transpose() * (fem::assemble_bilinear(s.disc(), fem::FormId::a3, c3.values) * ones);
    EXPECT_LE((rom.mass_row(st.d) - direct).cwiseAbs().maxCoeff(), 1e-10 * direct.cwiseAbs().maxCoeff());
  }
}

TEST(Rom, ProjectionRoundTrip) {
  const auto& s = Setup::get();
  const auto& m = *s.full;
  const auto& fs = s.campaign.trajectories[0].states[5];
  const RomState p = project_state(m, s.disc(), s.solver->identity(), fs);
  const Reconstruction rec = reconstruct(m, s.solver->identity(), p);
  EXPECT_LE((rec.u.values - fs.u.values).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_LE((rec.psi.values - fs.psi.values).cwiseAbs().maxCoeff(), 1e-10);
  const RomState back = project_state(m, s.disc(), s.solver->identity(),
                                      fom::FomState{fs.n, fs.t, rec.u, rec.psi, rec.q, fs.q_vol_prev});
  EXPECT_LE((back.u - p.u).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_LE((back.d - p.d).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Rom, DeterministicWithTimingsAndCsv) {
  const auto& s = Setup::get();
  const RomSolver rom(s.coarse);
  const auto mu = make(0.4, 0.03, 0.5, 0.5);
  const RomTrajectory a = rom.solve(mu, 10, 0.01);
  const RomTrajectory b = rom.solve(mu, 10, 0.01);
  for (std::size_t n = 0; n < a.states.size(); ++n) {
    EXPECT_EQ(a.states[n].u, b.states[n].u);
    EXPECT_EQ(a.states[n].d, b.states[n].d);
  }
  EXPECT_GT(a.timings.total(), 0.0);
  EXPECT_GT(a.timings.theta, 0.0);
  EXPECT_EQ(a.per_step.size(), a.states.size());
  EXPECT_LE(a.timings.total(), a.wall_time * (1 + 1e-9));
  std::ostringstream x, y;
  write_rom_trajectory_csv(x, *s.coarse, a);
  write_rom_trajectory_csv(y, *s.coarse, b);
  EXPECT_EQ(x.str(), y.str());
  const std::string csv = x.str();
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 12);
}

TEST(Rom, ThetaOfInterpolatedCoefficient) {
  const auto& s = Setup::get();
  const RomSolver rom(s.full);
  // At the identity, c3 = 1 everywhere; its interpolant must reproduce 1.
  const Eigen::VectorXd th = rom.theta(3, Eigen::VectorXd::Zero(s.full->k_def()), {}, {}, 0.0);
  const Eigen::VectorXd c = s.full->eim[2].basis * th;
  EXPECT_LE((c.array() - 1.0).abs().maxCoeff(), 1e-10);
}

TEST(Rom, FoldingRaisesDegenerateMapping) {
  const auto& s = Setup::get();
  const RomSolver rom(s.full);
  const auto ip_d = fem::inner_product_matrix(s.disc(), fem::InnerProductKind::h1_vector);
  // Psi(x, y) = (x, -y) reflects every cell.
  const fem::Field shift = s.disc().interpolate_vector([](const fem::Point& x) { return fem::Point(0.0, -2.0 * x.y()); });
  const Eigen::VectorXd d = s.full->def.project(ip_d, shift.values);
  EXPECT_THROW(rom.theta(3, d, {}, {}, 0.0), DegenerateMapping);
}
