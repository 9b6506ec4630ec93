#include "osmorom/offline/campaign.hpp"

#include <chrono>
#include <iomanip>
#include <ostream>

#include "osmorom/ale/coefficients.hpp"
#include "osmorom/errors.hpp"
#include "osmorom/util/parallel.hpp"

namespace osmorom::offline {

std::vector<fom::Parameters> TrainingConfig::parameters() const {
  if (!explicit_parameters.empty()) return explicit_parameters;
  return fom::parameter_grid(domain, grid);
}

void TrainingConfig::validate() const {
  if (!(mesh_h > 0.0 && mesh_h < 1.0)) throw ConfigError("mesh_h must lie in (0, 1)");
  if (explicit_parameters.empty()) {
    if (static_cast<int>(grid.size()) != domain.dims()) throw ConfigError("grid needs one count per parameter axis");
    for (int c : grid)
      if (c < 1) throw ConfigError("grid counts must be positive");
  }
  if (!(eps_rb > 0.0 && eps_rb <= 1.0)) throw ConfigError("eps_rb must lie in (0, 1]");
  if (!(eps_ei > 0.0 && eps_ei <= 1.0)) throw ConfigError("eps_ei must lie in (0, 1]");
  if (N < 1 || !(dt > 0.0)) throw ConfigError("need N >= 1 and dt > 0");
  if (eim_stride < 1) throw ConfigError("eim_stride must be positive");
}

Campaign run_campaign(const fom::FomSolver& solver, const TrainingConfig& config) {
  config.validate();
  Campaign c;
  c.config = config;
  const auto mus = config.parameters();
  std::vector<fom::Trajectory> trajs(mus.size());
  c.report.resize(mus.size());

  auto run = [&](std::size_t k) {
    auto& entry = c.report[k];
    entry.mu = mus[k];
    const auto start = std::chrono::steady_clock::now();
    try {
      trajs[k] = solver.solve_trajectory(mus[k], config.N, config.dt);
      entry.ok = true;
    } catch (const Error& e) {
      entry.error = e.what();
    }
    entry.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  };
  util::parallel_for(mus.size(), config.workers, run);
  for (std::size_t k = 0; k < mus.size(); ++k)
    if (c.report[k].ok) c.trajectories.push_back(std::move(trajs[k]));
  if (c.trajectories.empty()) throw EmptySnapshotSet("every training trajectory failed");
  return c;
}

void write_campaign_report(std::ostream& os, const Campaign& campaign) {
  const std::size_t L = campaign.report.empty() ? 0 : campaign.report.front().mu.delta.size();
  os << "index,alpha,beta";
  for (std::size_t l = 0; l < L; ++l) os << ",delta" << l + 1;
  os << ",status,wall_time,error\n";
  os << std::setprecision(17);
  for (std::size_t k = 0; k < campaign.report.size(); ++k) {
    const auto& e = campaign.report[k];
    os << k << "," << e.mu.alpha << "," << e.mu.beta;
    for (double d : e.mu.delta) os << "," << d;
    std::string msg = e.error;
    for (char& ch : msg)
      if (ch == ',' || ch == '\n') ch = ';';
    os << "," << (e.ok ? "ok" : "failed") << "," << e.wall_time << "," << msg << "\n";
  }
}

SnapshotSet collect_snapshots(const fom::FomSolver& solver, const Campaign& campaign, SnapshotKind kind) {
  SnapshotSet set;
  set.kind = kind;
  const auto& disc = solver.discretization();
  const Eigen::Index len = kind == SnapshotKind::boundary_velocity ? disc.trace_dofs()
                           : kind == SnapshotKind::deformation     ? disc.vector_dofs()
                                                                   : disc.scalar_dofs();
  std::size_t total = 0;
  for (const auto& t : campaign.trajectories) total += t.states.size();
  set.vectors.resize(len, static_cast<Eigen::Index>(total));
  Eigen::Index col = 0;
  for (std::size_t k = 0; k < campaign.trajectories.size(); ++k) {
    for (const auto& s : campaign.trajectories[k].states) {
      switch (kind) {
        case SnapshotKind::boundary_velocity: set.vectors.col(col) = s.q_bnd.values; break;
        case SnapshotKind::deformation: set.vectors.col(col) = s.psi.values - solver.identity().values; break;
        case SnapshotKind::concentration: set.vectors.col(col) = s.u.values; break;
      }
      set.provenance.emplace_back(static_cast<int>(k), s.n);
      ++col;
    }
  }
  return set;
}

TrainingSet build_training_set(const fom::FomSolver& solver, const Campaign& campaign, int i) {
  const auto& disc = solver.discretization();
  TrainingSet ts;
  ts.id = i;
  ts.set = ale::coefficient_point_set(i);
  ts.components = ale::coefficient_components(i);
  const int stride = campaign.config.eim_stride;

  std::vector<std::pair<int, int>> picks;
  for (std::size_t k = 0; k < campaign.trajectories.size(); ++k) {
    const auto& states = campaign.trajectories[k].states;
    const int last = static_cast<int>(states.size()) - 1;
    for (int n = 0; n <= last; ++n) {
      if (i == 4 && n == 0) continue;
      if (n % stride != 0 && n != last) continue;
      picks.emplace_back(static_cast<int>(k), n);
    }
  }
  const Eigen::Index rows = static_cast<Eigen::Index>(disc.num_points(ts.set)) * ts.components;
  ts.samples.resize(rows, static_cast<Eigen::Index>(picks.size()));
  for (std::size_t c = 0; c < picks.size(); ++c) {
    const auto& traj = campaign.trajectories[picks[c].first];
    const auto& s = traj.states[picks[c].second];
    ale::CoefficientSamples cs;
    if (i == 4) {
      cs = ale::coefficient_field_c4(disc, s.psi, s.q_vol_prev);
    } else if (i == 7) {
      fem::Field phi = s.u;
      phi.values.array() -= traj.mu.u_ext;
      cs = ale::coefficient_field_c7(disc, s.psi, phi);
    } else {
      cs = ale::coefficient_field(disc, i, s.psi);
    }
    ts.samples.col(static_cast<Eigen::Index>(c)) = cs.values;
  }
  ts.provenance = std::move(picks);
  return ts;
}

}  // namespace osmorom::offline
