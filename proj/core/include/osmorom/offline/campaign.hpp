#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "osmorom/fom/solver.hpp"
#include "osmorom/offline/eim.hpp"

namespace osmorom::offline {

struct TrainingConfig {
  double mesh_h = 0.1;
  fom::ParameterDomain domain = fom::ParameterDomain::standard();
  std::vector<int> grid = {3, 3, 3, 3};  // points per axis
  /// When non-empty, used instead of the grid.
  std::vector<fom::Parameters> explicit_parameters;
  double eps_rb = 1e-3;
  double eps_ei = 1e-3;
  int N = 100;
  double dt = 0.01;
  /// Every k-th time step enters the EIM training sets (the final step is
  /// always included). Snapshot sets always use every step.
  int eim_stride = 1;
  /// Caps on reduced dimensions; negative means unlimited.
  int max_modes = -1;
  int max_eim = -1;
  /// Use complete finite element bases instead of POD.
  bool complete_bases = false;
  /// Precompute the weighted mass 4-tensor needed for reduced variance.
  bool with_variance = true;
  int workers = 1;

  std::vector<fom::Parameters> parameters() const;
  /// Throws ConfigError for empty grids or tolerances outside (0, 1].
  void validate() const;
};

struct CampaignEntry {
  fom::Parameters mu;
  bool ok = false;
  std::string error;
  double wall_time = 0.0;
};

struct Campaign {
  TrainingConfig config;
  std::vector<fom::Trajectory> trajectories;  // successful runs only
  std::vector<CampaignEntry> report;          // every requested parameter
};

/// Solves all training trajectories. Failing parameters are recorded in the
/// report and excluded. Throws EmptySnapshotSet if nothing succeeds.
Campaign run_campaign(const fom::FomSolver& solver, const TrainingConfig& config);

/// CSV: index, alpha, beta, delta_l..., status, wall_time, error.
void write_campaign_report(std::ostream& os, const Campaign& campaign);

enum class SnapshotKind { boundary_velocity, deformation, concentration };

struct SnapshotSet {
  SnapshotKind kind;
  Eigen::MatrixXd vectors;  // one column per (trajectory, step)
  std::vector<std::pair<int, int>> provenance;
};

/// Deformation snapshots store Psi - id.
SnapshotSet collect_snapshots(const fom::FomSolver& solver, const Campaign& campaign, SnapshotKind kind);

/// Coefficient samples c_i over all trajectories and the selected steps.
/// c4 uses eta = extended velocity of the previous step (skipped at n = 0);
/// c7 uses phi = u - u_ext.
TrainingSet build_training_set(const fom::FomSolver& solver, const Campaign& campaign, int i);

}  // namespace osmorom::offline
