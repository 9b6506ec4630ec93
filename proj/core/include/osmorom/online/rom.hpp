#pragma once

#include <iosfwd>
#include <memory>
#include <vector>

#include <Eigen/Core>

#include "osmorom/fom/solver.hpp"
#include "osmorom/offline/model.hpp"

namespace osmorom::online {

/// Reduced coefficients at one time level. `d` describes Psi - id, `q` the
/// boundary velocity evaluated at this state.
struct RomState {
  int n = 0;
  double t = 0.0;
  Eigen::VectorXd u;
  Eigen::VectorXd d;
  Eigen::VectorXd q;
  bool conservative = true;
};

/// Wall-clock seconds per online phase.
struct PhaseTimings {
  double theta = 0.0;
  double boundary = 0.0;
  double extension = 0.0;
  double concentration = 0.0;
  double total() const { return theta + boundary + extension + concentration; }
  PhaseTimings& operator+=(const PhaseTimings& o);
};

struct RomTrajectory {
  std::vector<RomState> states;
  fom::Parameters mu;
  double dt = 0.0;
  PhaseTimings timings;               // summed over all steps
  std::vector<PhaseTimings> per_step; // entry n belongs to the step producing state n
  double wall_time = 0.0;             // whole time loop, excludes model loading
};

/// Online time stepping against an immutable reduced model. Every operation
/// touches only reduced arrays and the stored interpolation geometry.
class RomSolver {
 public:
  explicit RomSolver(std::shared_ptr<const offline::ReducedModel> model);

  const offline::ReducedModel& model() const { return *model_; }

  /// Initial coefficients; dt enters the boundary velocity of the first state.
  RomState initial(const fom::Parameters& mu, double dt, bool conservative = true,
                   PhaseTimings* timings = nullptr) const;
  RomState step(const RomState& state, const fom::Parameters& mu, double dt, PhaseTimings* timings = nullptr) const;
  RomTrajectory solve(const fom::Parameters& mu, int N, double dt, bool conservative = true) const;

  /// Interpolation coefficients of c_i for deformation coefficients d.
  /// c4 additionally reads the velocity coefficients eta, c7 the
  /// concentration coefficients u. Throws NonFiniteTheta or DegenerateMapping.
  Eigen::VectorXd theta(int i, const Eigen::VectorXd& d, const Eigen::VectorXd& eta, const Eigen::VectorXd& u,
                        double u_ext) const;

  /// Exact a3(phi_j, 1; Psi) for every concentration mode j.
  Eigen::VectorXd mass_row(const Eigen::VectorXd& d) const;

  /// Boundary velocity coefficients at a state (d, u).
  Eigen::VectorXd boundary_velocity(const Eigen::VectorXd& d, const Eigen::VectorXd& u, const fom::Parameters& mu,
                                    double dt, PhaseTimings* timings = nullptr) const;

 private:
  std::shared_ptr<const offline::ReducedModel> model_;
};

/// Full-order fields of a reduced state.
struct Reconstruction {
  fem::Field u;
  fem::Field psi;
  fem::TraceField q;
};
Reconstruction reconstruct(const offline::ReducedModel& model, const fem::Field& identity, const RomState& state);

/// Inner-product projection of a full-order state onto the reduced bases.
RomState project_state(const offline::ReducedModel& model, const fem::Discretization& disc,
                       const fem::Field& identity, const fom::FomState& state);

/// Total mass, evaluated exactly through the stored mass tensors.
double rom_total_mass(const offline::ReducedModel& model, const RomState& state);
/// Concentration variance on the physical domain. Needs a model built with
/// variance tensors.
double rom_variance(const offline::ReducedModel& model, const RomState& state);

/// One row per state with time, mass, variance (when available) and all
/// coefficients. With `timings` the per-step phase timings are appended.
void write_rom_trajectory_csv(std::ostream& os, const offline::ReducedModel& model, const RomTrajectory& traj,
                              bool timings = false);

}  // namespace osmorom::online
