#pragma once

#include <memory>
#include <vector>

#include "osmorom/fem/field.hpp"
#include "osmorom/fem/space.hpp"
#include "osmorom/fom/extension.hpp"
#include "osmorom/fom/parameters.hpp"

namespace osmorom::fom {

/// Discrete state at time t = n dt.
///
/// `q_bnd` is the boundary velocity evaluated at this state; it drives the
/// transition n -> n+1. `q_vol_prev` is the extended velocity that produced
/// this state from the previous one (zero at n = 0).
struct FomState {
  int n = 0;
  double t = 0.0;
  fem::Field u;
  fem::Field psi;
  fem::TraceField q_bnd;
  fem::Field q_vol_prev;
};

struct Trajectory {
  std::vector<FomState> states;
  Parameters mu;
  double dt = 0.0;
  double wall_time = 0.0;  // seconds, whole time loop
};

/// Full-order ALE solver on a fixed reference mesh. Holds only immutable
/// data (mesh, factorized extension, cached shape extensions); concurrent
/// calls are safe.
class FomSolver {
 public:
  explicit FomSolver(std::shared_ptr<const fem::Discretization> disc, std::vector<Shape> shapes = default_shapes());

  const fem::Discretization& discretization() const { return *disc_; }
  std::shared_ptr<const fem::Discretization> discretization_ptr() const { return disc_; }
  const ExtensionOperator& extension() const { return ext_; }
  int num_shapes() const { return static_cast<int>(shape_traces_.size()); }
  /// I_Gamma(r_l) and E_h(I_Gamma(r_l)).
  const fem::TraceField& shape_trace(int l) const { return shape_traces_[l]; }
  const fem::Field& shape_extension(int l) const { return shape_ext_[l]; }
  const fem::Field& identity() const { return id_; }

  /// u = 1, Psi = id + sum_l delta_l E_h(I_Gamma(r_l)). q_bnd is left empty.
  FomState initial_state(const Parameters& mu) const;

  /// Solves (a1 + beta dt a2) q = -beta l1 + gamma l2 with coefficients at psi
  /// and phi = u - u_ext.
  fem::TraceField boundary_velocity_step(const fem::Field& psi, const fem::Field& u, const Parameters& mu,
                                         double dt) const;
  fem::Field extend(const fem::TraceField& q_bnd) const { return ext_.apply(q_bnd); }
  fem::Field advance_transform(const fem::Field& psi, const fem::Field& q_vol, double dt) const;
  fem::Field concentration_step(const fem::Field& u_prev, const fem::Field& psi_prev, const fem::Field& psi_next,
                                const fem::Field& q_vol, const Parameters& mu, double dt) const;

  /// Runs N steps. Failures are rethrown as StepFailure with the step index.
  Trajectory solve_trajectory(const Parameters& mu, int N, double dt) const;

 private:
  std::shared_ptr<const fem::Discretization> disc_;
  ExtensionOperator ext_;
  fem::Field id_;
  std::vector<fem::TraceField> shape_traces_;
  std::vector<fem::Field> shape_ext_;
};

/// a3(u, 1; psi).
double total_mass(const fem::Discretization& disc, const fem::Field& u, const fem::Field& psi);
/// int (u - ubar)^2 J / int J with ubar = int u J / int J.
double variance(const fem::Discretization& disc, const fem::Field& u, const fem::Field& psi);
/// max_i |psi_i - id_i| over all vector coefficients.
double max_displacement(const fem::Discretization& disc, const fem::Field& psi);

}  // namespace osmorom::fom
