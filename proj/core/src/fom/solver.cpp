#include "osmorom/fom/solver.hpp"

#include <chrono>
#include <cmath>

#include <Eigen/SparseLU>

#include "osmorom/ale/coefficients.hpp"
#include "osmorom/ale/transform.hpp"
#include "osmorom/errors.hpp"
#include "osmorom/fem/forms.hpp"

namespace osmorom::fom {

using fem::FormId;
using fem::SparseMatrix;

namespace {

constexpr double kResidualTol = 1e-12;

double relative_residual(const SparseMatrix& A, const Eigen::VectorXd& x, const Eigen::VectorXd& b) {
  const double nb = b.norm();
  const double r = (A * x - b).norm();
  return nb > 0.0 ? r / nb : r;
}

// Direct solve with one step of iterative refinement if the residual misses
// the target.
template <class Solver>
Eigen::VectorXd solve_checked(const Solver& solver, const SparseMatrix& A, const Eigen::VectorXd& b,
                              const char* what) {
  if (solver.info() != Eigen::Success) throw SingularSystem(std::string(what) + ": factorization failed");
  Eigen::VectorXd x = solver.solve(b);
  if (relative_residual(A, x, b) > kResidualTol) x += solver.solve(Eigen::VectorXd(b - A * x));
  if (!x.allFinite() || relative_residual(A, x, b) > 1e3 * kResidualTol) {
    throw SingularSystem(std::string(what) + ": residual too large");
  }
  return x;
}

}  // namespace

FomSolver::FomSolver(std::shared_ptr<const fem::Discretization> disc, std::vector<Shape> shapes)
    : disc_(std::move(disc)), ext_(*disc_) {
  id_ = disc_->interpolate_vector([](const fem::Point& x) { return x; });
  for (const auto& r : shapes) {
    shape_traces_.push_back(disc_->interpolate_boundary(r));
    shape_ext_.push_back(ext_.apply(shape_traces_.back()));
  }
}

FomState FomSolver::initial_state(const Parameters& mu) const {
  mu.validate(shape_ext_.size());
  FomState s;
  s.u = disc_->interpolate([](const fem::Point&) { return 1.0; });
  s.psi = id_;
  for (std::size_t l = 0; l < shape_ext_.size(); ++l) s.psi.values += mu.delta[l] * shape_ext_[l].values;
  s.q_vol_prev = fem::Field::vector(Eigen::VectorXd::Zero(disc_->vector_dofs()));
  if (!(ale::min_jacobian(*disc_, s.psi) > ale::kDegenerateJ)) {
    throw DegenerateMapping("initial shape folds the mesh for mu = " + mu.to_string());
  }
  return s;
}

fem::TraceField FomSolver::boundary_velocity_step(const fem::Field& psi, const fem::Field& u, const Parameters& mu,
                                                  double dt) const {
  const auto& disc = *disc_;
  fem::Field phi = u;
  phi.values.array() -= mu.u_ext;
  const auto c1 = ale::coefficient_field(disc, 1, psi);
  const auto c2 = ale::coefficient_field(disc, 2, psi);
  const auto c6 = ale::coefficient_field(disc, 6, psi);
  const auto c7 = ale::coefficient_field_c7(disc, psi, phi);
  const SparseMatrix A = fem::assemble_bilinear(disc, FormId::a1, c1.values) +
                         (mu.beta * dt) * fem::assemble_bilinear(disc, FormId::a2, c2.values);
  const Eigen::VectorXd b = -mu.beta * fem::assemble_linear(disc, FormId::l1, c6.values) +
                            mu.gamma * fem::assemble_linear(disc, FormId::l2, c7.values);
  Eigen::SimplicialLDLT<SparseMatrix> solver(A);
  return fem::TraceField{solve_checked(solver, A, b, "boundary velocity")};
}

fem::Field FomSolver::advance_transform(const fem::Field& psi, const fem::Field& q_vol, double dt) const {
  fem::Field next = fem::Field::vector(psi.values + dt * q_vol.values);
  if (!(ale::min_jacobian(*disc_, next) > ale::kDegenerateJ)) {
    throw DegenerateMapping("transformation update folds the mesh");
  }
  return next;
}

fem::Field FomSolver::concentration_step(const fem::Field& u_prev, const fem::Field& psi_prev,
                                         const fem::Field& psi_next, const fem::Field& q_vol, const Parameters& mu,
                                         double dt) const {
  const auto& disc = *disc_;
  const auto c3_prev = ale::coefficient_field(disc, 3, psi_prev);
  const auto c3 = ale::coefficient_field(disc, 3, psi_next);
  const auto c4 = ale::coefficient_field_c4(disc, psi_next, q_vol);
  const auto c5 = ale::coefficient_field(disc, 5, psi_next);
  const SparseMatrix A = fem::assemble_bilinear(disc, FormId::a3, c3.values) +
                         dt * fem::assemble_bilinear(disc, FormId::a4, c4.values) +
                         (mu.alpha * dt) * fem::assemble_bilinear(disc, FormId::a5, c5.values);
  const Eigen::VectorXd b = fem::assemble_bilinear(disc, FormId::a3, c3_prev.values) * u_prev.values;
  Eigen::SparseLU<SparseMatrix> solver;
  solver.compute(A);
  return fem::Field::scalar(solve_checked(solver, A, b, "concentration"));
}

Trajectory FomSolver::solve_trajectory(const Parameters& mu, int N, double dt) const {
  if (N < 0 || !(dt > 0.0)) throw ConfigError("need N >= 0 and dt > 0");
  Trajectory traj;
  traj.mu = mu;
  traj.dt = dt;
  traj.states.reserve(N + 1);
  const auto start = std::chrono::steady_clock::now();
  int n = 0;
  try {
    FomState s = initial_state(mu);
    s.q_bnd = boundary_velocity_step(s.psi, s.u, mu, dt);
    traj.states.push_back(std::move(s));
    for (n = 1; n <= N; ++n) {
      const FomState& prev = traj.states.back();
      FomState next;
      next.n = n;
      next.t = n * dt;
      next.q_vol_prev = extend(prev.q_bnd);
      next.psi = advance_transform(prev.psi, next.q_vol_prev, dt);
      next.u = concentration_step(prev.u, prev.psi, next.psi, next.q_vol_prev, mu, dt);
      next.q_bnd = boundary_velocity_step(next.psi, next.u, mu, dt);
      traj.states.push_back(std::move(next));
    }
  } catch (const StepFailure&) {
    throw;
  } catch (const Error& e) {
    throw StepFailure(n, e.what());
  }
  traj.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return traj;
}

double total_mass(const fem::Discretization& disc, const fem::Field& u, const fem::Field& psi) {
  const auto c3 = ale::coefficient_field(disc, 3, psi);
  const Eigen::VectorXd row = fem::assemble_bilinear(disc, FormId::a3, c3.values) * u.values;
  return row.sum();
}

double variance(const fem::Discretization& disc, const fem::Field& u, const fem::Field& psi) {
  const auto c3 = ale::coefficient_field(disc, 3, psi);
  const SparseMatrix A = fem::assemble_bilinear(disc, FormId::a3, c3.values);
  const Eigen::VectorXd one = Eigen::VectorXd::Ones(u.values.size());
  const Eigen::VectorXd A1 = A * one;
  const double vol = A1.sum();
  const double mean = A1.dot(u.values) / vol;
  const Eigen::VectorXd w = u.values - mean * one;
  return w.dot(A * w) / vol;
}

double max_displacement(const fem::Discretization& disc, const fem::Field& psi) {
  double m = 0.0;
  for (int v = 0; v < disc.num_vertices(); ++v) {
    m = std::max(m, std::abs(psi.values[2 * v] - disc.mesh().vertices[v].x()));
    m = std::max(m, std::abs(psi.values[2 * v + 1] - disc.mesh().vertices[v].y()));
  }
  return m;
}

}  // namespace osmorom::fom
