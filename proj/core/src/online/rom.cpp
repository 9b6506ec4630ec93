#include "osmorom/online/rom.hpp"

#include <chrono>
#include <cmath>
#include <ostream>

#include <Eigen/Dense>

#include "osmorom/ale/coefficients.hpp"
#include "osmorom/errors.hpp"
#include "osmorom/util/csv.hpp"

namespace osmorom::online {

using offline::ReducedModel;

namespace {

using Clock = std::chrono::steady_clock;

class PhaseClock {
 public:
  explicit PhaseClock(double* slot) : slot_(slot), start_(Clock::now()) {}
  ~PhaseClock() {
    if (slot_) *slot_ += std::chrono::duration<double>(Clock::now() - start_).count();
  }
  PhaseClock(const PhaseClock&) = delete;
  PhaseClock& operator=(const PhaseClock&) = delete;

 private:
  double* slot_;
  Clock::time_point start_;
};

double* slot(PhaseTimings* t, double PhaseTimings::*member) { return t ? &(t->*member) : nullptr; }

Eigen::VectorXd outer_vec(const Eigen::VectorXd& d) {
  const Eigen::MatrixXd dd = d * d.transpose();
  return Eigen::Map<const Eigen::VectorXd>(dd.data(), dd.size());
}

Eigen::VectorXd solve_reduced(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, const char* what) {
  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
  const double rc = lu.rcond();
  if (!(rc > 1e-15)) throw SingularReducedSystem(std::string(what) + " system is singular (rcond " +
                                                 std::to_string(rc) + ")");
  Eigen::VectorXd x = lu.solve(b);
  if (!x.allFinite()) throw SingularReducedSystem(std::string(what) + " solution is not finite");
  return x;
}

template <class Vec>
void accumulate(Eigen::MatrixXd& A, double scale, const Eigen::VectorXd& theta, const std::vector<Vec>& terms) {
  for (Eigen::Index m = 0; m < theta.size(); ++m) A += (scale * theta[m]) * terms[static_cast<std::size_t>(m)];
}

}  // namespace

PhaseTimings& PhaseTimings::operator+=(const PhaseTimings& o) {
  theta += o.theta;
  boundary += o.boundary;
  extension += o.extension;
  concentration += o.concentration;
  return *this;
}

RomSolver::RomSolver(std::shared_ptr<const ReducedModel> model) : model_(std::move(model)) {
  if (!model_) throw DimensionMismatch("no reduced model");
  if (!model_->conc.constant_included) throw DimensionMismatch("concentration basis lacks the constant mode");
}

Eigen::VectorXd RomSolver::theta(int i, const Eigen::VectorXd& d, const Eigen::VectorXd& eta,
                                 const Eigen::VectorXd& u, double u_ext) const {
  const ReducedModel& r = *model_;
  const auto& g = r.geometry[i - 1];
  const int M = g.size();
  if (M == 0) return {};
  const int Kd = r.k_def();
  if (d.size() != Kd) throw DimensionMismatch("deformation coefficients have the wrong length");

  Eigen::MatrixXd F = Eigen::MatrixXd::Zero(M, 4);
  for (int k = 0; k < Kd; ++k) F.noalias() += d[k] * g.dF.middleCols(4 * k, 4);
  Eigen::MatrixXd E;
  if (i == 4) {
    E = Eigen::MatrixXd::Zero(M, 2);
    for (int k = 0; k < Kd; ++k) E.noalias() += eta[k] * g.eta.middleCols(2 * k, 2);
  }
  Eigen::VectorXd phi;
  if (i == 7) phi = (g.phi * u).array() - u_ext;

  const int nc = ale::coefficient_components(i);
  const bool volume = ale::coefficient_point_set(i) == fem::PointSet::volume;
  Eigen::VectorXd vals(M);
  double out[4];
  for (int m = 0; m < M; ++m) {
    Eigen::Matrix2d Fm;
    Fm << 1.0 + F(m, 0), F(m, 1), F(m, 2), 1.0 + F(m, 3);
    const std::span<double> o(out, static_cast<std::size_t>(nc));
    if (volume) {
      const Eigen::Vector2d e = i == 4 ? Eigen::Vector2d(E(m, 0), E(m, 1)) : Eigen::Vector2d::Zero();
      ale::volume_coefficient(i, Fm, e, o);
    } else {
      const Eigen::Vector2d n(g.normal(m, 0), g.normal(m, 1));
      ale::boundary_coefficient(i, ale::boundary_geometry(Fm, n), n, i == 7 ? phi[m] : 0.0, o);
    }
    vals[m] = out[g.component[m]];
  }
  Eigen::VectorXd th = offline::eim_theta(g.interpolation, vals);
  if (!th.allFinite()) throw NonFiniteTheta("interpolation coefficients of c" + std::to_string(i) + " are not finite");
  return th;
}

Eigen::VectorXd RomSolver::mass_row(const Eigen::VectorXd& d) const {
  const ReducedModel& r = *model_;
  return r.mass0 + r.mass1 * d + r.mass2 * outer_vec(d);
}

Eigen::VectorXd RomSolver::boundary_velocity(const Eigen::VectorXd& d, const Eigen::VectorXd& u,
                                             const fom::Parameters& mu, double dt, PhaseTimings* timings) const {
  const ReducedModel& r = *model_;
  Eigen::VectorXd t1, t2, t6, t7;
  {
    PhaseClock c(slot(timings, &PhaseTimings::theta));
    const Eigen::VectorXd none;
    t1 = theta(1, d, none, u, mu.u_ext);
    t2 = theta(2, d, none, u, mu.u_ext);
    t6 = theta(6, d, none, u, mu.u_ext);
    t7 = theta(7, d, none, u, mu.u_ext);
  }
  PhaseClock c(slot(timings, &PhaseTimings::boundary));
  const int Kb = r.k_bnd();
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(Kb, Kb);
  accumulate(A, 1.0, t1, r.a[0]);
  accumulate(A, mu.beta * dt, t2, r.a[1]);
  Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(Kb, 1);
  accumulate(rhs, -mu.beta, t6, r.l[0]);
  accumulate(rhs, mu.gamma, t7, r.l[1]);
  return solve_reduced(A, rhs.col(0), "boundary velocity");
}

RomState RomSolver::initial(const fom::Parameters& mu, double dt, bool conservative, PhaseTimings* timings) const {
  const ReducedModel& r = *model_;
  mu.validate(static_cast<std::size_t>(r.num_shapes));
  RomState s;
  s.conservative = conservative;
  s.u = r.u0;
  s.d = r.shapes0 * Eigen::Map<const Eigen::VectorXd>(mu.delta.data(), static_cast<Eigen::Index>(mu.delta.size()));
  s.q = boundary_velocity(s.d, s.u, mu, dt, timings);
  return s;
}

RomState RomSolver::step(const RomState& s, const fom::Parameters& mu, double dt, PhaseTimings* timings) const {
  const ReducedModel& r = *model_;
  RomState next;
  next.n = s.n + 1;
  next.t = next.n * dt;
  next.conservative = s.conservative;
  Eigen::VectorXd eta;
  {
    PhaseClock c(slot(timings, &PhaseTimings::extension));
    eta = r.extension * s.q;
    next.d = s.d + dt * eta;
  }
  Eigen::VectorXd t3p, t3, t4, t5;
  {
    PhaseClock c(slot(timings, &PhaseTimings::theta));
    const Eigen::VectorXd none;
    t3p = theta(3, s.d, none, none, mu.u_ext);
    t3 = theta(3, next.d, none, none, mu.u_ext);
    t4 = theta(4, next.d, eta, none, mu.u_ext);
    t5 = theta(5, next.d, none, none, mu.u_ext);
  }
  {
    PhaseClock c(slot(timings, &PhaseTimings::concentration));
    const int Kc = r.k_conc();
    Eigen::MatrixXd M0 = Eigen::MatrixXd::Zero(Kc, Kc);
    accumulate(M0, 1.0, t3p, r.a[2]);
    Eigen::MatrixXd M1 = Eigen::MatrixXd::Zero(Kc, Kc);
    accumulate(M1, 1.0, t3, r.a[2]);
    if (s.conservative) {
      // Row of the constant test function: exact mass row instead of EIM.
      M0.row(0) = mass_row(s.d).transpose() / r.norm_one;
      M1.row(0) = mass_row(next.d).transpose() / r.norm_one;
    }
    Eigen::MatrixXd A = M1;
    accumulate(A, dt, t4, r.a[3]);
    accumulate(A, mu.alpha * dt, t5, r.a[4]);
    next.u = solve_reduced(A, M0 * s.u, "concentration");
  }
  next.q = boundary_velocity(next.d, next.u, mu, dt, timings);
  return next;
}

RomTrajectory RomSolver::solve(const fom::Parameters& mu, int N, double dt, bool conservative) const {
  if (N < 0 || !(dt > 0.0)) throw ConfigError("invalid time discretization");
  RomTrajectory traj;
  traj.mu = mu;
  traj.dt = dt;
  const auto start = Clock::now();
  PhaseTimings t0;
  RomState s = initial(mu, dt, conservative, &t0);
  traj.per_step.push_back(t0);
  traj.states.reserve(static_cast<std::size_t>(N) + 1);
  traj.states.push_back(s);
  for (int n = 1; n <= N; ++n) {
    PhaseTimings t;
    s = step(s, mu, dt, &t);
    traj.per_step.push_back(t);
    traj.states.push_back(s);
  }
  traj.wall_time = std::chrono::duration<double>(Clock::now() - start).count();
  for (const auto& t : traj.per_step) traj.timings += t;
  return traj;
}

Reconstruction reconstruct(const ReducedModel& model, const fem::Field& identity, const RomState& state) {
  Reconstruction out;
  out.u = fem::Field::scalar(model.conc.modes * state.u);
  out.psi = fem::Field::vector(identity.values + model.def.modes * state.d);
  out.q.values = model.bnd.modes * state.q;
  return out;
}

RomState project_state(const ReducedModel& model, const fem::Discretization& disc, const fem::Field& identity,
                       const fom::FomState& state) {
  RomState s;
  s.n = state.n;
  s.t = state.t;
  s.u = model.conc.project(fem::inner_product_matrix(disc, model.conc.ip_kind), state.u.values);
  s.d = model.def.project(fem::inner_product_matrix(disc, model.def.ip_kind), state.psi.values - identity.values);
  s.q = model.bnd.project(fem::inner_product_matrix(disc, model.bnd.ip_kind), state.q_bnd.values);
  return s;
}

double rom_total_mass(const ReducedModel& model, const RomState& state) {
  return state.u.dot(model.mass0 + model.mass1 * state.d + model.mass2 * outer_vec(state.d));
}

double rom_variance(const ReducedModel& model, const RomState& state) {
  if (!model.has_variance) throw DimensionMismatch("the model was built without variance tensors");
  const int Kc = model.k_conc();
  const Eigen::VectorXd R = model.mass0 + model.mass1 * state.d + model.mass2 * outer_vec(state.d);
  const double area = model.norm_one * R[0];
  const double mean = state.u.dot(R) / area;
  Eigen::VectorXd w = state.u;
  w[0] -= mean * model.norm_one;
  const Eigen::VectorXd flat = model.var1 * state.d + model.var2 * outer_vec(state.d);
  const Eigen::MatrixXd B = model.var0 + Eigen::Map<const Eigen::MatrixXd>(flat.data(), Kc, Kc);
  return w.dot(B * w) / area;
}

void write_rom_trajectory_csv(std::ostream& os, const ReducedModel& model, const RomTrajectory& traj, bool timings) {
  std::vector<std::string> head{"n", "t", "mass"};
  if (model.has_variance) head.push_back("variance");
  for (int j = 0; j < model.k_conc(); ++j) head.push_back("u" + std::to_string(j));
  for (int j = 0; j < model.k_def(); ++j) head.push_back("d" + std::to_string(j));
  for (int j = 0; j < model.k_bnd(); ++j) head.push_back("q" + std::to_string(j));
  if (timings)
    for (const char* h : {"time_theta", "time_boundary", "time_extension", "time_concentration"}) head.push_back(h);
  util::csv_row(os, head);
  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    const RomState& s = traj.states[k];
    std::vector<std::string> row{std::to_string(s.n), util::csv_number(s.t),
                                 util::csv_number(rom_total_mass(model, s))};
    if (model.has_variance) row.push_back(util::csv_number(rom_variance(model, s)));
    for (const Eigen::VectorXd* v : {&s.u, &s.d, &s.q})
      for (Eigen::Index j = 0; j < v->size(); ++j) row.push_back(util::csv_number((*v)[j]));
    if (timings) {
      const PhaseTimings& t = traj.per_step.at(k);
      for (double x : {t.theta, t.boundary, t.extension, t.concentration}) row.push_back(util::csv_number(x));
    }
    util::csv_row(os, row);
  }
}

}  // namespace osmorom::online
