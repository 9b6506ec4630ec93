#include <memory>

#include <benchmark/benchmark.h>

#include "osmorom/fem/mesh.hpp"
#include "osmorom/fom/solver.hpp"
#include "osmorom/offline/model.hpp"
#include "osmorom/online/rom.hpp"

using namespace osmorom;

namespace {

fom::Parameters mu_star() {
  fom::Parameters p;
  p.delta = {1.0, 1.0};
  return p;
}

std::shared_ptr<const fom::FomSolver> solver_for(double h) {
  return std::make_shared<const fom::FomSolver>(std::make_shared<const fem::Discretization>(fem::generate_disk_mesh(h)));
}

// Reduced model trained on mu* alone, capped so that every mesh gives the
// same reduced dimensions.
std::shared_ptr<const offline::ReducedModel> model_for(const fom::FomSolver& solver) {
  offline::TrainingConfig cfg;
  cfg.explicit_parameters = {mu_star()};
  cfg.N = 20;
  cfg.dt = 0.01;
  cfg.eps_rb = 1e-6;
  cfg.eps_ei = 1e-4;
  cfg.max_modes = 8;
  cfg.max_eim = 12;
  cfg.eim_stride = 2;
  const auto campaign = offline::run_campaign(solver, cfg);
  return std::make_shared<const offline::ReducedModel>(offline::build_reduced_model(solver, campaign));
}

void BM_FomStep(benchmark::State& state) {
  const auto solver = solver_for(1.0 / state.range(0));
  const fom::Parameters mu = mu_star();
  const double dt = 0.01;
  fom::FomState s = solver->initial_state(mu);
  s.q_bnd = solver->boundary_velocity_step(s.psi, s.u, mu, dt);
  for (auto _ : state) {
    const fem::Field q = solver->extend(s.q_bnd);
    const fem::Field psi = solver->advance_transform(s.psi, q, dt);
    const fem::Field u = solver->concentration_step(s.u, s.psi, psi, q, mu, dt);
    benchmark::DoNotOptimize(solver->boundary_velocity_step(psi, u, mu, dt));
  }
  state.counters["scalar_dofs"] = solver->discretization().scalar_dofs();
}
BENCHMARK(BM_FomStep)->Arg(10)->Arg(20)->Unit(benchmark::kMillisecond);

void BM_RomStep(benchmark::State& state) {
  const auto solver = solver_for(1.0 / state.range(0));
  const auto model = model_for(*solver);
  const online::RomSolver rom(model);
  const fom::Parameters mu = mu_star();
  const bool conservative = state.range(1) != 0;
  const online::RomState s0 = rom.initial(mu, 0.01, conservative);
  for (auto _ : state) benchmark::DoNotOptimize(rom.step(s0, mu, 0.01));
  state.counters["scalar_dofs"] = solver->discretization().scalar_dofs();
  state.counters["k_conc"] = model->k_conc();
}
BENCHMARK(BM_RomStep)->Args({10, 1})->Args({10, 0})->Args({20, 1})->Unit(benchmark::kMicrosecond);

void BM_Theta(benchmark::State& state) {
  const auto solver = solver_for(0.1);
  const auto model = model_for(*solver);
  const online::RomSolver rom(model);
  const int i = static_cast<int>(state.range(0));
  const online::RomState s0 = rom.initial(mu_star(), 0.01);
  const Eigen::VectorXd eta = Eigen::VectorXd::Zero(model->k_def());
  for (auto _ : state) benchmark::DoNotOptimize(rom.theta(i, s0.d, eta, s0.u, 0.0));
}
BENCHMARK(BM_Theta)->DenseRange(1, 7)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
