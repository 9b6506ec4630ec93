#include "osmorom/harness/studies.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <mutex>
#include <set>
#include <sstream>

#include "osmorom/errors.hpp"
#include "osmorom/fem/forms.hpp"
#include "osmorom/offline/archive.hpp"
#include "osmorom/offline/pod.hpp"
#include "osmorom/util/csv.hpp"
#include "osmorom/util/hash.hpp"
#include "osmorom/util/parallel.hpp"

namespace osmorom::harness {

namespace fs = std::filesystem;
using util::csv_number;
using util::csv_row;

namespace {

std::ofstream open_output(const StudyContext& ctx, const std::string& file) {
  fs::create_directories(ctx.config.out);
  std::ofstream os(ctx.config.out / file, std::ios::trunc);
  if (!os) throw ConfigError("cannot write " + (ctx.config.out / file).string());
  return os;
}

std::vector<std::string> mu_cells(const fom::Parameters& mu) {
  return {csv_number(mu.alpha), csv_number(mu.beta), csv_number(mu.delta.at(0)), csv_number(mu.delta.at(1))};
}

double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::vector<double> sorted_unique_desc(std::vector<double> v) {
  std::sort(v.begin(), v.end(), std::greater<>());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

const char* kErrorConvention =
    "error convention: err_u = max_n |u_h - u_r|_H1 / max_n |u_h|_H1, err_psi likewise for Psi in (H1)^2; "
    "mass_err = |m_r(N) - m_r(0)| / m_r(0) with exact reduced mass, mass_err_max = max over n";

}  // namespace

std::string mesh_sha256(const fem::Mesh& mesh) {
  std::ostringstream os;
  fem::write_mesh(os, mesh);
  return util::sha256_hex(os.str());
}

StudyContext::StudyContext(StudyConfig cfg) : config(std::move(cfg)) {
  config.validate();
  disc = std::make_shared<const fem::Discretization>(fem::generate_disk_mesh(config.mesh_h));
  solver = std::make_shared<const fom::FomSolver>(disc);
  mesh_hash = mesh_sha256(disc->mesh());
}

void write_metadata(const StudyContext& ctx, const std::string& name, const std::vector<std::string>& notes) {
  std::ofstream os = open_output(ctx, name + "_metadata.txt");
  os << "# study " << name << "\n";
  os << "# mesh_sha256 " << ctx.mesh_hash << "\n";
  os << "# scalar_dofs " << ctx.disc->scalar_dofs() << "\n";
  for (const auto& n : notes) os << "# " << n << "\n";
  write_config(os, ctx.config);
}

// fom ------------------------------------------------------------------------

FomSummary run_fom(const StudyContext& ctx) {
  const StudyConfig& c = ctx.config;
  FomSummary s;
  s.trajectory = ctx.solver->solve_trajectory(c.mu, c.steps(), c.dt);
  for (const auto& st : s.trajectory.states) {
    s.mass.push_back(fom::total_mass(*ctx.disc, st.u, st.psi));
    s.variance.push_back(fom::variance(*ctx.disc, st.u, st.psi));
    s.displacement.push_back(fom::max_displacement(*ctx.disc, st.psi));
  }
  for (double m : s.mass) s.mass_drift = std::max(s.mass_drift, std::abs(m - s.mass[0]) / s.mass[0]);

  if (!c.out.empty()) {
    std::ofstream os = open_output(ctx, "fom_summary.csv");
    csv_row(os, {"n", "t", "mass", "variance", "max_displacement", "u_min", "u_max"});
    for (std::size_t n = 0; n < s.trajectory.states.size(); ++n) {
      const auto& st = s.trajectory.states[n];
      csv_row(os, {std::to_string(st.n), csv_number(st.t), csv_number(s.mass[n]), csv_number(s.variance[n]),
                   csv_number(s.displacement[n]), csv_number(st.u.values.minCoeff()),
                   csv_number(st.u.values.maxCoeff())});
    }
    offline::save_trajectory(c.out / "trajectory", s.trajectory);
    write_metadata(ctx, "fom", {"mu " + c.mu.to_string(), "mass_drift " + csv_number(s.mass_drift)});
  }
  return s;
}

// offline --------------------------------------------------------------------

OfflineResult run_offline(const StudyContext& ctx, bool save) {
  const StudyConfig& c = ctx.config;
  std::vector<double> rbs = c.eps_rb_grid, eis = c.eps_ei_grid;
  rbs.push_back(c.eps_rb);
  eis.push_back(c.eps_ei);
  const double rb_min = *std::min_element(rbs.begin(), rbs.end());
  const double ei_min = *std::min_element(eis.begin(), eis.end());

  OfflineResult r;
  const offline::Campaign campaign = offline::run_campaign(*ctx.solver, c.training(rb_min, ei_min));
  r.report = campaign.report;
  auto model = std::make_shared<offline::ReducedModel>(offline::build_reduced_model(*ctx.solver, campaign));
  r.model = model;

  for (double rb : sorted_unique_desc(c.eps_rb_grid)) {
    for (double ei : sorted_unique_desc(c.eps_ei_grid)) {
      const offline::ReducedModel t = model->truncated_to(rb, ei);
      r.sizes.push_back({rb, ei, t.k_bnd(), t.k_def(), t.k_conc(), t.eim_sizes()});
    }
  }

  if (save && !c.out.empty()) {
    offline::save_model(c.model_dir(), model->truncated_to(c.eps_rb, c.eps_ei));
    std::ofstream rep = open_output(ctx, "campaign_report.csv");
    offline::write_campaign_report(rep, campaign);
    std::ofstream os = open_output(ctx, "offline_sizes.csv");
    csv_row(os, {"eps_rb", "eps_ei", "k_bnd", "k_def", "k_conc", "M1", "M2", "M3", "M4", "M5", "M6", "M7"});
    for (const auto& s : r.sizes) {
      std::vector<std::string> row{csv_number(s.eps_rb), csv_number(s.eps_ei), std::to_string(s.k_bnd),
                                   std::to_string(s.k_def), std::to_string(s.k_conc)};
      for (int m : s.m) row.push_back(std::to_string(m));
      csv_row(os, row);
    }
    write_metadata(ctx, "offline", {"model saved with eps_rb " + csv_number(c.eps_rb) + " eps_ei " +
                                    csv_number(c.eps_ei)});
  }
  return r;
}

// rom ------------------------------------------------------------------------

RomSummary run_rom(const StudyContext& ctx, std::shared_ptr<const offline::ReducedModel> model) {
  const StudyConfig& c = ctx.config;
  if (!model) model = std::make_shared<const offline::ReducedModel>(offline::load_model(c.model_dir()));
  if (model->bnd.modes.rows() != ctx.disc->trace_dofs())
    throw ConfigError("the model was built on a different mesh (mesh_h " + csv_number(model->config.mesh_h) + ")");
  const online::RomSolver rom(model);
  RomSummary s;
  s.trajectory = rom.solve(c.mu, c.steps(), c.dt, !c.non_conservative);
  for (const auto& st : s.trajectory.states) {
    s.mass.push_back(online::rom_total_mass(*model, st));
    if (model->has_variance) s.variance.push_back(online::rom_variance(*model, st));
  }
  if (!c.out.empty()) {
    std::ofstream os = open_output(ctx, "rom_trajectory.csv");
    online::write_rom_trajectory_csv(os, *model, s.trajectory);
    std::ofstream ts = open_output(ctx, "rom_timings.csv");
    csv_row(ts, {"phase", "seconds"});
    const auto& t = s.trajectory.timings;
    csv_row(ts, {"theta", csv_number(t.theta)});
    csv_row(ts, {"boundary", csv_number(t.boundary)});
    csv_row(ts, {"extension", csv_number(t.extension)});
    csv_row(ts, {"concentration", csv_number(t.concentration)});
    csv_row(ts, {"total_loop", csv_number(s.trajectory.wall_time)});
    write_metadata(ctx, "rom", {"mu " + c.mu.to_string(),
                                std::string("mode ") + (c.non_conservative ? "non-conservative" : "conservative")});
  }
  return s;
}

// comparisons ----------------------------------------------------------------

FomReferences fom_references(const StudyContext& ctx, const std::vector<fom::Parameters>& mus) {
  FomReferences r;
  r.mus = mus;
  r.trajectories.resize(mus.size());
  r.failures.resize(mus.size());
  const int N = ctx.config.steps();
  util::parallel_for(mus.size(), ctx.config.workers, [&](std::size_t k) {
    try {
      r.trajectories[k] = ctx.solver->solve_trajectory(mus[k], N, ctx.config.dt);
    } catch (const Error& e) {
      r.trajectories[k] = fom::Trajectory{};
      r.failures[k] = e.what();
    }
  });
  return r;
}

ErrorRecord compare(const StudyContext& ctx, const online::RomSolver& rom, const fom::Trajectory& ref,
                    bool conservative, bool with_errors) {
  ErrorRecord rec;
  rec.mu = ref.mu;
  rec.conservative = conservative;
  rec.eps_rb = rom.model().config.eps_rb;
  rec.eps_ei = rom.model().config.eps_ei;
  rec.fom_time = ref.wall_time;
  const int N = static_cast<int>(ref.states.size()) - 1;
  online::RomTrajectory traj;
  try {
    traj = rom.solve(ref.mu, N, ref.dt, conservative);
  } catch (const Error& e) {
    rec.ok = false;
    rec.failure = e.what();
    return rec;
  }
  rec.rom_time = traj.wall_time;
  const auto& model = rom.model();
  const double m0 = online::rom_total_mass(model, traj.states.front());
  rec.mass_err = std::abs(online::rom_total_mass(model, traj.states.back()) - m0) / m0;
  rec.mass_err_max = 0.0;
  for (const auto& s : traj.states)
    rec.mass_err_max = std::max(rec.mass_err_max, std::abs(online::rom_total_mass(model, s) - m0) / m0);
  if (!with_errors) return rec;

  const auto ip_c = fem::inner_product_matrix(*ctx.disc, fem::InnerProductKind::h1_scalar);
  const auto ip_d = fem::inner_product_matrix(*ctx.disc, fem::InnerProductKind::h1_vector);
  const fem::Field& id = ctx.solver->identity();
  double eu = 0.0, nu = 0.0, ep = 0.0, np = 0.0;
  for (int n = 0; n <= N; ++n) {
    const auto& f = ref.states[n];
    const online::Reconstruction r = online::reconstruct(model, id, traj.states[n]);
    const Eigen::VectorXd du = f.u.values - r.u.values;
    const Eigen::VectorXd dp = f.psi.values - r.psi.values;
    eu = std::max(eu, std::sqrt(du.dot(ip_c.matrix * du)));
    nu = std::max(nu, std::sqrt(f.u.values.dot(ip_c.matrix * f.u.values)));
    ep = std::max(ep, std::sqrt(dp.dot(ip_d.matrix * dp)));
    np = std::max(np, std::sqrt(f.psi.values.dot(ip_d.matrix * f.psi.values)));
  }
  rec.err_u = eu / nu;
  rec.err_psi = ep / np;
  if (!std::isfinite(rec.err_u) || !std::isfinite(rec.err_psi)) {
    rec.ok = false;
    rec.failure = "non-finite reduced solution";
    rec.err_u = rec.err_psi = 1.0;
  }
  return rec;
}

namespace {

std::shared_ptr<const offline::ReducedModel> base_model(const StudyContext& ctx, const OfflineResult* offline,
                                                         OfflineResult& storage) {
  if (offline) return offline->model;
  storage = run_offline(ctx, false);
  return storage.model;
}

std::vector<std::string> record_cells(const ErrorRecord& r, bool times) {
  std::vector<std::string> row{std::to_string(r.test_index)};
  for (auto& s : mu_cells(r.mu)) row.push_back(s);
  row.push_back(csv_number(r.eps_rb));
  row.push_back(csv_number(r.eps_ei));
  row.push_back(r.conservative ? "conservative" : "non-conservative");
  row.push_back(r.ok ? "ok" : "failed");
  row.push_back(csv_number(r.err_u));
  row.push_back(csv_number(r.err_psi));
  row.push_back(csv_number(r.mass_err));
  row.push_back(csv_number(r.mass_err_max));
  if (times) {
    row.push_back(csv_number(r.fom_time));
    row.push_back(csv_number(r.rom_time));
  }
  return row;
}

std::vector<std::string> record_header(bool times) {
  std::vector<std::string> h{"test",  "alpha",  "beta",    "delta1",   "delta2",  "eps_rb",      "eps_ei",
                             "mode",  "status", "err_u",   "err_psi",  "mass_err", "mass_err_max"};
  if (times) {
    h.push_back("fom_time");
    h.push_back("rom_time");
  }
  return h;
}

// Runs every (eps_rb, eps_ei) cell against the cached FOM references.
std::vector<ErrorRecord> sweep(const StudyContext& ctx, const offline::ReducedModel& base, const FomReferences& refs,
                               const std::vector<bool>& modes, bool with_errors, int workers) {
  std::vector<ErrorRecord> out;
  for (double rb : sorted_unique_desc(ctx.config.eps_rb_grid)) {
    for (double ei : sorted_unique_desc(ctx.config.eps_ei_grid)) {
      const auto model = std::make_shared<const offline::ReducedModel>(base.truncated_to(rb, ei));
      const online::RomSolver rom(model);
      for (bool conservative : modes) {
        std::vector<ErrorRecord> recs(refs.mus.size());
        util::parallel_for(refs.mus.size(), workers, [&](std::size_t k) {
          if (refs.trajectories[k].states.empty()) {
            recs[k].mu = refs.mus[k];
            recs[k].eps_rb = rb;
            recs[k].eps_ei = ei;
            recs[k].conservative = conservative;
            recs[k].ok = false;
            recs[k].failure = "reference failed: " + refs.failures[k];
          } else {
            recs[k] = compare(ctx, rom, refs.trajectories[k], conservative, with_errors);
          }
          recs[k].test_index = static_cast<int>(k);
        });
        out.insert(out.end(), recs.begin(), recs.end());
      }
    }
  }
  return out;
}

}  // namespace

ErrorSurface run_error_surface(const StudyContext& ctx, const OfflineResult* offline) {
  OfflineResult storage;
  const auto base = base_model(ctx, offline, storage);
  const FomReferences refs = fom_references(ctx, ctx.config.test_parameters());
  ErrorSurface s;
  s.records = sweep(ctx, *base, refs, {!ctx.config.non_conservative}, true, ctx.config.workers);
  for (double rb : sorted_unique_desc(ctx.config.eps_rb_grid)) {
    for (double ei : sorted_unique_desc(ctx.config.eps_ei_grid)) {
      SurfaceCell cell{rb, ei, 0.0, 0.0, 0.0, 0};
      for (const auto& r : s.records) {
        if (r.eps_rb != rb || r.eps_ei != ei) continue;
        if (!r.ok) ++cell.failures;
        cell.max_err_u = std::max(cell.max_err_u, std::min(1.0, r.ok ? r.err_u : 1.0));
        cell.max_err_psi = std::max(cell.max_err_psi, std::min(1.0, r.ok ? r.err_psi : 1.0));
        cell.max_mass_err = std::max(cell.max_mass_err, std::min(1.0, r.ok ? r.mass_err : 1.0));
      }
      s.cells.push_back(cell);
    }
  }
  if (!ctx.config.out.empty()) {
    std::ofstream os = open_output(ctx, "error_surface_records.csv");
    csv_row(os, record_header(false));
    for (const auto& r : s.records) csv_row(os, record_cells(r, false));
    std::ofstream cs = open_output(ctx, "error_surface.csv");
    csv_row(cs, {"eps_rb", "eps_ei", "max_err_u", "max_err_psi", "max_mass_err", "failures"});
    for (const auto& c : s.cells)
      csv_row(cs, {csv_number(c.eps_rb), csv_number(c.eps_ei), csv_number(c.max_err_u), csv_number(c.max_err_psi),
                   csv_number(c.max_mass_err), std::to_string(c.failures)});
    write_metadata(ctx, "error_surface", {kErrorConvention, "failed runs count as error 1; maxima truncated at 1"});
  }
  return s;
}

ConservationTable run_conservation(const StudyContext& ctx, const OfflineResult* offline) {
  OfflineResult storage;
  const auto base = base_model(ctx, offline, storage);
  const FomReferences refs = fom_references(ctx, ctx.config.test_parameters());
  ConservationTable t;
  t.records = sweep(ctx, *base, refs, {true, false}, false, ctx.config.workers);
  for (double rb : sorted_unique_desc(ctx.config.eps_rb_grid)) {
    for (double ei : sorted_unique_desc(ctx.config.eps_ei_grid)) {
      for (bool cons : {true, false}) {
        ConservationCell cell{rb, ei, cons, 0.0, 0.0, 0};
        for (const auto& r : t.records) {
          if (r.eps_rb != rb || r.eps_ei != ei || r.conservative != cons) continue;
          if (!r.ok) {
            ++cell.failures;
            continue;
          }
          cell.max_mass_err = std::max(cell.max_mass_err, r.mass_err);
          cell.max_mass_err_over_time = std::max(cell.max_mass_err_over_time, r.mass_err_max);
        }
        t.cells.push_back(cell);
      }
    }
  }
  if (!ctx.config.out.empty()) {
    std::ofstream os = open_output(ctx, "conservation_records.csv");
    csv_row(os, record_header(false));
    for (const auto& r : t.records) csv_row(os, record_cells(r, false));
    std::ofstream cs = open_output(ctx, "conservation.csv");
    csv_row(cs, {"eps_rb", "eps_ei", "mode", "max_mass_err", "max_mass_err_over_time", "failures"});
    for (const auto& c : t.cells)
      csv_row(cs, {csv_number(c.eps_rb), csv_number(c.eps_ei), c.conservative ? "conservative" : "non-conservative",
                   csv_number(c.max_mass_err), csv_number(c.max_mass_err_over_time), std::to_string(c.failures)});
    write_metadata(ctx, "conservation", {kErrorConvention, "failed runs are excluded from the maxima and counted"});
  }
  return t;
}

SpeedupTable run_speedup(const StudyContext& ctx, const OfflineResult* offline) {
  OfflineResult storage;
  const auto base = base_model(ctx, offline, storage);
  const StudyConfig& c = ctx.config;
  const auto mus = c.test_parameters();
  const int N = c.steps();
  // Single-threaded, best of `speedup_repeats`.
  FomReferences refs;
  refs.mus = mus;
  refs.failures.resize(mus.size());
  for (std::size_t k = 0; k < mus.size(); ++k) {
    fom::Trajectory best;
    for (int r = 0; r < c.speedup_repeats; ++r) {
      try {
        fom::Trajectory t = ctx.solver->solve_trajectory(mus[k], N, c.dt);
        if (best.states.empty() || t.wall_time < best.wall_time) best = std::move(t);
      } catch (const Error& e) {
        refs.failures[k] = e.what();
        break;
      }
    }
    refs.trajectories.push_back(std::move(best));
  }
  SpeedupTable t;
  for (double rb : sorted_unique_desc(c.eps_rb_grid)) {
    for (double ei : sorted_unique_desc(c.eps_ei_grid)) {
      const auto model = std::make_shared<const offline::ReducedModel>(base->truncated_to(rb, ei));
      const online::RomSolver rom(model);
      std::vector<double> fom_times, cons_times, plain_times, cons_speed, plain_speed;
      for (std::size_t k = 0; k < mus.size(); ++k) {
        if (refs.trajectories[k].states.empty()) continue;
        // Both modes alternate within each round so drifts affect them alike.
        ErrorRecord best[2];
        for (int r = 0; r < c.rom_repeats; ++r) {
          for (int m = 0; m < 2; ++m) {
            ErrorRecord rec = compare(ctx, rom, refs.trajectories[k], m == 0, false);
            if (r == 0 || (rec.ok && rec.rom_time < best[m].rom_time)) best[m] = rec;
          }
        }
        for (int m = 0; m < 2; ++m) {
          best[m].test_index = static_cast<int>(k);
          t.records.push_back(best[m]);
          if (!best[m].ok) continue;
          (m == 0 ? cons_times : plain_times).push_back(best[m].rom_time);
          (m == 0 ? cons_speed : plain_speed).push_back(best[m].fom_time / best[m].rom_time);
        }
        fom_times.push_back(refs.trajectories[k].wall_time);
      }
      t.cells.push_back({rb, ei, median(fom_times), median(cons_times), median(plain_times), median(cons_speed),
                         median(plain_speed)});
    }
  }
  if (!c.out.empty()) {
    std::ofstream os = open_output(ctx, "speedup_records.csv");
    csv_row(os, record_header(true));
    for (const auto& r : t.records) csv_row(os, record_cells(r, true));
    std::ofstream cs = open_output(ctx, "speedup.csv");
    csv_row(cs, {"eps_rb", "eps_ei", "median_fom_time", "median_rom_time_conservative", "median_rom_time_plain",
                 "median_speedup_conservative", "median_speedup_plain"});
    for (const auto& x : t.cells)
      csv_row(cs, {csv_number(x.eps_rb), csv_number(x.eps_ei), csv_number(x.median_fom_time),
                   csv_number(x.median_rom_time_conservative), csv_number(x.median_rom_time_plain),
                   csv_number(x.median_speedup_conservative), csv_number(x.median_speedup_plain)});
    write_metadata(ctx, "speedup", {"times are time-loop wall clock seconds; ROM excludes model loading and output",
                                    "single-threaded, best of speedup_repeats FOM runs and rom_repeats ROM runs per parameter"});
  }
  return t;
}

// svd-compare ----------------------------------------------------------------

Eigen::VectorXd eulerian_embedding(const fem::Discretization& disc, const fem::Field& u, const fem::Field& psi,
                                   const std::vector<fem::Point>& points) {
  const fem::Mesh& mesh = disc.mesh();
  const int nc = mesh.num_cells();
  auto X = [&](int v) { return fem::Point(psi.values[2 * v], psi.values[2 * v + 1]); };
  Eigen::Vector2d lo = X(0), hi = X(0);
  for (int v = 1; v < mesh.num_vertices(); ++v) {
    lo = lo.cwiseMin(X(v));
    hi = hi.cwiseMax(X(v));
  }
  // Bucket grid over the mapped mesh.
  const int nb = std::max(1, static_cast<int>(std::sqrt(static_cast<double>(nc))));
  const Eigen::Vector2d span = (hi - lo).cwiseMax(1e-12);
  auto bucket = [&](double x, int axis) {
    const int b = static_cast<int>((x - lo[axis]) / span[axis] * nb);
    return std::clamp(b, 0, nb - 1);
  };
  std::vector<std::vector<int>> buckets(static_cast<std::size_t>(nb) * nb);
  for (int t = 0; t < nc; ++t) {
    const auto& c = mesh.cells[t];
    Eigen::Vector2d a = X(c[0]), b = X(c[0]);
    for (int i = 1; i < 3; ++i) {
      a = a.cwiseMin(X(c[i]));
      b = b.cwiseMax(X(c[i]));
    }
    for (int i = bucket(a.x(), 0); i <= bucket(b.x(), 0); ++i)
      for (int j = bucket(a.y(), 1); j <= bucket(b.y(), 1); ++j) buckets[static_cast<std::size_t>(i) * nb + j].push_back(t);
  }
  const double tol = 1e-12;
  Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(points.size()));
  for (std::size_t k = 0; k < points.size(); ++k) {
    const fem::Point& x = points[k];
    if (x.x() < lo.x() - tol || x.y() < lo.y() - tol || x.x() > hi.x() + tol || x.y() > hi.y() + tol) continue;
    for (int t : buckets[static_cast<std::size_t>(bucket(x.x(), 0)) * nb + bucket(x.y(), 1)]) {
      const auto& c = mesh.cells[t];
      const fem::Point p0 = X(c[0]), p1 = X(c[1]), p2 = X(c[2]);
      Eigen::Matrix2d B;
      B << p1 - p0, p2 - p0;
      const Eigen::Vector2d l = B.inverse() * (x - p0);
      const double l0 = 1.0 - l.x() - l.y();
      if (l.x() >= -tol && l.y() >= -tol && l0 >= -tol) {
        out[static_cast<Eigen::Index>(k)] = l0 * u.values[c[0]] + l.x() * u.values[c[1]] + l.y() * u.values[c[2]];
        break;
      }
    }
  }
  return out;
}

namespace {

fem::SparseMatrix p1_mass(const fem::Mesh& mesh, int components) {
  std::vector<Eigen::Triplet<double>> trips;
  for (int t = 0; t < mesh.num_cells(); ++t) {
    const double area = std::abs(mesh.signed_area(t));
    const auto& c = mesh.cells[t];
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j)
        for (int k = 0; k < components; ++k)
          trips.emplace_back(components * c[i] + k, components * c[j] + k, area / 12.0 * (i == j ? 2.0 : 1.0));
  }
  fem::SparseMatrix M(components * mesh.num_vertices(), components * mesh.num_vertices());
  M.setFromTriplets(trips.begin(), trips.end());
  return M;
}


}  // namespace

Eigen::VectorXd weighted_singular_values(const Eigen::MatrixXd& S, const fem::SparseMatrix& W) {
  const Eigen::MatrixXd G = S.transpose() * (W * S);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (G + G.transpose()));
  return es.eigenvalues().reverse().cwiseMax(0.0).cwiseSqrt();
}

SvdComparison run_svd_compare(const StudyContext& ctx) {
  const StudyConfig& c = ctx.config;
  const fom::Trajectory traj = ctx.solver->solve_trajectory(c.mu, c.steps(), c.dt);
  const fem::Mesh& mesh = ctx.disc->mesh();
  const double E = c.background_extent;
  for (const auto& s : traj.states) {
    for (int v : mesh.boundary_vertices) {
      if (std::abs(s.psi.values[2 * v]) > E || std::abs(s.psi.values[2 * v + 1]) > E)
        throw PointLocationFailure("the domain leaves the background square at step " + std::to_string(s.n));
    }
  }
  const int n_bg = static_cast<int>(std::ceil(2.0 * E / c.background_h));
  const fem::Mesh bg = fem::generate_square_mesh(-E, E, n_bg);

  const auto T = static_cast<Eigen::Index>(traj.states.size());
  Eigen::MatrixXd U(ctx.disc->scalar_dofs(), T), P(ctx.disc->vector_dofs(), T), Ue(bg.num_vertices(), T);
  for (Eigen::Index n = 0; n < T; ++n) {
    const auto& s = traj.states[static_cast<std::size_t>(n)];
    U.col(n) = s.u.values;
    P.col(n) = s.psi.values - ctx.solver->identity().values;
    Ue.col(n) = eulerian_embedding(*ctx.disc, s.u, s.psi, bg.vertices);
  }
  SvdComparison out;
  out.background_vertices = bg.num_vertices();
  out.lagrangian_u = weighted_singular_values(U, p1_mass(mesh, 1));
  out.lagrangian_psi = weighted_singular_values(P, p1_mass(mesh, 2));
  out.eulerian_u = weighted_singular_values(Ue, p1_mass(bg, 1));

  if (!c.out.empty()) {
    std::ofstream os = open_output(ctx, "svd_compare.csv");
    csv_row(os, {"k", "sigma_lagrangian_u", "sigma_lagrangian_psi", "sigma_eulerian_u", "rel_lagrangian_u",
                 "rel_lagrangian_psi", "rel_eulerian_u"});
    for (Eigen::Index k = 0; k < T; ++k) {
      auto rel = [&](const Eigen::VectorXd& s) { return s[0] > 0.0 ? s[k] / s[0] : 0.0; };
      csv_row(os, {std::to_string(k + 1), csv_number(out.lagrangian_u[k]), csv_number(out.lagrangian_psi[k]),
                   csv_number(out.eulerian_u[k]), csv_number(rel(out.lagrangian_u)),
                   csv_number(rel(out.lagrangian_psi)), csv_number(rel(out.eulerian_u))});
    }
    write_metadata(ctx, "svd_compare",
                   {"mu " + c.mu.to_string(), "background [-E, E]^2 with " + std::to_string(n_bg) +
                                                  " intervals per axis, points on mapped edges count as inside",
                    "singular values in the L2 inner product; Psi snapshots are Psi - id"});
  }
  return out;
}

// variance -------------------------------------------------------------------

VarianceSweep run_variance_sweep(const StudyContext& ctx, const OfflineResult* offline) {
  const StudyConfig& c = ctx.config;
  std::shared_ptr<const offline::ReducedModel> model;
  if (offline) {
    model = std::make_shared<const offline::ReducedModel>(offline->model->truncated_to(c.eps_rb, c.eps_ei));
  } else {
    StudyConfig tc = c;
    tc.eps_rb_grid = {c.eps_rb};
    tc.eps_ei_grid = {c.eps_ei};
    const StudyContext tctx(tc);
    model = run_offline(tctx, false).model;
  }
  const online::RomSolver rom(model);
  std::vector<int> idx;
  for (double t : c.variance_times) idx.push_back(static_cast<int>(std::lround(t / c.dt)));
  const int N = *std::max_element(idx.begin(), idx.end());
  const int n = c.variance_grid;
  auto axis = [&](int a, int i) {
    return n == 1 ? c.domain.lo[a] : c.domain.lo[a] + (c.domain.hi[a] - c.domain.lo[a]) * i / (n - 1);
  };
  VarianceSweep s;
  s.rows.resize(static_cast<std::size_t>(n) * n);
  util::parallel_for(s.rows.size(), c.workers, [&](std::size_t k) {
    VarianceRow& row = s.rows[k];
    row.delta1 = axis(2, static_cast<int>(k) / n);
    row.delta2 = axis(3, static_cast<int>(k) % n);
    fom::Parameters mu = c.mu;
    mu.delta = {row.delta1, row.delta2};
    try {
      const online::RomTrajectory t = rom.solve(mu, N, c.dt, true);
      for (int i : idx) row.variance.push_back(online::rom_variance(*model, t.states[static_cast<std::size_t>(i)]));
    } catch (const Error&) {
      row.ok = false;
      row.variance.assign(idx.size(), std::numeric_limits<double>::quiet_NaN());
    }
  });
  if (!c.out.empty()) {
    std::ofstream os = open_output(ctx, "variance.csv");
    std::vector<std::string> head{"delta1", "delta2", "status"};
    for (double t : c.variance_times) head.push_back("V_t" + csv_number(t));
    csv_row(os, head);
    for (const auto& r : s.rows) {
      std::vector<std::string> row{csv_number(r.delta1), csv_number(r.delta2), r.ok ? "ok" : "failed"};
      for (double v : r.variance) row.push_back(csv_number(v));
      csv_row(os, row);
    }
    write_metadata(ctx, "variance", {"alpha " + csv_number(c.mu.alpha) + " beta " + csv_number(c.mu.beta),
                                     "conservative reduced model at eps_rb " + csv_number(c.eps_rb) + " eps_ei " +
                                         csv_number(c.eps_ei)});
  }
  return s;
}

}  // namespace osmorom::harness
