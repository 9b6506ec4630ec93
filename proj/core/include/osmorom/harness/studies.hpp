#pragma once

#include <memory>
#include <string>
#include <vector>

#include "osmorom/fom/solver.hpp"
#include "osmorom/harness/config.hpp"
#include "osmorom/offline/model.hpp"
#include "osmorom/online/rom.hpp"

namespace osmorom::harness {

/// Mesh and full-order solver for a study, plus the mesh fingerprint that
/// goes into every metadata file.
struct StudyContext {
  StudyConfig config;
  std::shared_ptr<const fem::Discretization> disc;
  std::shared_ptr<const fom::FomSolver> solver;
  std::string mesh_hash;

  explicit StudyContext(StudyConfig cfg);
};

/// SHA-256 of the mesh in its text format.
std::string mesh_sha256(const fem::Mesh& mesh);

/// Writes `<out>/<name>_metadata.txt`: config echo, mesh hash and notes.
void write_metadata(const StudyContext& ctx, const std::string& name, const std::vector<std::string>& notes = {});

// fom ------------------------------------------------------------------------

struct FomSummary {
  fom::Trajectory trajectory;
  std::vector<double> mass, variance, displacement;
  double mass_drift = 0.0;  // max_n |m(n) - m(0)| / m(0)
};
FomSummary run_fom(const StudyContext& ctx);

// offline --------------------------------------------------------------------

struct SizeRow {
  double eps_rb, eps_ei;
  int k_bnd, k_def, k_conc;
  std::array<int, 7> m;
};
struct OfflineResult {
  std::shared_ptr<const offline::ReducedModel> model;  // at the finest tolerances
  std::vector<SizeRow> sizes;                          // one row per (eps_rb, eps_ei)
  std::vector<offline::CampaignEntry> report;
};
/// Builds the model at the smallest requested tolerances (eps_rb/eps_ei and
/// the tolerance grids) and derives all coarser models by truncation.
OfflineResult run_offline(const StudyContext& ctx, bool save = true);

// rom ------------------------------------------------------------------------

struct RomSummary {
  online::RomTrajectory trajectory;
  std::vector<double> mass, variance;
};
/// Loads the model from config.model_dir() unless one is given.
RomSummary run_rom(const StudyContext& ctx, std::shared_ptr<const offline::ReducedModel> model = nullptr);

// comparisons ----------------------------------------------------------------

/// Relative errors of one ROM run against its FOM reference.
struct ErrorRecord {
  int test_index = 0;
  fom::Parameters mu;
  double eps_rb = 0.0, eps_ei = 0.0;
  bool conservative = true;
  bool ok = true;
  std::string failure;
  double err_u = 1.0;         // max_n |u_h - u_r|_H1 / max_n |u_h|_H1
  double err_psi = 1.0;       // same for Psi in (H1)^2
  double mass_err = 1.0;      // |m_r(N) - m_r(0)| / m_r(0)
  double mass_err_max = 1.0;  // max over n of the same
  double fom_time = 0.0, rom_time = 0.0;
};

/// FOM references for the test set, computed once per study.
struct FomReferences {
  std::vector<fom::Parameters> mus;
  std::vector<fom::Trajectory> trajectories;  // empty states when the FOM failed
  std::vector<std::string> failures;
};
FomReferences fom_references(const StudyContext& ctx, const std::vector<fom::Parameters>& mus);

/// Runs the ROM for one test parameter and compares with the reference.
/// Reduced solver failures produce ok = false and errors of 1.
ErrorRecord compare(const StudyContext& ctx, const online::RomSolver& rom, const fom::Trajectory& reference,
                    bool conservative, bool with_errors = true);

struct SurfaceCell {
  double eps_rb, eps_ei;
  double max_err_u, max_err_psi, max_mass_err;  // truncated at 1
  int failures;
};
struct ErrorSurface {
  std::vector<ErrorRecord> records;
  std::vector<SurfaceCell> cells;
};
ErrorSurface run_error_surface(const StudyContext& ctx, const OfflineResult* offline = nullptr);

struct ConservationCell {
  double eps_rb, eps_ei;
  bool conservative;
  double max_mass_err, max_mass_err_over_time;
  int failures;
};
struct ConservationTable {
  std::vector<ErrorRecord> records;
  std::vector<ConservationCell> cells;
};
ConservationTable run_conservation(const StudyContext& ctx, const OfflineResult* offline = nullptr);

struct SpeedupCell {
  double eps_rb, eps_ei;
  double median_fom_time, median_rom_time_conservative, median_rom_time_plain;
  double median_speedup_conservative, median_speedup_plain;
};
struct SpeedupTable {
  std::vector<ErrorRecord> records;
  std::vector<SpeedupCell> cells;
};
/// Single-threaded timings; each FOM and ROM run is repeated
/// speedup_repeats times and the fastest run is kept.
SpeedupTable run_speedup(const StudyContext& ctx, const OfflineResult* offline = nullptr);

struct SvdComparison {
  Eigen::VectorXd lagrangian_u, lagrangian_psi, eulerian_u;  // L2-weighted singular values
  int background_vertices = 0;
};
SvdComparison run_svd_compare(const StudyContext& ctx);

/// Eulerian embedding of a reference-domain field: value of u at Psi^{-1}(x)
/// for every x inside Psi(mesh) (closed), zero outside.
Eigen::VectorXd eulerian_embedding(const fem::Discretization& disc, const fem::Field& u, const fem::Field& psi,
                                   const std::vector<fem::Point>& points);

/// All singular values of the snapshot matrix S in the inner product W,
/// largest first (square roots of the eigenvalues of S^T W S).
Eigen::VectorXd weighted_singular_values(const Eigen::MatrixXd& S, const fem::SparseMatrix& W);

struct VarianceRow {
  double delta1, delta2;
  std::vector<double> variance;  // one per config.variance_times
  bool ok = true;
};
struct VarianceSweep {
  std::vector<VarianceRow> rows;
};
VarianceSweep run_variance_sweep(const StudyContext& ctx, const OfflineResult* offline = nullptr);

}  // namespace osmorom::harness
