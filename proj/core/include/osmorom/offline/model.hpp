#pragma once

#include <array>
#include <vector>

#include <Eigen/Core>

#include "osmorom/fom/solver.hpp"
#include "osmorom/offline/campaign.hpp"
#include "osmorom/offline/eim.hpp"
#include "osmorom/offline/pod.hpp"

namespace osmorom::offline {

/// Local data for evaluating c_i at its interpolation pairs from reduced
/// coefficients. Row m belongs to pair m. With deformation coefficients d,
/// F = I + sum_k d_k dF(m, 4k .. 4k+3) (row-major 2x2).
struct InterpolationGeometry {
  std::vector<int> component;
  Eigen::MatrixXd dF;            // M x 4 K_def
  Eigen::MatrixXd eta;           // M x 2 K_def, deformation-mode values (c4 velocity)
  Eigen::MatrixXd phi;           // M x K_conc, concentration-mode values (c7)
  Eigen::MatrixXd normal;        // M x 2, reference normal (boundary coefficients)
  Eigen::MatrixXd interpolation; // M x M unit lower triangular

  int size() const { return static_cast<int>(component.size()); }
};

/// Everything the online phase needs, plus the bases and interpolation data
/// it was built from.
struct ReducedModel {
  TrainingConfig config;
  int num_shapes = 0;
  ReducedBasis bnd;   // boundary velocity, L2(boundary)
  ReducedBasis def;   // Psi - id, H1 vector
  ReducedBasis conc;  // concentration, H1, constant first
  std::array<EimData, 7> eim;
  std::array<InterpolationGeometry, 7> geometry;

  /// a[i-1][m]: projected matrix of a_i with coefficient c_i^m (test rows).
  std::array<std::vector<Eigen::MatrixXd>, 5> a;
  /// l[0][m] from c6^m, l[1][m] from c7^m.
  std::array<std::vector<Eigen::VectorXd>, 2> l;
  Eigen::MatrixXd extension;  // K_def x K_bnd, P_r E_h on the trace basis
  Eigen::VectorXd u0;         // reduced u_init
  Eigen::MatrixXd shapes0;    // K_def x L, reduced E_h(I_Gamma(r_l))
  double norm_one = 1.0;      // |1| in the concentration inner product

  /// Exact a3(phi_j, 1; id + sum d_k psi_k) = mass0_j + mass1_j. d + sum_kl mass2(j, k K + l) d_k d_l.
  Eigen::VectorXd mass0;
  Eigen::MatrixXd mass1;
  Eigen::MatrixXd mass2;
  /// Exact a3(phi_j, phi_i; Psi), same layout with row index i K_conc + j.
  bool has_variance = false;
  Eigen::MatrixXd var0;
  Eigen::MatrixXd var1;
  Eigen::MatrixXd var2;

  int k_bnd() const { return bnd.size(); }
  int k_def() const { return def.size(); }
  int k_conc() const { return conc.size(); }
  int m(int i) const { return geometry[i - 1].size(); }
  std::array<int, 7> eim_sizes() const;

  /// Sub-model with the leading basis vectors and interpolation functions.
  ReducedModel truncated(int k_bnd, int k_def, int k_conc, const std::array<int, 7>& m) const;
  /// Sub-model for looser tolerances, using the stored spectra and greedy
  /// error histories (identical to rebuilding with those tolerances).
  ReducedModel truncated_to(double eps_rb, double eps_ei) const;
};

/// POD bases per snapshot kind (or complete bases when configured).
struct BasisSet {
  ReducedBasis bnd, def, conc;
};
BasisSet build_bases(const fom::FomSolver& solver, const Campaign& campaign, const TrainingConfig& config);

/// EIM for c1..c7, built one coefficient at a time to bound peak memory.
std::array<EimData, 7> build_eim(const fom::FomSolver& solver, const Campaign& campaign,
                                 const TrainingConfig& config);

/// Assembles and projects every operator onto the bases.
ReducedModel project_operators(const fom::FomSolver& solver, const BasisSet& bases, std::array<EimData, 7> eim,
                               const TrainingConfig& config);

/// Campaign -> bases -> EIM -> projection.
ReducedModel build_reduced_model(const fom::FomSolver& solver, const Campaign& campaign);

}  // namespace osmorom::offline
