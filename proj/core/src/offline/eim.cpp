#include "osmorom/offline/eim.hpp"

#include <cmath>

#include "osmorom/errors.hpp"

namespace osmorom::offline {

int EimData::size_for(double eps) const {
  for (int m = 0; m < static_cast<int>(error_history.size()); ++m)
    if (error_history[m] < eps) return std::min(m, size());
  return size();
}

EimData EimData::truncated(int m) const {
  if (m < 0 || m > size()) throw DimensionMismatch("cannot truncate EIM of size " + std::to_string(size()));
  EimData e = *this;
  e.basis = basis.leftCols(m);
  e.index.resize(m);
  e.interpolation = interpolation.topLeftCorner(m, m);
  e.gamma = gamma.leftCols(m);
  e.error_history.resize(std::min<std::size_t>(error_history.size(), m + 1));
  return e;
}

EimData eim_greedy(TrainingSet training, double eps_ei, int max_size) {
  const Eigen::Index rows = training.samples.rows();
  const Eigen::Index n = training.samples.cols();
  EimData eim;
  eim.id = training.id;
  eim.set = training.set;
  eim.components = training.components;
  eim.eps_ei = eps_ei;
  if (n == 0 || rows == 0) throw ZeroTrainingSet("empty training set for c" + std::to_string(training.id));

  Eigen::VectorXd scale(n);
  for (Eigen::Index s = 0; s < n; ++s) scale[s] = training.samples.col(s).cwiseAbs().maxCoeff();
  if (!(scale.maxCoeff() > 0.0)) throw ZeroTrainingSet("all training samples of c" + std::to_string(training.id) +
                                                       " vanish");

  Eigen::MatrixXd R = std::move(training.samples);  // residuals, updated in place
  std::vector<Eigen::VectorXd> basis;
  std::vector<Eigen::VectorXd> gammas;  // each of length n
  std::vector<Eigen::VectorXd> thetas;  // row m: coefficient of basis m for every sample

  auto worst = [&](Eigen::Index& arg) {
    double e = -1.0;
    arg = 0;
    for (Eigen::Index s = 0; s < n; ++s) {
      const double err = scale[s] > 0.0 ? R.col(s).cwiseAbs().maxCoeff() / scale[s] : 0.0;
      if (err > e) {
        e = err;
        arg = s;
      }
    }
    return e;
  };

  Eigen::Index s_star;
  double err = worst(s_star);
  eim.error_history.push_back(err);
  const Eigen::Index cap = max_size > 0 ? std::min<Eigen::Index>(max_size, rows) : rows;
  while (err >= eps_ei && static_cast<Eigen::Index>(basis.size()) < cap) {
    Eigen::Index p;
    const double peak = R.col(s_star).cwiseAbs().maxCoeff(&p);
    if (!(peak > 0.0)) break;
    const double rp = R(p, s_star);
    Eigen::VectorXd q = R.col(s_star) / rp;
    q[p] = 1.0;

    // New basis vector in terms of training samples: (e_s* - sum_j theta_j(s*) gamma_j) / r_p.
    Eigen::VectorXd g = Eigen::VectorXd::Zero(n);
    g[s_star] = 1.0;
    for (std::size_t j = 0; j < basis.size(); ++j) g -= thetas[j][s_star] * gammas[j];
    g /= rp;

    const Eigen::RowVectorXd coef = R.row(p);
    R.noalias() -= q * coef;
    R.row(p).setZero();
    thetas.push_back(coef.transpose());
    basis.push_back(std::move(q));
    gammas.push_back(std::move(g));
    eim.index.push_back(static_cast<int>(p));
    err = worst(s_star);
    eim.error_history.push_back(err);
  }

  const int M = static_cast<int>(basis.size());
  eim.basis.resize(rows, M);
  eim.gamma.resize(n, M);
  for (int m = 0; m < M; ++m) {
    eim.basis.col(m) = basis[m];
    eim.gamma.col(m) = gammas[m];
  }
  eim.interpolation.resize(M, M);
  for (int i = 0; i < M; ++i)
    for (int j = 0; j < M; ++j) eim.interpolation(i, j) = eim.basis(eim.index[i], j);
  return eim;
}

Eigen::VectorXd eim_theta(const Eigen::MatrixXd& L, const Eigen::VectorXd& v) {
  const Eigen::Index M = v.size();
  if (M > L.rows()) throw DimensionMismatch("more interpolation values than pairs");
  return L.topLeftCorner(M, M).triangularView<Eigen::UnitLower>().solve(v);
}

Eigen::VectorXd eim_theta(const EimData& eim, const Eigen::VectorXd& v) { return eim_theta(eim.interpolation, v); }

}  // namespace osmorom::offline
