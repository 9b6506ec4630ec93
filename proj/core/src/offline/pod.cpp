#include "osmorom/offline/pod.hpp"

#include <cmath>

#include <Eigen/Dense>

#include "osmorom/errors.hpp"

namespace osmorom::offline {

ReducedBasis ReducedBasis::truncated(int k) const {
  if (k < 0 || k > size()) throw DimensionMismatch("cannot truncate basis of size " + std::to_string(size()) +
                                                   " to " + std::to_string(k));
  ReducedBasis b = *this;
  b.modes = modes.leftCols(k);
  return b;
}

Eigen::VectorXd ReducedBasis::project(const fem::InnerProduct& ip, const Eigen::VectorXd& x) const {
  return modes.transpose() * (ip.matrix * x);
}

int truncation_size(const Eigen::VectorXd& sigma, double reference, double eps) {
  const int n = static_cast<int>(sigma.size());
  if (!(reference > 0.0)) return 0;
  for (int k = 0; k < n; ++k)
    if (sigma[k] / reference < eps) return k;
  return n;
}

Eigen::MatrixXd gram(const fem::InnerProduct& ip, const Eigen::MatrixXd& modes) {
  return modes.transpose() * (ip.matrix * modes);
}

namespace {

// Two passes of modified Gram-Schmidt in the W inner product. Restores
// orthonormality lost by the squared-spectrum eigen-decomposition.
void reorthonormalize(const fem::InnerProduct& ip, Eigen::MatrixXd& V, int fixed) {
  for (int pass = 0; pass < 2; ++pass) {
    for (int k = fixed; k < V.cols(); ++k) {
      for (int j = 0; j < k; ++j) {
        const double c = V.col(j).dot(ip.matrix * V.col(k));
        V.col(k) -= c * V.col(j);
      }
      const double nrm = std::sqrt(V.col(k).dot(ip.matrix * V.col(k)));
      V.col(k) /= nrm;
    }
  }
}

// Left singular vectors and values of S in the W inner product, sorted by
// decreasing singular value. Uses the smaller of the two Gram matrices.
void weighted_svd(const Eigen::MatrixXd& S, const fem::InnerProduct& ip, Eigen::MatrixXd& U, Eigen::VectorXd& sigma) {
  const Eigen::Index n = S.cols();
  const Eigen::Index dofs = S.rows();
  if (n <= dofs) {
    Eigen::MatrixXd G = S.transpose() * (ip.matrix * S);
    G = 0.5 * (G + G.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(G);
    const Eigen::VectorXd lam = es.eigenvalues().reverse();
    const Eigen::MatrixXd vec = es.eigenvectors().rowwise().reverse();
    // sigma_k = |S v_k|_W is far more accurate for small values than sqrt(lambda_k).
    U = S * vec;
    sigma.resize(n);
    for (Eigen::Index k = 0; k < n; ++k) {
      sigma[k] = lam[k] > 0.0 ? std::sqrt(std::max(0.0, U.col(k).dot(ip.matrix * U.col(k)))) : 0.0;
      if (sigma[k] > 0.0) U.col(k) /= sigma[k];
    }
  } else {
    const Eigen::MatrixXd W = Eigen::MatrixXd(ip.matrix);
    Eigen::LLT<Eigen::MatrixXd> llt(W);
    if (llt.info() != Eigen::Success) throw SingularSystem("inner product matrix is not positive definite");
    const Eigen::MatrixXd LtS = llt.matrixU() * S;  // L^T S
    Eigen::MatrixXd C = LtS * LtS.transpose();
    C = 0.5 * (C + C.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(C);
    sigma = es.eigenvalues().reverse().cwiseMax(0.0).cwiseSqrt();
    const Eigen::MatrixXd vec = es.eigenvectors().rowwise().reverse();
    U = llt.matrixU().solve(vec);  // L^{-T} u
  }
}

}  // namespace

ReducedBasis pod(const Eigen::MatrixXd& snapshots, const fem::InnerProduct& ip, double eps_rb, bool constant_first,
                 int max_modes) {
  if (snapshots.cols() == 0 || snapshots.rows() == 0) throw EmptySnapshotSet("no snapshots");
  if (snapshots.rows() != ip.matrix.rows()) throw DimensionMismatch("snapshot length does not match inner product");
  ReducedBasis b;
  b.ip_kind = ip.kind;
  b.eps_rb = eps_rb;
  b.constant_included = constant_first;

  Eigen::MatrixXd S = snapshots;
  Eigen::VectorXd one;
  double const_sigma = 0.0;
  if (constant_first) {
    one = Eigen::VectorXd::Ones(S.rows());
    one /= std::sqrt(one.dot(ip.matrix * one));
    const Eigen::RowVectorXd c = (ip.matrix * one).transpose() * S;
    S -= one * c;
    const_sigma = c.norm();
  }
  Eigen::MatrixXd U;
  Eigen::VectorXd sigma;
  weighted_svd(S, ip, U, sigma);
  const double reference = constant_first ? std::max(const_sigma, sigma.size() ? sigma[0] : 0.0) : sigma[0];
  // Modes whose singular value vanishes to rounding carry no information.
  const double floor = 1e-13 * reference;
  int usable = 0;
  while (usable < sigma.size() && sigma[usable] > floor) ++usable;
  int K = std::min(truncation_size(sigma, reference, eps_rb), usable);
  if (!constant_first) K = std::max(K, std::min(1, usable));
  if (max_modes >= 0) K = std::min(K, max_modes);

  const int offset = constant_first ? 1 : 0;
  b.modes.resize(S.rows(), K + offset);
  if (constant_first) b.modes.col(0) = one;
  b.modes.rightCols(K) = U.leftCols(K);
  reorthonormalize(ip, b.modes, offset);

  b.singular_values.resize(sigma.size() + offset);
  if (constant_first) b.singular_values[0] = const_sigma;
  b.singular_values.tail(sigma.size()) = sigma;
  return b;
}

ReducedBasis complete_basis(const fem::InnerProduct& ip, bool constant_first) {
  const Eigen::Index n = ip.matrix.rows();
  Eigen::MatrixXd X = Eigen::MatrixXd::Identity(n, n);
  if (constant_first) {
    // [1, e_1, ..., e_{n-1}] spans the space and puts the constant first.
    X.col(0).setOnes();
    for (Eigen::Index k = 1; k < n; ++k) X.col(k) = Eigen::VectorXd::Unit(n, k - 1);
  }
  // Orthonormalize through the Cholesky factor of X^T W X.
  const Eigen::MatrixXd G = X.transpose() * (ip.matrix * X);
  Eigen::LLT<Eigen::MatrixXd> llt(G);
  if (llt.info() != Eigen::Success) throw SingularSystem("complete basis Gram matrix is singular");
  ReducedBasis b;
  b.ip_kind = ip.kind;
  b.constant_included = constant_first;
  b.modes = llt.matrixU().transpose().solve(X.transpose()).transpose();  // X L^{-T}
  b.singular_values = Eigen::VectorXd::Zero(n);
  return b;
}

}  // namespace osmorom::offline
