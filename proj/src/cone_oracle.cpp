#include "lowrank/cone_oracle.hpp"

#include <limits>

namespace lowrank::verify {

namespace {

// Orthonormal basis of range(A) from column-pivoted Householder QR.
Matrix range_basis(const Matrix& A) {
  Eigen::ColPivHouseholderQR<Matrix> qr(A);
  qr.setThreshold(1e-10);
  const Eigen::Index k = qr.rank();
  const Matrix Q = qr.householderQ() * Matrix::Identity(A.rows(), A.rows());
  return Q.leftCols(k);
}

}  // namespace

Matrix random_gaussian(Eigen::Index m, Eigen::Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Matrix A(m, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < m; ++i) A(i, j) = g(rng);
  }
  return A;
}

Matrix random_rank_matrix(Eigen::Index m, Eigen::Index n, Eigen::Index rank,
                          std::mt19937_64& rng) {
  if (rank == 0) return Matrix::Zero(m, n);
  return random_gaussian(m, rank, rng) * random_gaussian(n, rank, rng).transpose();
}

ConeSearchResult brute_force_cone_projection(const Matrix& X, const Matrix& Z,
                                             Eigen::Index r, int restarts,
                                             std::mt19937_64& rng, int sweeps) {
  const Eigen::Index m = X.rows();
  const Eigen::Index n = X.cols();
  const Matrix U = range_basis(X);
  const Matrix V = range_basis(X.transpose());
  const Eigen::Index s = U.cols();

  const Matrix Pu = U * U.transpose();
  const Matrix Pv = V * V.transpose();
  const Matrix Im = Matrix::Identity(m, m);
  const Matrix In = Matrix::Identity(n, n);
  const Matrix W = (Im - Pu) * Z * (In - Pv);
  const Matrix overlap = Z - W;

  const Eigen::Index k = r - s;
  ConeSearchResult result{overlap, W.norm()};
  if (k <= 0) return result;

  for (int attempt = 0; attempt < restarts; ++attempt) {
    Matrix C = random_gaussian(n, k, rng);
    Matrix A(m, k);
    for (int sweep = 0; sweep < sweeps; ++sweep) {
      A = (W * C) * (C.transpose() * C).completeOrthogonalDecomposition().pseudoInverse();
      C = (W.transpose() * A) *
          (A.transpose() * A).completeOrthogonalDecomposition().pseudoInverse();
    }
    const Matrix block = A * C.transpose();
    const double distance = (W - block).norm();
    if (distance < result.distance) result = {overlap + block, distance};
  }
  return result;
}

}  // namespace lowrank::verify
