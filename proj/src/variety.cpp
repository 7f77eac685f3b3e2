#include "lowrank/variety.hpp"

#include <cassert>
#include <cmath>
#include <string>

#include "lowrank/errors.hpp"

namespace lowrank {

namespace {

void require_same_shape(const Matrix& A, const Matrix& B, const char* where) {
  if (A.rows() != B.rows() || A.cols() != B.cols()) {
    throw ShapeMismatch(std::string(where) + ": expected " +
                        std::to_string(A.rows()) + "x" +
                        std::to_string(A.cols()) + ", got " +
                        std::to_string(B.rows()) + "x" +
                        std::to_string(B.cols()));
  }
}

// Column/row space projector pieces of X with its numerical rank s.
struct RangeBases {
  Matrix U;  // m x s
  Matrix V;  // n x s
};

RangeBases leading_bases(const SvdFactors& svd, Eigen::Index s) {
  return {svd.U.leftCols(s), svd.V.leftCols(s)};
}

// Splits Z into its tangent-space part P_U Z + Z P_V - P_U Z P_V and the
// complement block W = Z - tangent.
Matrix tangent_space_part(const RangeBases& bases, const Matrix& Z) {
  if (bases.U.cols() == 0) return Matrix::Zero(Z.rows(), Z.cols());
  const Matrix UtZ = bases.U.transpose() * Z;
  const Matrix ZV = Z * bases.V;
  const Matrix UtZV = UtZ * bases.V;
  return bases.U * UtZ + ZV * bases.V.transpose() -
         bases.U * UtZV * bases.V.transpose();
}

}  // namespace

Matrix SvdFactors::reconstruct() const {
  return U * sigma.asDiagonal() * V.transpose();
}

VarietySpec::VarietySpec(Eigen::Index m, Eigen::Index n, Eigen::Index r,
                         double rank_tol)
    : m_(m), n_(n), r_(r), rank_tol_(rank_tol) {
  if (m < 1 || n < 1) {
    throw InvalidParameter("VarietySpec: m and n must be positive");
  }
  if (r < 1 || r >= std::min(m, n)) {
    throw InvalidParameter("VarietySpec: need 1 <= r < min(m, n), got r = " +
                           std::to_string(r));
  }
  if (!(rank_tol >= 0.0) || !std::isfinite(rank_tol)) {
    throw InvalidParameter("VarietySpec: rank_tol must be finite and >= 0");
  }
}

bool all_finite(const Matrix& X) { return X.allFinite(); }

SvdFactors thin_svd(const Matrix& X) {
  if (!X.allFinite()) {
    throw NonFiniteInput("thin_svd: matrix has NaN or Inf entries");
  }
  Eigen::JacobiSVD<Matrix> svd(X, Eigen::ComputeThinU | Eigen::ComputeThinV);
  SvdFactors out{svd.matrixU(), svd.singularValues(), svd.matrixV()};

  for (Eigen::Index k = 0; k < out.U.cols(); ++k) {
    Eigen::Index pivot = 0;
    double best = -1.0;
    for (Eigen::Index i = 0; i < out.U.rows(); ++i) {
      const double a = std::abs(out.U(i, k));
      if (a > best) {
        best = a;
        pivot = i;
      }
    }
    if (out.U(pivot, k) < 0.0) {
      out.U.col(k) = -out.U.col(k);
      out.V.col(k) = -out.V.col(k);
    }
  }
  return out;
}

Eigen::Index numerical_rank(const SvdFactors& svd, double rank_tol) {
  if (svd.sigma.size() == 0 || svd.sigma(0) <= 0.0) return 0;
  const double threshold = rank_tol * svd.sigma(0);
  Eigen::Index count = 0;
  for (Eigen::Index k = 0; k < svd.sigma.size(); ++k) {
    if (svd.sigma(k) > threshold) ++count;
  }
  return count;
}

Eigen::Index numerical_rank(const Matrix& X, double rank_tol) {
  return numerical_rank(thin_svd(X), rank_tol);
}

Eigen::Index numerical_rank(const Matrix& X, const VarietySpec& spec) {
  return numerical_rank(X, spec.rank_tol());
}

Eigen::Index delta_rank(const SvdFactors& svd, double delta, double rank_tol) {
  if (!(delta >= 0.0)) {
    throw InvalidParameter("delta_rank: delta must be >= 0");
  }
  const Eigen::Index rank = numerical_rank(svd, rank_tol);
  Eigen::Index count = 0;
  while (count < rank && svd.sigma(count) > delta) ++count;
  return count;
}

Eigen::Index delta_rank(const Matrix& X, double delta, double rank_tol) {
  return delta_rank(thin_svd(X), delta, rank_tol);
}

Matrix project_to_rank(const SvdFactors& svd, Eigen::Index target_rank) {
  const Eigen::Index m = svd.U.rows();
  const Eigen::Index n = svd.V.rows();
  if (target_rank < 0 || target_rank > std::min(m, n)) {
    throw RankOutOfRange("project_to_rank: target rank " +
                         std::to_string(target_rank) + " outside [0, " +
                         std::to_string(std::min(m, n)) + "]");
  }
  if (target_rank == 0) return Matrix::Zero(m, n);
  return svd.U.leftCols(target_rank) *
         svd.sigma.head(target_rank).asDiagonal() *
         svd.V.leftCols(target_rank).transpose();
}

Matrix project_to_rank(const Matrix& X, Eigen::Index target_rank) {
  if (target_rank < 0 || target_rank > std::min(X.rows(), X.cols())) {
    throw RankOutOfRange("project_to_rank: target rank " +
                         std::to_string(target_rank) + " outside [0, " +
                         std::to_string(std::min(X.rows(), X.cols())) + "]");
  }
  return project_to_rank(thin_svd(X), target_rank);
}

TangentProjection project_tangent_cone(const Matrix& X, const Matrix& Z,
                                       const VarietySpec& spec) {
  require_same_shape(X, Z, "project_tangent_cone");
  if (X.rows() != spec.rows() || X.cols() != spec.cols()) {
    throw ShapeMismatch("project_tangent_cone: matrix does not match variety");
  }
  if (!Z.allFinite()) {
    throw NonFiniteInput("project_tangent_cone: direction has NaN or Inf");
  }

  const SvdFactors svd = thin_svd(X);
  const Eigen::Index s = numerical_rank(svd, spec.rank_tol());
  const Eigen::Index r = spec.max_rank();
  if (s > r) {
    throw RankExceedsVariety("project_tangent_cone: rank " + std::to_string(s) +
                             " exceeds r = " + std::to_string(r));
  }

  const Matrix tangent = tangent_space_part(leading_bases(svd, s), Z);
  const Matrix W = Z - tangent;
  const SvdFactors w_svd = thin_svd(W);
  const Matrix kept = project_to_rank(w_svd, r - s);

  TangentProjection out;
  out.direction = tangent + kept;
  out.s_f = out.direction.norm();
  out.residual_rank_block = W - kept;

#ifndef NDEBUG
  {
    // Compared in squared form.
    const double kept_sq = w_svd.sigma.head(r - s).squaredNorm();
    const double expected_sq = Z.squaredNorm() - W.squaredNorm() + kept_sq;
    assert(std::abs(out.s_f * out.s_f - expected_sq) <=
           1e-10 * std::max(1.0, Z.squaredNorm()));
  }
#endif
  return out;
}

bool in_tangent_cone(const Matrix& X, const Matrix& V, const VarietySpec& spec,
                     double tol) {
  require_same_shape(X, V, "in_tangent_cone");
  const SvdFactors svd = thin_svd(X);
  const Eigen::Index s = numerical_rank(svd, spec.rank_tol());
  if (s > spec.max_rank()) return false;
  const Matrix W = V - tangent_space_part(leading_bases(svd, s), V);
  const Vector sigma = thin_svd(W).sigma;
  Eigen::Index block_rank = 0;
  for (Eigen::Index k = 0; k < sigma.size(); ++k) {
    if (sigma(k) > tol) ++block_rank;
  }
  return block_rank <= spec.max_rank() - s;
}

double stationarity_measure(const Matrix& X, const Matrix& grad,
                            const VarietySpec& spec) {
  return project_tangent_cone(X, -grad, spec).s_f;
}

}  // namespace lowrank
