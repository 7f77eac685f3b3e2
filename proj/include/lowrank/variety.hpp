#pragma once

// Geometry of the determinantal variety {X in R^{m x n} : rank X <= r}.
//
// Everything here is built on a thin SVD with a deterministic sign
// convention, so repeated calls on the same input give bit-identical output.

#include <Eigen/Dense>

namespace lowrank {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Thin SVD X = U diag(sigma) V^T, sigma descending.
///
/// Sign convention: the largest-magnitude entry of each column of U is
/// positive (first one wins on ties); the matching column of V is flipped
/// along with it.
struct SvdFactors {
  Matrix U;
  Vector sigma;
  Matrix V;

  Eigen::Index width() const { return sigma.size(); }
  Matrix reconstruct() const;
};

/// The variety R^{m x n}_{<= r} plus the threshold that decides what "rank"
/// means for floating-point iterates.
class VarietySpec {
 public:
  static constexpr double kDefaultRankTol = 1e-12;

  /// Throws InvalidParameter unless 1 <= r < min(m, n) and rank_tol >= 0.
  VarietySpec(Eigen::Index m, Eigen::Index n, Eigen::Index r,
              double rank_tol = kDefaultRankTol);

  Eigen::Index rows() const { return m_; }
  Eigen::Index cols() const { return n_; }
  Eigen::Index max_rank() const { return r_; }
  double rank_tol() const { return rank_tol_; }

 private:
  Eigen::Index m_;
  Eigen::Index n_;
  Eigen::Index r_;
  double rank_tol_;
};

/// One element of the projection of a matrix onto the tangent cone.
struct TangentProjection {
  Matrix direction;
  /// Frobenius norm of `direction`.
  double s_f = 0.0;
  /// Part of the orthogonal-complement block dropped by the rank truncation.
  Matrix residual_rank_block;
};

bool all_finite(const Matrix& X);

/// Throws NonFiniteInput if X has a NaN or Inf entry.
SvdFactors thin_svd(const Matrix& X);

/// Number of singular values strictly above rank_tol * sigma_1 (0 for X = 0).
Eigen::Index numerical_rank(const Matrix& X, double rank_tol);
Eigen::Index numerical_rank(const Matrix& X, const VarietySpec& spec);
Eigen::Index numerical_rank(const SvdFactors& svd, double rank_tol);

/// max{ j <= rank X : sigma_j(X) > delta }, 0 if there is none.
///
/// "rank X" is the numerical rank under `rank_tol`; with the default 0 it is
/// the count of nonzero singular values.
Eigen::Index delta_rank(const Matrix& X, double delta, double rank_tol = 0.0);
Eigen::Index delta_rank(const SvdFactors& svd, double delta,
                        double rank_tol = 0.0);

/// Truncated SVD keeping the `target_rank` leading triplets. On ties between
/// sigma_k and sigma_{k+1} the first k in computed order are kept.
///
/// Throws RankOutOfRange unless 0 <= target_rank <= min(m, n).
Matrix project_to_rank(const Matrix& X, Eigen::Index target_rank);
Matrix project_to_rank(const SvdFactors& svd, Eigen::Index target_rank);

/// Projection of Z onto the tangent cone to the variety at X.
///
/// With s = numerical rank of X and P_U, P_V the projectors onto its
/// column/row spaces, the result is
///   Z - W + project_to_rank(W, r - s),   W = (I - P_U) Z (I - P_V).
/// Throws RankExceedsVariety if s > r.
TangentProjection project_tangent_cone(const Matrix& X, const Matrix& Z,
                                       const VarietySpec& spec);

/// True iff the complement block (I - P_U) V (I - P_V) has at most r - s
/// singular values above `tol`.
bool in_tangent_cone(const Matrix& X, const Matrix& V, const VarietySpec& spec,
                     double tol);

/// s_f(X): norm of the projection of -grad onto the tangent cone at X.
double stationarity_measure(const Matrix& X, const Matrix& grad,
                            const VarietySpec& spec);

}  // namespace lowrank
