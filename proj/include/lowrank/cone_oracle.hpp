#pragma once

// Brute-force reference for the tangent-cone projection, used only for
// verification. Subspaces come from rank-revealing QR and the low-rank block
// is fitted by alternating least squares from random starts.

#include <random>

#include "lowrank/variety.hpp"

namespace lowrank::verify {

struct ConeSearchResult {
  Matrix best;
  double distance = 0.0;
};

/// Approximately minimizes ||Z - T|| over the tangent cone at X to the
/// rank <= r variety, parameterizing T as (the part of Z overlapping X's
/// column/row spaces) + A C^T with A, C of width r - rank X.
ConeSearchResult brute_force_cone_projection(const Matrix& X, const Matrix& Z,
                                             Eigen::Index r, int restarts,
                                             std::mt19937_64& rng,
                                             int sweeps = 400);

/// Random m x n matrix of rank exactly `rank` (with probability one).
Matrix random_rank_matrix(Eigen::Index m, Eigen::Index n, Eigen::Index rank,
                          std::mt19937_64& rng);

Matrix random_gaussian(Eigen::Index m, Eigen::Index n, std::mt19937_64& rng);

}  // namespace lowrank::verify
