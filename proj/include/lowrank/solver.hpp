#pragma once

// Projected-projected gradient descent (P2GD) on the determinantal variety,
// its rank-reducing variant (P2GDR), and the iterative driver that repeats
// either map until the stationarity measure drops to epsilon.

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "lowrank/objectives.hpp"
#include "lowrank/variety.hpp"

namespace lowrank {

struct SolverParams {
  /// Initial step size interval [alpha_lo, alpha_hi] for the line search.
  double alpha_lo = 1.0;
  double alpha_hi = 1.0;
  /// Backtracking factor.
  double beta = 0.5;
  /// Armijo constant.
  double c = 1e-4;
  /// Rank-reduction threshold; 0 gives plain P2GD.
  double delta = 0.0;
  /// Stopping threshold on s_f (the driver continues while s_f > epsilon).
  double epsilon = 1e-8;
  int max_iters = 10000;
  int max_backtracks = 60;

  /// Picks the initial step in [alpha_lo, alpha_hi]. Unset means the
  /// constant rule alpha = alpha_hi.
  std::function<double(double lo, double hi)> choose_initial_step;

  /// Throws InvalidParameter on any violated invariant.
  void validate() const;
  double initial_step() const;
};

/// Outcome of one application of a P2GD or P2GDR map.
struct StepRecord {
  Matrix iterate;
  double f_value = 0.0;
  /// s_f at the iterate the map was applied to.
  double s_f_at_prev = 0.0;
  /// s_f at the point the winning line search started from (differs from
  /// s_f_at_prev only when a rank-reduced candidate won).
  double start_s_f = 0.0;
  /// Cost at that starting point.
  double start_f = 0.0;
  /// f(start) - f(iterate) as evaluated by the sufficient-decrease test.
  double decrease = 0.0;
  /// Cost of the unreduced (j = 0) candidate, when it was computed.
  std::optional<double> unreduced_f;
  double initial_alpha = 0.0;
  double accepted_alpha = 0.0;
  int backtrack_count = 0;
  /// Rank reduction applied by the winning candidate (0 for none).
  int branch_j = 0;
  int candidates_evaluated = 1;
  /// Candidates dropped because their rank-reduced start was stationary.
  std::vector<int> skipped_stationary;
};

enum class Termination { EpsilonReached, MaxIters, BacktrackFailed };

const char* to_string(Termination t);

/// Per-iterate metrics for X_0, X_1, ...
struct IterateInfo {
  Matrix X;
  double f = 0.0;
  double s_f = 0.0;
  Eigen::Index rank = 0;
  Eigen::Index delta_rank = 0;
  std::optional<double> f_gap;
  std::optional<double> dist_to_xstar;
};

struct RunTrace {
  Matrix initial;
  /// iterates[i] describes X_i; iterates.size() == steps.size() + 1.
  std::vector<IterateInfo> iterates;
  /// steps[i] is the iteration X_i -> X_{i+1}.
  std::vector<StepRecord> steps;
  Termination termination = Termination::MaxIters;
  std::string failure_message;

  /// s_f at the best rank-(rank - 1) approximation of the last iterate,
  /// when that iterate has rank >= 1. A large value next to a small final
  /// s_f hints that the run was heading to an apocalyptic point.
  std::optional<double> reduced_last_s_f;

  const IterateInfo& last() const { return iterates.back(); }
};

/// One P2GD step with Armijo backtracking from alpha = initial_step().
///
/// Throws StationaryInput if s_f(X) is zero (below the smallest normal
/// double) and BacktrackFailed after max_backtracks reductions.
StepRecord p2gd_map(const Matrix& X, const Objective& obj,
                    const VarietySpec& spec, const SolverParams& params);

/// One P2GDR step: runs p2gd_map from X and from its rank-(rank X - j)
/// truncations for j = 1 .. rank X - delta_rank X, and keeps the candidate
/// with lowest cost (smallest j on ties).
StepRecord p2gdr_map(const Matrix& X, const Objective& obj,
                     const VarietySpec& spec, const SolverParams& params);

/// Iterates p2gd_map (delta == 0) or p2gdr_map (delta > 0) while
/// s_f(X_i) > epsilon, up to max_iters. Map failures end the run with
/// Termination::BacktrackFailed and a partial trace.
RunTrace run(const Matrix& X0, const Objective& obj, const VarietySpec& spec,
             const SolverParams& params);

}  // namespace lowrank
