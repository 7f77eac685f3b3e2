#include "lowrank/solver.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "lowrank/errors.hpp"

namespace lowrank {

namespace {

void require_variety_shape(const Matrix& X, const VarietySpec& spec,
                           const char* where) {
  if (X.rows() != spec.rows() || X.cols() != spec.cols()) {
    throw ShapeMismatch(std::string(where) + ": matrix is " +
                        std::to_string(X.rows()) + "x" +
                        std::to_string(X.cols()) + ", variety is " +
                        std::to_string(spec.rows()) + "x" +
                        std::to_string(spec.cols()));
  }
}

bool is_positive_finite(double x) { return x > 0.0 && std::isfinite(x); }

}  // namespace

const char* to_string(Termination t) {
  switch (t) {
    case Termination::EpsilonReached:
      return "EpsilonReached";
    case Termination::MaxIters:
      return "MaxIters";
    case Termination::BacktrackFailed:
      return "BacktrackFailed";
  }
  return "?";
}

void SolverParams::validate() const {
  if (!is_positive_finite(alpha_lo)) {
    throw InvalidParameter("alpha_lo must be positive and finite");
  }
  if (!(alpha_hi >= alpha_lo) || !std::isfinite(alpha_hi)) {
    throw InvalidParameter("alpha_hi must be finite and >= alpha_lo");
  }
  if (!(beta > 0.0 && beta < 1.0)) {
    throw InvalidParameter("beta must lie in (0, 1)");
  }
  if (!(c > 0.0 && c < 1.0)) throw InvalidParameter("c must lie in (0, 1)");
  if (!(delta >= 0.0) || !std::isfinite(delta)) {
    throw InvalidParameter("delta must be finite and >= 0");
  }
  if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) {
    throw InvalidParameter("epsilon must be finite and >= 0");
  }
  if (max_iters < 1) throw InvalidParameter("max_iters must be positive");
  if (max_backtracks < 1) {
    throw InvalidParameter("max_backtracks must be positive");
  }
}

double SolverParams::initial_step() const {
  if (!choose_initial_step) return alpha_hi;
  const double alpha = choose_initial_step(alpha_lo, alpha_hi);
  if (!(alpha >= alpha_lo && alpha <= alpha_hi)) {
    throw InvalidParameter("initial step outside [alpha_lo, alpha_hi]");
  }
  return alpha;
}

StepRecord p2gd_map(const Matrix& X, const Objective& obj,
                    const VarietySpec& spec, const SolverParams& params) {
  require_variety_shape(X, spec, "p2gd_map");
  const Matrix grad = obj.grad(X);
  if (!grad.allFinite()) {
    throw NonFiniteValue("p2gd_map: gradient is not finite");
  }
  const TangentProjection proj = project_tangent_cone(X, -grad, spec);
  const double s_f = proj.s_f;
  if (!(s_f >= std::numeric_limits<double>::min())) {
    throw StationaryInput("p2gd_map: s_f(X) = 0");
  }

  const double f_x = obj.eval(X);
  const Eigen::Index r = spec.max_rank();

  StepRecord rec;
  rec.s_f_at_prev = s_f;
  rec.start_s_f = s_f;
  rec.start_f = f_x;
  rec.initial_alpha = params.initial_step();

  double alpha = rec.initial_alpha;
  Matrix Y = project_to_rank(Matrix(X + alpha * proj.direction), r);
  double decrease = obj.decrease(X, Y);
  int backtracks = 0;
  // Loops while f(Y) > f(X) - c alpha s_f^2 or the decrease is NaN.
  while (!(decrease >= params.c * alpha * s_f * s_f)) {
    if (backtracks == params.max_backtracks) {
      throw BacktrackFailed("p2gd_map: no sufficient decrease after " +
                            std::to_string(backtracks) + " backtracks");
    }
    alpha *= params.beta;
    Y = project_to_rank(Matrix(X + alpha * proj.direction), r);
    decrease = obj.decrease(X, Y);
    ++backtracks;
  }

  rec.iterate = std::move(Y);
  rec.f_value = obj.eval(rec.iterate);
  rec.decrease = decrease;
  rec.accepted_alpha = alpha;
  rec.backtrack_count = backtracks;
  rec.branch_j = 0;
  rec.candidates_evaluated = 1;
  return rec;
}

StepRecord p2gdr_map(const Matrix& X, const Objective& obj,
                     const VarietySpec& spec, const SolverParams& params) {
  require_variety_shape(X, spec, "p2gdr_map");
  const SvdFactors svd = thin_svd(X);
  const Eigen::Index rank = numerical_rank(svd, spec.rank_tol());
  const Eigen::Index reduced =
      delta_rank(svd, params.delta, spec.rank_tol());
  const int last_j = static_cast<int>(rank - reduced);

  // The j = 0 candidate starts from X itself, so with delta = 0 this map is
  // bit-for-bit the P2GD map.
  std::optional<StepRecord> best;
  std::optional<BacktrackFailed> last_failure;
  std::vector<int> skipped;
  double s_f_x = 0.0;
  std::optional<double> unreduced_f;

  for (int j = 0; j <= last_j; ++j) {
    const Matrix start = j == 0 ? X : project_to_rank(svd, rank - j);
    StepRecord candidate;
    try {
      candidate = p2gd_map(start, obj, spec, params);
    } catch (const StationaryInput&) {
      if (j == 0) throw;
      skipped.push_back(j);
      continue;
    } catch (const BacktrackFailed& e) {
      last_failure = e;
      continue;
    }
    if (j == 0) {
      s_f_x = candidate.s_f_at_prev;
      unreduced_f = candidate.f_value;
    }
    candidate.branch_j = j;
    // Strict improvement keeps the smallest j on ties.
    if (!best || obj.decrease(best->iterate, candidate.iterate) > 0.0) {
      best = std::move(candidate);
    }
  }

  if (!best) {
    if (last_failure) throw *last_failure;
    throw BacktrackFailed("p2gdr_map: no candidate produced a step");
  }
  if (best->branch_j != 0) {
    // Report the measure at X itself, not at the truncated start.
    s_f_x = s_f_x > 0.0 ? s_f_x
                        : stationarity_measure(X, obj.grad(X), spec);
    best->s_f_at_prev = s_f_x;
  }
  best->unreduced_f = unreduced_f;
  best->candidates_evaluated = last_j + 1;
  best->skipped_stationary = std::move(skipped);
  return *best;
}

RunTrace run(const Matrix& X0, const Objective& obj, const VarietySpec& spec,
             const SolverParams& params) {
  params.validate();
  require_variety_shape(X0, spec, "run");
  if (!X0.allFinite()) throw NonFiniteInput("run: X0 has NaN or Inf");
  if (numerical_rank(X0, spec) > spec.max_rank()) {
    throw RankExceedsVariety("run: X0 is outside the variety");
  }

  const auto describe = [&](const Matrix& X) {
    IterateInfo info;
    info.X = X;
    info.f = obj.eval(X);
    info.s_f = stationarity_measure(X, obj.grad(X), spec);
    const SvdFactors svd = thin_svd(X);
    info.rank = numerical_rank(svd, spec.rank_tol());
    info.delta_rank = delta_rank(svd, params.delta, spec.rank_tol());
    if (obj.known_min_value) info.f_gap = info.f - *obj.known_min_value;
    if (obj.known_minimizer) info.dist_to_xstar = (X - *obj.known_minimizer).norm();
    return info;
  };

  RunTrace trace;
  trace.initial = X0;
  trace.iterates.push_back(describe(X0));

  const bool reduce = params.delta > 0.0;
  trace.termination = Termination::EpsilonReached;
  while (trace.last().s_f > params.epsilon) {
    if (static_cast<int>(trace.steps.size()) >= params.max_iters) {
      trace.termination = Termination::MaxIters;
      break;
    }
    const Matrix& X = trace.last().X;
    StepRecord step;
    try {
      step = reduce ? p2gdr_map(X, obj, spec, params)
                    : p2gd_map(X, obj, spec, params);
    } catch (const BacktrackFailed& e) {
      trace.termination = Termination::BacktrackFailed;
      trace.failure_message = e.what();
      break;
    } catch (const StationaryInput& e) {
      trace.termination = Termination::BacktrackFailed;
      trace.failure_message = e.what();
      break;
    }
    IterateInfo next = describe(step.iterate);
    trace.steps.push_back(std::move(step));
    trace.iterates.push_back(std::move(next));
  }

  const IterateInfo& last = trace.last();
  if (last.rank >= 1) {
    const Matrix reduced_last = project_to_rank(last.X, last.rank - 1);
    trace.reduced_last_s_f =
        stationarity_measure(reduced_last, obj.grad(reduced_last), spec);
  }
  return trace;
}

}  // namespace lowrank
