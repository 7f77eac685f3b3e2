#pragma once

// Scenario registry for the four reference problems, their closed-form
// iterate sequences, and side-by-side P2GD / P2GDR comparisons.
//
//   levin3x3  3x3, rank <= 2, the original apocalypse example
//   apoc2x2   2x2, rank <= 1, apocalypse at the origin
//   side_a    2x2, rank reduction lands on a worse stationary point
//   side_b    2x2, rank reduction lands on a better stationary point

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lowrank/objectives.hpp"
#include "lowrank/solver.hpp"
#include "lowrank/variety.hpp"

namespace lowrank {

enum class Variant { P2GD, P2GDR };

const char* to_string(Variant v);

/// Field-wise overrides of a scenario's default parameters. `alpha` sets
/// both ends of the initial step interval.
struct ParamOverrides {
  std::optional<double> alpha;
  std::optional<double> beta;
  std::optional<double> c;
  std::optional<double> delta;
  std::optional<double> epsilon;
  std::optional<int> max_iters;

  bool empty() const;
};

/// Closed-form iterate X_i, or nullopt where no closed form is known.
using OracleFn = std::function<std::optional<Matrix>(int i)>;

struct Scenario {
  std::string name;
  Objective objective;
  VarietySpec spec;
  Matrix x0;
  /// Parameters for the P2GDR run; the P2GD run uses the same with delta = 0.
  SolverParams params;
  /// Empty when the overridden parameters leave the closed form's hypotheses.
  OracleFn p2gd_oracle;
  OracleFn p2gdr_oracle;

  SolverParams params_for(Variant v) const;
  bool has_oracle(Variant v) const;
  std::optional<Matrix> oracle(int i, Variant v) const;
};

const std::vector<std::string>& scenario_names();

/// Throws UnknownScenario for unregistered names and InvalidParameter if the
/// overrides break a SolverParams invariant.
Scenario scenario(std::string_view name, const ParamOverrides& overrides = {});

RunTrace run_scenario(const Scenario& sc, Variant v);

/// max_i ||X_i - oracle(i)||_F over the indices the oracle covers.
/// Throws NoOracle if the scenario has no closed form for `v`.
double oracle_deviation(const RunTrace& trace, const Scenario& sc, Variant v);

/// Same iterates, costs, s_f values and step sizes, compared with ==.
bool traces_identical(const RunTrace& a, const RunTrace& b);

/// max{ceil(ln(level / x0) / ln(1 - alpha)), 0}: the first index at which
/// x0 (1 - alpha)^i drops to `level`.
int decay_index(double level, double x0, double alpha);

struct ComparisonOptions {
  /// Singular values of the final iterate below collapse_tol times the
  /// largest singular value seen along the run are treated as heading to 0.
  double collapse_tol = 1e-6;
  /// s_f above this at the collapsed limit (with small s_f at the final
  /// iterate) flags an apocalypse.
  double apocalypse_threshold = 1e-3;
};

struct VariantOutcome {
  Variant variant = Variant::P2GD;
  SolverParams params;
  RunTrace trace;
  /// Final iterate, no extrapolation.
  Matrix limit_estimate;
  double limit_cost = 0.0;
  double limit_s_f = 0.0;
  /// Final iterate with its collapsing singular values removed.
  Matrix collapsed_limit;
  Eigen::Index collapsed_rank = 0;
  double collapsed_s_f = 0.0;
  bool apocalypse_flag = false;
  std::optional<double> oracle_deviation;
};

struct ComparisonReport {
  std::string scenario;
  VariantOutcome p2gd;
  VariantOutcome p2gdr;
};

ComparisonReport run_comparison(const Scenario& sc,
                                const ComparisonOptions& options = {});
ComparisonReport run_comparison(std::string_view name,
                                const ParamOverrides& overrides = {},
                                const ComparisonOptions& options = {});

struct ThresholdRun {
  double delta = 0.0;
  double epsilon = 0.0;
  RunTrace trace;
  /// Final iterate still on the ray the P2GD run follows.
  bool stopped_on_p2gd_ray = false;
  std::optional<bool> identical_to_p2gd;
};

struct DeltaThresholdReport {
  std::string scenario;
  /// Smallest delta for which the rank reduction fires before the epsilon
  /// test stops the run.
  double threshold = 0.0;
  std::optional<int> i_epsilon;
  RunTrace p2gd_trace;
  std::vector<ThresholdRun> runs;
};

/// levin3x3: runs P2GDR with delta = overrides.delta (default (3/5)^37) and
/// compares against P2GD. apoc2x2: with epsilon = overrides.epsilon
/// (default 1e-6) computes i_eps and runs delta just below and just above
/// (1 - alpha)^(i_eps - 1) x0.
DeltaThresholdReport delta_threshold_check(std::string_view name,
                                           const ParamOverrides& overrides = {});

}  // namespace lowrank
