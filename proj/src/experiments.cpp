#include "lowrank/experiments.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <initializer_list>
#include <stdexcept>

#include "lowrank/errors.hpp"

namespace lowrank {

namespace {

Matrix diag(std::initializer_list<double> entries) {
  const auto n = static_cast<Eigen::Index>(entries.size());
  Matrix X = Matrix::Zero(n, n);
  Eigen::Index k = 0;
  for (double e : entries) X(k, k) = e, ++k;
  return X;
}

// Closed forms are evaluated in long double.
using Wide = long double;

Matrix diag_wide(std::initializer_list<Wide> entries) {
  const auto n = static_cast<Eigen::Index>(entries.size());
  Matrix X = Matrix::Zero(n, n);
  Eigen::Index k = 0;
  for (Wide e : entries) X(k, k) = static_cast<double>(e), ++k;
  return X;
}

bool constant_step(const SolverParams& p) { return p.alpha_lo == p.alpha_hi; }

void apply(const ParamOverrides& o, SolverParams& p) {
  if (o.alpha) p.alpha_lo = p.alpha_hi = *o.alpha;
  if (o.beta) p.beta = *o.beta;
  if (o.c) p.c = *o.c;
  if (o.delta) p.delta = *o.delta;
  if (o.epsilon) p.epsilon = *o.epsilon;
  if (o.max_iters) p.max_iters = *o.max_iters;
}

// Iterates of the P2GDR run in the original levin3x3 experiment
// (alpha = 8/5, beta = 1/2, c = 1/5, delta = 0.1) past the rank reduction.
struct TableRow {
  int i;
  double x11;
  double x33;
};
constexpr std::array<TableRow, 7> kLevinP2gdrTable{{
    {6, 1.046656000000000, 1.600000000000000},
    {11, 1.002866544640000, 1.323933131082407},
    {16, 1.000222902511206, 1.324855302786614},
    {21, 1.000023110532362, 1.324722970132156},
    {26, 1.000001797074997, 1.324717078903522},
    {31, 1.000000062106912, 1.324717847681821},
    {38, 1.000000002318128, 1.324717955251852},
}};

Scenario make_levin(const ParamOverrides& o) {
  SolverParams p;
  p.alpha_lo = p.alpha_hi = 8.0 / 5.0;
  p.beta = 0.5;
  p.c = 0.2;
  p.delta = 0.1;
  p.epsilon = 1e-8;
  const SolverParams defaults = p;
  apply(o, p);
  p.validate();

  Scenario sc{"levin3x3", levin_objective(), VarietySpec(3, 3, 2),
              diag({2.0, 1.0, 0.0}), p, {}, {}};

  const auto closed_form = [](int i) {
    return diag_wide({1.0L + std::pow(Wide(-0.6L), i), std::pow(Wide(0.6L), i), 0.0L});
  };
  if (constant_step(p) && p.alpha_hi == 8.0 / 5.0 && p.c <= 0.2) {
    sc.p2gd_oracle = [closed_form](int i) -> std::optional<Matrix> {
      if (i < 0) return std::nullopt;
      return closed_form(i);
    };
    // P2GDR follows P2GD until the second singular value 0.6^i drops to
    // delta; the first singular value stays >= 0.4.
    if (p.delta > 0.0 && p.delta < 0.4) {
      int switch_at = 0;
      while (std::pow(0.6, switch_at) > p.delta) ++switch_at;
      const bool tabulated = p.beta == defaults.beta && p.c == defaults.c &&
                             p.delta == defaults.delta;
      sc.p2gdr_oracle = [closed_form, switch_at,
                         tabulated](int i) -> std::optional<Matrix> {
        if (i < 0) return std::nullopt;
        if (i <= switch_at) return closed_form(i);
        if (!tabulated) return std::nullopt;
        for (const TableRow& row : kLevinP2gdrTable) {
          if (row.i == i) return diag({row.x11, 0.0, row.x33});
        }
        return std::nullopt;
      };
    }
  }
  return sc;
}

Scenario make_apoc2x2(const ParamOverrides& o) {
  constexpr double x0 = 1.0;
  SolverParams p;
  p.alpha_lo = p.alpha_hi = 3.0 / 5.0;
  p.beta = 0.5;
  p.c = 0.5;
  p.delta = 1.0 / 5.0;
  // The P2GD run covers i = 0..60 before stopping.
  p.epsilon = 1e-30;
  apply(o, p);
  p.validate();

  Scenario sc{"apoc2x2", apocalypse_2x2_objective(), VarietySpec(2, 2, 1),
              diag({x0, 0.0}), p, {}, {}};

  const Wide alpha = p.alpha_hi;
  if (constant_step(p) && alpha < 1.0L && p.c <= 0.5) {
    sc.p2gd_oracle = [alpha](int i) -> std::optional<Matrix> {
      if (i < 0) return std::nullopt;
      return diag_wide({std::pow(1.0L - alpha, i) * x0, 0.0L});
    };
    if (p.delta > 0.0) {
      const int i_delta = decay_index(p.delta, x0, p.alpha_hi);
      sc.p2gdr_oracle = [alpha, i_delta](int i) -> std::optional<Matrix> {
        if (i < 0) return std::nullopt;
        if (i <= i_delta) return diag_wide({std::pow(1.0L - alpha, i) * x0, 0.0L});
        return diag_wide({0.0L, 1.0L - std::pow(1.0L - alpha, i - i_delta)});
      };
    }
  }
  return sc;
}

Scenario make_side_a(const ParamOverrides& o) {
  SolverParams p;
  p.alpha_lo = p.alpha_hi = 0.25;
  p.beta = 0.5;
  p.c = 5.0 / 8.0;
  p.delta = 1.0;
  p.epsilon = 1e-10;
  apply(o, p);
  p.validate();

  Scenario sc{"side_a", side_effect_a_objective(), VarietySpec(2, 2, 1),
              diag({1.0, 0.0}), p, {}, {}};

  if (constant_step(p) && p.alpha_hi == 0.25 && p.c <= 5.0 / 8.0) {
    sc.p2gd_oracle = [](int i) -> std::optional<Matrix> {
      if (i < 0) return std::nullopt;
      return diag_wide({4.0L - 3.0L * std::pow(0.75L, i), 0.0L});
    };
    if (p.delta == 1.0) {
      sc.p2gdr_oracle = [](int i) -> std::optional<Matrix> {
        if (i < 0) return std::nullopt;
        if (i == 0) return diag({1.0, 0.0});
        return diag_wide({0.0L, 2.0L - 2.0L * std::pow(0.25L, i)});
      };
    }
  }
  return sc;
}

Scenario make_side_b(const ParamOverrides& o) {
  SolverParams p;
  // Any alpha in (1/3, 1) gives the same limits; 1/2 is the registry pick.
  p.alpha_lo = p.alpha_hi = 0.5;
  p.beta = 0.5;
  p.c = 0.5;
  p.delta = 1.0;
  p.epsilon = 1e-10;
  apply(o, p);
  p.validate();

  Scenario sc{"side_b", side_effect_b_objective(), VarietySpec(2, 2, 1),
              diag({1.0, 0.0}), p, {}, {}};

  const Wide alpha = p.alpha_hi;
  if (constant_step(p) && alpha > 1.0L / 3.0L && alpha < 1.0L && p.c <= 0.5) {
    sc.p2gd_oracle = [alpha](int i) -> std::optional<Matrix> {
      if (i < 0) return std::nullopt;
      return diag_wide({2.0L - std::pow(1.0L - alpha, i), 0.0L});
    };
    if (p.delta == 1.0) {
      sc.p2gdr_oracle = [alpha](int i) -> std::optional<Matrix> {
        if (i < 0) return std::nullopt;
        if (i == 0) return diag({1.0, 0.0});
        return diag_wide({0.0L, 3.0L - 3.0L * std::pow(1.0L - alpha, i)});
      };
    }
  }
  return sc;
}

// Hand-computed diagonals of the default runs, X_i = diag(d...).
struct HandCheck {
  const char* scenario;
  Variant variant;
  int i;
  std::array<double, 3> d;
};
constexpr HandCheck kHandChecks[] = {
    {"levin3x3", Variant::P2GD, 0, {2.0, 1.0, 0.0}},
    {"levin3x3", Variant::P2GD, 1, {0.4, 0.6, 0.0}},
    {"levin3x3", Variant::P2GD, 2, {1.36, 0.36, 0.0}},
    {"levin3x3", Variant::P2GD, 3, {0.784, 0.216, 0.0}},
    {"levin3x3", Variant::P2GD, 5, {0.92224, 0.07776, 0.0}},
    {"levin3x3", Variant::P2GDR, 0, {2.0, 1.0, 0.0}},
    {"levin3x3", Variant::P2GDR, 2, {1.36, 0.36, 0.0}},
    {"levin3x3", Variant::P2GDR, 4, {1.1296, 0.1296, 0.0}},
    {"levin3x3", Variant::P2GDR, 5, {0.92224, 0.07776, 0.0}},
    {"levin3x3", Variant::P2GDR, 6, {1.046656, 0.0, 1.6}},
    {"apoc2x2", Variant::P2GD, 0, {1.0, 0.0}},
    {"apoc2x2", Variant::P2GD, 1, {0.4, 0.0}},
    {"apoc2x2", Variant::P2GD, 2, {0.16, 0.0}},
    {"apoc2x2", Variant::P2GD, 3, {0.064, 0.0}},
    {"apoc2x2", Variant::P2GD, 10, {1.048576e-4, 0.0}},
    {"apoc2x2", Variant::P2GDR, 0, {1.0, 0.0}},
    {"apoc2x2", Variant::P2GDR, 1, {0.4, 0.0}},
    {"apoc2x2", Variant::P2GDR, 2, {0.16, 0.0}},
    {"apoc2x2", Variant::P2GDR, 3, {0.0, 0.6}},
    {"apoc2x2", Variant::P2GDR, 4, {0.0, 0.84}},
    {"side_a", Variant::P2GD, 0, {1.0, 0.0}},
    {"side_a", Variant::P2GD, 1, {1.75, 0.0}},
    {"side_a", Variant::P2GD, 2, {2.3125, 0.0}},
    {"side_a", Variant::P2GD, 3, {2.734375, 0.0}},
    {"side_a", Variant::P2GD, 4, {3.05078125, 0.0}},
    {"side_a", Variant::P2GDR, 0, {1.0, 0.0}},
    {"side_a", Variant::P2GDR, 1, {0.0, 1.5}},
    {"side_a", Variant::P2GDR, 2, {0.0, 1.875}},
    {"side_a", Variant::P2GDR, 3, {0.0, 1.96875}},
    {"side_a", Variant::P2GDR, 4, {0.0, 1.9921875}},
    {"side_b", Variant::P2GD, 0, {1.0, 0.0}},
    {"side_b", Variant::P2GD, 1, {1.5, 0.0}},
    {"side_b", Variant::P2GD, 2, {1.75, 0.0}},
    {"side_b", Variant::P2GD, 3, {1.875, 0.0}},
    {"side_b", Variant::P2GD, 4, {1.9375, 0.0}},
    {"side_b", Variant::P2GDR, 0, {1.0, 0.0}},
    {"side_b", Variant::P2GDR, 1, {0.0, 1.5}},
    {"side_b", Variant::P2GDR, 2, {0.0, 2.25}},
    {"side_b", Variant::P2GDR, 3, {0.0, 2.625}},
    {"side_b", Variant::P2GDR, 4, {0.0, 2.8125}},
};

void validate_oracles(const Scenario& sc) {
  for (const HandCheck& h : kHandChecks) {
    if (sc.name != h.scenario) continue;
    const std::optional<Matrix> X = sc.oracle(h.i, h.variant);
    Matrix expected = Matrix::Zero(sc.spec.rows(), sc.spec.cols());
    for (Eigen::Index k = 0; k < expected.rows(); ++k) expected(k, k) = h.d[k];
    if (!X || (*X - expected).cwiseAbs().maxCoeff() > 1e-12) {
      throw std::logic_error(sc.name + ": closed form for " + to_string(h.variant) +
                             " disagrees with X_" + std::to_string(h.i));
    }
  }
}

double max_singular_value_seen(const RunTrace& trace) {
  double scale = 0.0;
  for (const IterateInfo& it : trace.iterates) {
    const SvdFactors svd = thin_svd(it.X);
    if (svd.sigma.size() > 0) scale = std::max(scale, svd.sigma(0));
  }
  return scale;
}

VariantOutcome evaluate_variant(const Scenario& sc, Variant v,
                                const ComparisonOptions& options) {
  VariantOutcome out;
  out.variant = v;
  out.params = sc.params_for(v);
  out.trace = run(sc.x0, sc.objective, sc.spec, out.params);

  const IterateInfo& last = out.trace.last();
  out.limit_estimate = last.X;
  out.limit_cost = sc.objective.eval(last.X);
  out.limit_s_f = last.s_f;

  const SvdFactors svd = thin_svd(last.X);
  const double cutoff = options.collapse_tol * max_singular_value_seen(out.trace);
  Eigen::Index kept = 0;
  while (kept < svd.sigma.size() && svd.sigma(kept) > cutoff) ++kept;
  kept = std::min(kept, last.rank);
  out.collapsed_rank = kept;
  out.collapsed_limit = project_to_rank(svd, kept);
  out.collapsed_s_f = stationarity_measure(
      out.collapsed_limit, sc.objective.grad(out.collapsed_limit), sc.spec);

  out.apocalypse_flag = kept < last.rank &&
                        last.s_f < options.apocalypse_threshold &&
                        out.collapsed_s_f > options.apocalypse_threshold;

  if (sc.has_oracle(v)) out.oracle_deviation = oracle_deviation(out.trace, sc, v);
  return out;
}

}  // namespace

const char* to_string(Variant v) {
  return v == Variant::P2GD ? "p2gd" : "p2gdr";
}

bool ParamOverrides::empty() const {
  return !alpha && !beta && !c && !delta && !epsilon && !max_iters;
}

SolverParams Scenario::params_for(Variant v) const {
  SolverParams p = params;
  if (v == Variant::P2GD) p.delta = 0.0;
  return p;
}

bool Scenario::has_oracle(Variant v) const {
  return static_cast<bool>(v == Variant::P2GD ? p2gd_oracle : p2gdr_oracle);
}

std::optional<Matrix> Scenario::oracle(int i, Variant v) const {
  const OracleFn& fn = v == Variant::P2GD ? p2gd_oracle : p2gdr_oracle;
  if (!fn) throw NoOracle(name + ": no closed form for " + to_string(v));
  return fn(i);
}

const std::vector<std::string>& scenario_names() {
  static const std::vector<std::string> names{"levin3x3", "apoc2x2", "side_a",
                                              "side_b"};
  return names;
}

Scenario scenario(std::string_view name, const ParamOverrides& overrides) {
  Scenario sc = [&] {
    if (name == "levin3x3") return make_levin(overrides);
    if (name == "apoc2x2") return make_apoc2x2(overrides);
    if (name == "side_a") return make_side_a(overrides);
    if (name == "side_b") return make_side_b(overrides);
    throw UnknownScenario("unknown scenario '" + std::string(name) + "'");
  }();
  if (overrides.empty()) validate_oracles(sc);
  return sc;
}

RunTrace run_scenario(const Scenario& sc, Variant v) {
  return run(sc.x0, sc.objective, sc.spec, sc.params_for(v));
}

double oracle_deviation(const RunTrace& trace, const Scenario& sc, Variant v) {
  if (!sc.has_oracle(v)) {
    throw NoOracle(sc.name + ": no closed form for " + to_string(v));
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < trace.iterates.size(); ++i) {
    const auto expected = sc.oracle(static_cast<int>(i), v);
    if (!expected) continue;
    worst = std::max(worst, (trace.iterates[i].X - *expected).norm());
  }
  return worst;
}

bool traces_identical(const RunTrace& a, const RunTrace& b) {
  if (a.iterates.size() != b.iterates.size()) return false;
  if (a.steps.size() != b.steps.size()) return false;
  if (a.termination != b.termination) return false;
  for (std::size_t i = 0; i < a.iterates.size(); ++i) {
    const IterateInfo& x = a.iterates[i];
    const IterateInfo& y = b.iterates[i];
    if (x.X != y.X || x.f != y.f || x.s_f != y.s_f || x.rank != y.rank) {
      return false;
    }
  }
  for (std::size_t i = 0; i < a.steps.size(); ++i) {
    if (a.steps[i].accepted_alpha != b.steps[i].accepted_alpha ||
        a.steps[i].backtrack_count != b.steps[i].backtrack_count) {
      return false;
    }
  }
  return true;
}

int decay_index(double level, double x0, double alpha) {
  if (!(level > 0.0 && x0 > 0.0 && alpha > 0.0 && alpha < 1.0)) {
    throw InvalidParameter("decay_index: need level, x0 > 0 and alpha in (0, 1)");
  }
  const double ratio = std::log(level / x0) / std::log(1.0 - alpha);
  return std::max(static_cast<int>(std::ceil(ratio)), 0);
}

ComparisonReport run_comparison(const Scenario& sc,
                                const ComparisonOptions& options) {
  ComparisonReport report;
  report.scenario = sc.name;
  report.p2gd = evaluate_variant(sc, Variant::P2GD, options);
  report.p2gdr = evaluate_variant(sc, Variant::P2GDR, options);
  return report;
}

ComparisonReport run_comparison(std::string_view name,
                                const ParamOverrides& overrides,
                                const ComparisonOptions& options) {
  return run_comparison(scenario(name, overrides), options);
}

DeltaThresholdReport delta_threshold_check(std::string_view name,
                                           const ParamOverrides& overrides) {
  DeltaThresholdReport report;
  report.scenario = std::string(name);

  if (name == "levin3x3") {
    const Scenario sc = scenario(name, overrides);
    report.p2gd_trace = run_scenario(sc, Variant::P2GD);
    report.threshold = std::pow(0.6, 36);

    ThresholdRun tr;
    tr.delta = overrides.delta.value_or(std::pow(0.6, 37));
    tr.epsilon = sc.params.epsilon;
    SolverParams p = sc.params;
    p.delta = tr.delta;
    tr.trace = run(sc.x0, sc.objective, sc.spec, p);
    // P2GD keeps X(2,2) = 0 throughout; leaving it means a reduction fired.
    tr.stopped_on_p2gd_ray = tr.trace.last().X(2, 2) == 0.0;
    tr.identical_to_p2gd = traces_identical(tr.trace, report.p2gd_trace);
    report.runs.push_back(std::move(tr));
    return report;
  }

  if (name == "apoc2x2") {
    ParamOverrides o = overrides;
    if (!o.epsilon) o.epsilon = 1e-6;
    const Scenario sc = scenario(name, o);
    const double x0 = sc.x0(0, 0);
    const double alpha = sc.params.alpha_hi;
    const int i_eps = decay_index(sc.params.epsilon, x0, alpha);
    report.i_epsilon = i_eps;
    report.threshold = std::pow(1.0 - alpha, i_eps - 1) * x0;
    report.p2gd_trace = run_scenario(sc, Variant::P2GD);

    for (double factor : {0.99, 1.01}) {
      ThresholdRun tr;
      tr.delta = factor * report.threshold;
      tr.epsilon = sc.params.epsilon;
      SolverParams p = sc.params;
      p.delta = tr.delta;
      tr.trace = run(sc.x0, sc.objective, sc.spec, p);
      tr.stopped_on_p2gd_ray = tr.trace.last().X(1, 1) == 0.0;
      tr.identical_to_p2gd = traces_identical(tr.trace, report.p2gd_trace);
      report.runs.push_back(std::move(tr));
    }
    return report;
  }

  if (std::find(scenario_names().begin(), scenario_names().end(), name) !=
      scenario_names().end()) {
    throw InvalidParameter("delta_threshold_check supports levin3x3 and apoc2x2");
  }
  throw UnknownScenario("unknown scenario '" + std::string(name) + "'");
}

}  // namespace lowrank
