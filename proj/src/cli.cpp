#include "lowrank/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "lowrank/errors.hpp"
#include "lowrank/experiments.hpp"
#include "lowrank/trace_io.hpp"
#include "lowrank/verification.hpp"

namespace lowrank::cli {

namespace {

namespace fs = std::filesystem;

struct Options {
  std::string scenario;
  std::string variant = "both";
  std::string out_dir = ".";
  std::string format = "csv";
  double alpha = 0, beta = 0, c = 0, delta = 0, epsilon = 0;
  int max_iters = 0;
  CLI::Option* alpha_opt = nullptr;
  CLI::Option* beta_opt = nullptr;
  CLI::Option* c_opt = nullptr;
  CLI::Option* delta_opt = nullptr;
  CLI::Option* epsilon_opt = nullptr;
  CLI::Option* max_iters_opt = nullptr;

  ParamOverrides overrides() const {
    ParamOverrides o;
    if (alpha_opt->count()) o.alpha = alpha;
    if (beta_opt->count()) o.beta = beta;
    if (c_opt->count()) o.c = c;
    if (delta_opt->count()) o.delta = delta;
    if (epsilon_opt->count()) o.epsilon = epsilon;
    if (max_iters_opt->count()) o.max_iters = max_iters;
    return o;
  }
};

// Every subcommand gets its own copies of the parameter flags.
void add_parameter_flags(CLI::App& app, Options& o) {
  o.delta_opt = app.add_option("--delta", o.delta, "Rank-reduction threshold");
  o.epsilon_opt = app.add_option("--epsilon", o.epsilon, "Stop once s_f <= epsilon");
  o.alpha_opt = app.add_option("--alpha", o.alpha, "Initial step size");
  o.beta_opt = app.add_option("--beta", o.beta, "Backtracking factor");
  o.c_opt = app.add_option("--c", o.c, "Armijo constant");
  o.max_iters_opt = app.add_option("--max-iters", o.max_iters, "Iteration cap");
}

class OutputError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

fs::path prepare_output(const std::string& dir, const std::string& file) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw OutputError("cannot create directory '" + dir + "': " + ec.message());
  return fs::path(dir) / file;
}

void write_file(const fs::path& path, const std::string& contents) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw OutputError("cannot open '" + path.string() + "' for writing");
  f << contents;
  f.close();
  if (!f) throw OutputError("failed writing '" + path.string() + "'");
}

int exit_code(Termination t) {
  switch (t) {
    case Termination::EpsilonReached:
      return kExitOk;
    case Termination::MaxIters:
      return kExitMaxIters;
    case Termination::BacktrackFailed:
      return kExitBacktrackFailed;
  }
  return kExitBacktrackFailed;
}

std::string fmt(const char* spec, double x) {
  char buf[48];
  std::snprintf(buf, sizeof buf, spec, x);
  return buf;
}

int do_run(const Options& o, std::ostream& out) {
  const Scenario sc = scenario(o.scenario, o.overrides());
  std::vector<Variant> variants;
  if (o.variant != "p2gdr") variants.push_back(Variant::P2GD);
  if (o.variant != "p2gd") variants.push_back(Variant::P2GDR);

  int worst = kExitOk;
  for (Variant v : variants) {
    const RunTrace trace = run_scenario(sc, v);
    const fs::path path = prepare_output(
        o.out_dir, sc.name + "_" + to_string(v) + "." + o.format);
    if (o.format == "csv") {
      std::ostringstream csv;
      io::write_csv(csv, trace);
      write_file(path, csv.str());
    } else {
      write_file(path, io::trace_json(trace, {sc.name, v, sc.params_for(v)}));
    }
    out << sc.name << ' ' << to_string(v) << ": " << to_string(trace.termination)
        << " after " << trace.steps.size() << " iterations, f = "
        << fmt("%.17g", trace.last().f) << ", s_f = " << fmt("%.3g", trace.last().s_f)
        << " -> " << path.string() << '\n';
    worst = std::max(worst, exit_code(trace.termination));
  }
  return worst;
}

int do_compare(const Options& o, std::ostream& out) {
  const ComparisonReport report = run_comparison(o.scenario, o.overrides());
  const fs::path path = prepare_output(o.out_dir, report.scenario + "_compare.json");
  write_file(path, io::comparison_json(report));

  out << "variant  iterations  termination     limit_cost  limit_s_f  "
         "collapsed_rank  collapsed_s_f\n";
  for (const VariantOutcome* v : {&report.p2gd, &report.p2gdr}) {
    char line[160];
    std::snprintf(line, sizeof line, "%-8s %10zu  %-14s %11.8g %10.3g %15td %14.3g\n",
                  to_string(v->variant), v->trace.steps.size(),
                  to_string(v->trace.termination), v->limit_cost, v->limit_s_f,
                  static_cast<std::ptrdiff_t>(v->collapsed_rank), v->collapsed_s_f);
    out << line;
  }
  out << "costs: p2gd=" << fmt("%.8g", report.p2gd.limit_cost)
      << " p2gdr=" << fmt("%.8g", report.p2gdr.limit_cost) << '\n';
  out << "apocalypse: p2gd=" << (report.p2gd.apocalypse_flag ? "true" : "false")
      << " p2gdr=" << (report.p2gdr.apocalypse_flag ? "true" : "false") << '\n';
  out << "report -> " << path.string() << '\n';
  return kExitOk;
}

void print_threshold(const DeltaThresholdReport& report, std::ostream& out) {
  out << report.scenario << " delta threshold " << fmt("%.17g", report.threshold);
  if (report.i_epsilon) out << " (i_eps = " << *report.i_epsilon << ')';
  out << '\n';
  for (const ThresholdRun& tr : report.runs) {
    out << "  delta = " << fmt("%.17g", tr.delta) << ": "
        << tr.trace.steps.size() << " iterations, "
        << (tr.stopped_on_p2gd_ray ? "stayed on" : "left") << " the P2GD ray, "
        << "identical to p2gd: " << (tr.identical_to_p2gd.value_or(false) ? "true" : "false")
        << '\n';
  }
}

int do_check(const Options& o, std::ostream& out) {
  if (!o.scenario.empty()) {
    const ParamOverrides overrides = o.overrides();
    scenario(o.scenario, overrides);
    if (o.scenario == "levin3x3" || o.scenario == "apoc2x2") {
      print_threshold(delta_threshold_check(o.scenario, overrides), out);
    }
  }
  const auto results = verify::run_all();
  const verify::CriterionResult* first_failure = nullptr;
  for (const auto& r : results) {
    out << verify::format_result(r) << '\n';
    if (!r.passed && !first_failure) first_failure = &r;
  }
  if (first_failure) {
    out << "first failure: [" << first_failure->id << "] " << first_failure->name << '\n';
    return kExitCheckFailed;
  }
  out << "all " << results.size() << " criteria passed\n";
  return kExitOk;
}

}  // namespace

int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"P2GD / P2GDR on the determinantal variety", "lowrank"};
  app.require_subcommand(1);

  Options run_o, compare_o, check_o;

  CLI::App* run_cmd = app.add_subcommand("run", "Run one scenario and write its trace");
  run_cmd->add_option("--scenario", run_o.scenario)->required();
  run_cmd->add_option("--variant", run_o.variant)
      ->check(CLI::IsMember({"p2gd", "p2gdr", "both"}));
  run_cmd->add_option("--out", run_o.out_dir, "Output directory");
  run_cmd->add_option("--format", run_o.format)->check(CLI::IsMember({"csv", "json"}));
  add_parameter_flags(*run_cmd, run_o);

  CLI::App* compare_cmd =
      app.add_subcommand("compare", "Run both variants and compare their limits");
  compare_cmd->add_option("--scenario", compare_o.scenario)->required();
  compare_cmd->add_option("--out", compare_o.out_dir, "Output directory");
  add_parameter_flags(*compare_cmd, compare_o);

  CLI::App* check_cmd = app.add_subcommand("check", "Run the acceptance criteria");
  check_cmd->add_option("--scenario", check_o.scenario,
                        "Also run the delta-threshold check (levin3x3, apoc2x2)");
  add_parameter_flags(*check_cmd, check_o);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  try {
    if (*run_cmd) return do_run(run_o, out);
    if (*compare_cmd) return do_compare(compare_o, out);
    return do_check(check_o, out);
  } catch (const UnknownScenario& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const InvalidParameter& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const OutputError& e) {
    err << "error: " << e.what() << "\n";
    return kExitCantCreate;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitBacktrackFailed;
  }
}

}  // namespace lowrank::cli
