#include "lowrank/trace_io.hpp"

#include <cstdio>
#include <optional>

#include <json.hpp>

namespace lowrank::io {

namespace {

using nlohmann::json;

std::string cell(const std::optional<double>& x) {
  return x ? format_double(*x) : std::string();
}

json nullable(const std::optional<double>& x) {
  return x ? json(*x) : json(nullptr);
}

json params_json(const SolverParams& p) {
  return {{"alpha_lo", p.alpha_lo}, {"alpha_hi", p.alpha_hi},
          {"beta", p.beta},         {"c", p.c},
          {"delta", p.delta},       {"epsilon", p.epsilon},
          {"max_iters", p.max_iters}};
}

json matrix_json(const Matrix& X) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < X.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < X.cols(); ++j) row.push_back(X(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

json records_json(const RunTrace& trace) {
  json records = json::array();
  for (std::size_t i = 0; i < trace.iterates.size(); ++i) {
    const IterateInfo& it = trace.iterates[i];
    json rec = {{"i", i},
                {"f", it.f},
                {"f_gap", nullable(it.f_gap)},
                {"s_f", it.s_f},
                {"dist_to_xstar", nullable(it.dist_to_xstar)},
                {"rank", it.rank},
                {"delta_rank", it.delta_rank},
                {"alpha", nullptr},
                {"backtracks", nullptr},
                {"branch_j", nullptr}};
    if (i < trace.steps.size()) {
      const StepRecord& s = trace.steps[i];
      rec["alpha"] = s.accepted_alpha;
      rec["backtracks"] = s.backtrack_count;
      rec["branch_j"] = s.branch_j;
    }
    records.push_back(std::move(rec));
  }
  return records;
}

json outcome_json(const VariantOutcome& v) {
  return {{"variant", to_string(v.variant)},
          {"params", params_json(v.params)},
          {"termination", to_string(v.trace.termination)},
          {"iterations", v.trace.steps.size()},
          {"limit_estimate", matrix_json(v.limit_estimate)},
          {"limit_cost", v.limit_cost},
          {"limit_s_f", v.limit_s_f},
          {"collapsed_limit", matrix_json(v.collapsed_limit)},
          {"collapsed_rank", v.collapsed_rank},
          {"collapsed_s_f", v.collapsed_s_f},
          {"apocalypse_flag", v.apocalypse_flag},
          {"oracle_deviation", nullable(v.oracle_deviation)},
          {"records", records_json(v.trace)}};
}

}  // namespace

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_csv(std::ostream& out, const RunTrace& trace) {
  out << kCsvHeader << '\n';
  for (std::size_t i = 0; i < trace.iterates.size(); ++i) {
    const IterateInfo& it = trace.iterates[i];
    out << i << ',' << format_double(it.f) << ',' << cell(it.f_gap) << ','
        << format_double(it.s_f) << ',' << cell(it.dist_to_xstar) << ','
        << it.rank << ',' << it.delta_rank << ',';
    if (i < trace.steps.size()) {
      const StepRecord& s = trace.steps[i];
      out << format_double(s.accepted_alpha) << ',' << s.backtrack_count << ','
          << s.branch_j;
    } else {
      out << ",,";
    }
    out << '\n';
  }
}

std::string trace_json(const RunTrace& trace, const TraceMetadata& meta) {
  json doc = {{"metadata",
               {{"format_version", kFormatVersion},
                {"scenario", meta.scenario},
                {"variant", to_string(meta.variant)},
                {"params", params_json(meta.params)},
                {"termination", to_string(trace.termination)}}},
              {"records", records_json(trace)}};
  return doc.dump(2);
}

std::string comparison_json(const ComparisonReport& report) {
  json doc = {{"format_version", kFormatVersion},
              {"scenario", report.scenario},
              {"p2gd", outcome_json(report.p2gd)},
              {"p2gdr", outcome_json(report.p2gdr)}};
  return doc.dump(2);
}

}  // namespace lowrank::io
