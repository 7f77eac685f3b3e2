#pragma once

// Serialization of run traces and comparison reports.
//
// CSV columns: i,f,f_gap,s_f,dist_to_xstar,rank,delta_rank,alpha,backtracks,branch_j
// Row i describes X_i; alpha, backtracks and branch_j belong to the step
// leaving X_i and are blank on the last row. Missing values are blank.

#include <ostream>
#include <string>

#include "lowrank/experiments.hpp"
#include "lowrank/solver.hpp"

namespace lowrank::io {

inline constexpr int kFormatVersion = 1;

inline constexpr const char* kCsvHeader =
    "i,f,f_gap,s_f,dist_to_xstar,rank,delta_rank,alpha,backtracks,branch_j";

struct TraceMetadata {
  std::string scenario;
  Variant variant = Variant::P2GD;
  SolverParams params;
};

/// Shortest round-trip decimal form ("%.17g").
std::string format_double(double x);

void write_csv(std::ostream& out, const RunTrace& trace);

/// {"metadata": {...}, "records": [...]} with null for missing values.
std::string trace_json(const RunTrace& trace, const TraceMetadata& meta);

std::string comparison_json(const ComparisonReport& report);

}  // namespace lowrank::io
