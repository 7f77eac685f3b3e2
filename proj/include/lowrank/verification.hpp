#pragma once

// Executable acceptance criteria. Each criterion runs end to end and
// reports PASS/FAIL with a one-line detail; `lowrank check` and the
// acceptance test binary both drive this list.

#include <functional>
#include <string>
#include <vector>

namespace lowrank::verify {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  std::function<CriterionResult()> evaluate;
};

const std::vector<Criterion>& acceptance_criteria();

std::vector<CriterionResult> run_all();

/// "PASS [3] name: detail"
std::string format_result(const CriterionResult& r);

}  // namespace lowrank::verify
