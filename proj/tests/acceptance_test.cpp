#include <gtest/gtest.h>

#include <iostream>

#include "lowrank/verification.hpp"

namespace {

class Criterion : public ::testing::TestWithParam<int> {};

TEST_P(Criterion, Passes) {
  const auto& all = lowrank::verify::acceptance_criteria();
  const auto& c = all[static_cast<std::size_t>(GetParam())];
  lowrank::verify::CriterionResult r;
  try {
    r = c.evaluate();
  } catch (const std::exception& e) {
    r = {c.id, c.name, false, std::string("exception: ") + e.what()};
  }
  std::cout << lowrank::verify::format_result(r) << std::endl;
  EXPECT_TRUE(r.passed) << r.detail;
}

INSTANTIATE_TEST_SUITE_P(
    Acceptance, Criterion,
    ::testing::Range(0, static_cast<int>(lowrank::verify::acceptance_criteria().size())),
    [](const ::testing::TestParamInfo<int>& info) {
      return lowrank::verify::acceptance_criteria()[static_cast<std::size_t>(info.param)]
          .name;
    });

}  // namespace

int main(int argc, char** argv) {
  ::testing::InitGoogleTest(&argc, argv);
  return RUN_ALL_TESTS();
}
