#include <gtest/gtest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "lowrank/cli.hpp"
#include "lowrank/objectives.hpp"
#include "lowrank/trace_io.hpp"

namespace lowrank {
namespace {

namespace fs = std::filesystem;

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "lowrank");
  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::main(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(slurp(p));
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(line);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    rows.push_back(std::move(cells));
  }
  return rows;
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("lowrank_cli_" + std::string(::testing::UnitTest::GetInstance()
                                             ->current_test_info()
                                             ->name()));
    fs::remove_all(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string out() const { return dir_.string(); }
  fs::path dir_;
};

TEST_F(Cli, RunLevinP2gdCsv) {
  const Result r = invoke({"run", "--scenario", "levin3x3", "--variant", "p2gd", "--out", out()});
  EXPECT_EQ(r.code, 0) << r.err;
  const auto rows = read_csv(dir_ / "levin3x3_p2gd.csv");
  ASSERT_EQ(rows.size(), 39u);
  EXPECT_EQ(slurp(dir_ / "levin3x3_p2gd.csv").substr(0, 69), io::kCsvHeader);
  for (const auto& row : rows) EXPECT_EQ(row.size(), 10u);
  EXPECT_EQ(rows[1][0], "0");
  EXPECT_EQ(rows[1][7], "1.6000000000000001");
  EXPECT_EQ(rows[1][8], "0");
  EXPECT_LE(std::stod(rows.back()[3]), 1e-8);
  EXPECT_EQ(rows.back()[0], "37");
  EXPECT_EQ(rows.back()[7], "");
  EXPECT_EQ(rows.back()[9], "");
  EXPECT_FALSE(fs::exists(dir_ / "levin3x3_p2gdr.csv"));
}

TEST_F(Cli, RunLevinP2gdrCsvMatchesTable) {
  const Result r =
      invoke({"run", "--scenario", "levin3x3", "--variant", "p2gdr", "--out", out()});
  EXPECT_EQ(r.code, 0) << r.err;
  const auto rows = read_csv(dir_ / "levin3x3_p2gdr.csv");
  ASSERT_EQ(rows.size(), 40u);
  const Objective f = levin_objective();
  Matrix x6 = Matrix::Zero(3, 3);
  x6(0, 0) = 1.046656;
  x6(2, 2) = 1.6;
  EXPECT_NEAR(std::stod(rows[7][1]), f.eval(x6), 1e-12);
  EXPECT_NEAR(std::stod(rows[7][4]), (x6 - *f.known_minimizer).norm(), 1e-12);
  EXPECT_EQ(rows[6][9], "1");
}

TEST_F(Cli, RunBothVariantsApocalypse) {
  const Result r = invoke({"run", "--scenario", "apoc2x2", "--variant", "both", "--out", out()});
  EXPECT_EQ(r.code, 0) << r.err;
  ASSERT_TRUE(fs::exists(dir_ / "apoc2x2_p2gdr.csv"));
  const auto rows = read_csv(dir_ / "apoc2x2_p2gd.csv");
  ASSERT_GT(rows.size(), 62u);
  double prev = 2.0;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    EXPECT_EQ(rows[i][5], "1");
    const double s_f = std::stod(rows[i][3]);
    EXPECT_LT(s_f, prev);
    prev = s_f;
  }
}

TEST_F(Cli, RunJson) {
  const Result r = invoke({"run", "--scenario", "side_b", "--variant", "p2gdr", "--format",
                           "json", "--out", out()});
  EXPECT_EQ(r.code, 0) << r.err;
  const auto doc = nlohmann::json::parse(slurp(dir_ / "side_b_p2gdr.json"));
  EXPECT_EQ(doc["metadata"]["format_version"], 1);
  EXPECT_EQ(doc["metadata"]["scenario"], "side_b");
  EXPECT_EQ(doc["metadata"]["variant"], "p2gdr");
  EXPECT_EQ(doc["metadata"]["termination"], "EpsilonReached");
  EXPECT_EQ(doc["metadata"]["params"]["delta"], 1.0);
  const auto& records = doc["records"];
  ASSERT_GT(records.size(), 2u);
  EXPECT_EQ(records[0]["branch_j"], 1);
  EXPECT_TRUE(records.back()["alpha"].is_null());
  EXPECT_EQ(records.back()["i"], records.size() - 1);
}

TEST_F(Cli, OutputIsDeterministic) {
  ASSERT_EQ(invoke({"run", "--scenario", "levin3x3", "--out", out() + "/a"}).code, 0);
  ASSERT_EQ(invoke({"run", "--scenario", "levin3x3", "--out", out() + "/b"}).code, 0);
  for (const char* name : {"levin3x3_p2gd.csv", "levin3x3_p2gdr.csv"}) {
    EXPECT_EQ(slurp(dir_ / "a" / name), slurp(dir_ / "b" / name));
  }
}

TEST_F(Cli, CompareSideEffects) {
  Result r = invoke({"compare", "--scenario", "side_a", "--out", out()});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("costs: p2gd=6 p2gdr=8"), std::string::npos) << r.out;
  EXPECT_TRUE(fs::exists(dir_ / "side_a_compare.json"));
  r = invoke({"compare", "--scenario", "side_b", "--out", out()});
  EXPECT_NE(r.out.find("costs: p2gd=4.5 p2gdr=2"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("apocalypse: p2gd=false p2gdr=false"), std::string::npos);
}

TEST_F(Cli, CompareApocalypse) {
  const Result r = invoke({"compare", "--scenario", "apoc2x2", "--out", out()});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("apocalypse: p2gd=true p2gdr=false"), std::string::npos) << r.out;
  const auto doc = nlohmann::json::parse(slurp(dir_ / "apoc2x2_compare.json"));
  EXPECT_TRUE(doc["p2gd"]["apocalypse_flag"].get<bool>());
  EXPECT_FALSE(doc["p2gdr"]["apocalypse_flag"].get<bool>());
}

TEST_F(Cli, TerminationExitCodes) {
  EXPECT_EQ(invoke({"run", "--scenario", "side_a", "--max-iters", "3", "--out", out()}).code,
            cli::kExitMaxIters);
  EXPECT_EQ(invoke({"run", "--scenario", "side_a", "--alpha", "1e300", "--out", out()}).code,
            cli::kExitBacktrackFailed);
}

TEST_F(Cli, UsageErrors) {
  EXPECT_EQ(invoke({}).code, cli::kExitUsage);
  EXPECT_EQ(invoke({"frobnicate"}).code, cli::kExitUsage);
  EXPECT_EQ(invoke({"run"}).code, cli::kExitUsage);
  EXPECT_EQ(invoke({"run", "--scenario", "nope", "--out", out()}).code, cli::kExitUsage);
  EXPECT_EQ(invoke({"run", "--scenario", "side_a", "--variant", "x"}).code, cli::kExitUsage);
  EXPECT_EQ(invoke({"run", "--scenario", "side_a", "--format", "xml"}).code, cli::kExitUsage);
  EXPECT_EQ(invoke({"run", "--scenario", "side_a", "--c", "abc"}).code, cli::kExitUsage);
  EXPECT_EQ(invoke({"run", "--scenario", "side_a", "--bogus", "1"}).code, cli::kExitUsage);
  EXPECT_EQ(invoke({"compare", "--scenario", "side_a", "--beta", "2"}).code, cli::kExitUsage);
  const Result r = invoke({"check", "--scenario", "levin3x3", "--c", "1.5"});
  EXPECT_EQ(r.code, cli::kExitUsage);
  EXPECT_NE(r.err.find("c must lie in (0, 1)"), std::string::npos) << r.err;
}

TEST_F(Cli, UnwritableOutput) {
  fs::create_directories(dir_);
  std::ofstream(dir_ / "file") << "x";
  EXPECT_EQ(invoke({"run", "--scenario", "side_a", "--out", out() + "/file"}).code,
            cli::kExitCantCreate);
  EXPECT_EQ(invoke({"compare", "--scenario", "side_a", "--out", out() + "/file/sub"}).code,
            cli::kExitCantCreate);
}

TEST_F(Cli, Help) {
  const Result r = invoke({"--help"});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("compare"), std::string::npos);
}

TEST_F(Cli, CheckPassesAndReportsIdentity) {
  char delta[32];
  std::snprintf(delta, sizeof delta, "%.17g", std::pow(0.6, 37));
  const Result r = invoke({"check", "--scenario", "levin3x3", "--delta", delta});
  EXPECT_EQ(r.code, 0) << r.out;
  EXPECT_NE(r.out.find("identical to p2gd: true"), std::string::npos) << r.out;
  for (int id = 1; id <= 10; ++id) {
    EXPECT_NE(r.out.find("PASS [" + std::to_string(id) + "]"), std::string::npos) << id;
  }
  EXPECT_EQ(r.out.find("FAIL"), std::string::npos);
}

TEST(TraceIo, FormatDoubleRoundTrips) {
  for (double x : {0.1, 1.0 / 3.0, 1e-300, -2.5, 1.6}) {
    EXPECT_EQ(std::stod(io::format_double(x)), x);
  }
  EXPECT_EQ(io::format_double(0.5), "0.5");
}

}  // namespace
}  // namespace lowrank
