// Copyright 2026 The wcpdg Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <gmock/gmock.h>
#include <gtest/gtest.h>

#include "wcpdg/cli/commands.hpp"
#include "wcpdg/lq/solvers.hpp"

namespace wcpdg {
namespace {

namespace fs = std::filesystem;
using ::testing::HasSubstr;

std::string scenario(const std::string& name) {
  return std::string(WCPDG_SCENARIO_DIR) + "/" + name + ".json";
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// A fresh scratch directory per test.
class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
    dir_ = fs::temp_directory_path() / ("wcpdg_cli_" + std::string(info->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    opts_.output = dir_.string();
    opts_.workers = 1;
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string write(const std::string& name, const std::string& text) {
    const fs::path p = dir_ / name;
    std::ofstream(p, std::ios::binary) << text;
    return p.string();
  }

  fs::path dir_;
  CommandOptions opts_;
  std::ostringstream out_, err_;
};

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(slurp(p));
  for (std::string line; std::getline(in, line);) {
    std::vector<std::string> cells;
    std::istringstream ls(line);
    for (std::string c; std::getline(ls, c, ',');) cells.push_back(c);
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    rows.push_back(cells);
  }
  return rows;
}

TEST(ScenarioIo, ShippedFilesRoundTrip) {
  for (const char* name : {"four_agent_swap", "three_agent_asymmetric", "lq_two_player"}) {
    const ScenarioSpec s = load_scenario(scenario(name));
    const std::string text = serialize_scenario(s);
    EXPECT_EQ(parse_scenario(text), s) << name;
    EXPECT_EQ(serialize_scenario(parse_scenario(text)), text) << name;
  }
}

TEST(ScenarioIo, BuilderSpecsRoundTrip) {
  SwapOptions so;
  so.jitter_seed = 99;
  AsymmetricOptions ao;
  ao.radius = 1.3;
  ScenarioSpec linked = four_agent_swap_spec();
  linked.constraints.equality_links.push_back({0, 1, 3.0});
  linked.solver.max_outer_iterations = 12;
  linked.solver.penalty_growth = 4.0;
  for (const ScenarioSpec& s :
       {four_agent_swap_spec(so), three_agent_asymmetric_spec({0.5, 2, 7}, ao), lq_example_spec(7),
        linked, jitter_starts(four_agent_swap_spec(), 0.3, 5)}) {
    EXPECT_EQ(parse_scenario(serialize_scenario(s)), s) << s.name;
  }
}

TEST(ScenarioIo, UnknownKeysAreRejected) {
  std::string text = serialize_scenario(four_agent_swap_spec());
  text.insert(text.find('{') + 1, "\"colour\": 1,");
  try {
    parse_scenario(text);
    FAIL() << "expected ScenarioError";
  } catch (const ScenarioError& e) {
    EXPECT_THAT(e.what(), HasSubstr("colour"));
  }
}

TEST(ScenarioIo, SyntaxErrorsReportTheirPosition) {
  try {
    parse_scenario("{\n  \"dt\": 0.1,\n  \"agents\": [,]\n}");
    FAIL() << "expected ScenarioParseError";
  } catch (const ScenarioParseError& e) {
    EXPECT_EQ(e.line(), 3);
    EXPECT_THAT(e.what(), HasSubstr("line 3"));
  }
}

TEST(ScenarioIo, InvalidSpecsAreRejected) {
  ScenarioSpec s = three_agent_asymmetric_spec({1, 1, 1});
  s.coupling.structure = Structure::Dyadic;
  EXPECT_THROW(parse_scenario(serialize_scenario(s)), ScenarioError);
  EXPECT_THROW(parse_scenario("{\"dt\": 0.1, \"horizon_seconds\": 1, \"agents\": [], "
                              "\"coupling\": {\"structure\": \"dyadic\"}}"),
               ScenarioError);
}

TEST(Tolerances, Overrides) {
  EXPECT_EQ(parse_tolerance_override("cost=1e-9"), std::make_pair(std::string("cost"), 1e-9));
  EXPECT_THROW(parse_tolerance_override("speed=1"), ScenarioError);
  EXPECT_THROW(parse_tolerance_override("cost"), ScenarioError);
  EXPECT_THROW(parse_tolerance_override("cost=-1"), ScenarioError);
  EXPECT_THROW(parse_tolerance_override("cost=1x"), ScenarioError);
}

TEST(Export, NumbersAreLocaleFreeWithNineDigits) {
  EXPECT_EQ(format_number(0.1), "0.1");
  EXPECT_EQ(format_number(1.0 / 3.0), "0.333333333");
  EXPECT_EQ(format_number(-2.5e-12), "-2.5e-12");
  EXPECT_EQ(format_number(std::nan("")), "nan");
}

TEST_F(Cli, CertifySwap) {
  EXPECT_EQ(cmd_certify(scenario("four_agent_swap"), opts_, out_, err_), kExitOk) << err_.str();
  EXPECT_THAT(out_.str(), HasSubstr("uniform_outgoing, weights all 1"));
}

TEST_F(Cli, CertifyThreeAgent) {
  EXPECT_EQ(cmd_certify(scenario("three_agent_asymmetric"), opts_, out_, err_), kExitOk);
  EXPECT_THAT(out_.str(), HasSubstr("weights (1, 0.1, 0.1)"));
}

TEST_F(Cli, CertifyRejectsUnequalOutgoingCoefficients) {
  ScenarioSpec s = three_agent_asymmetric_spec({1, 1, 1});
  s.coupling.matrix = Mat::Ones(3, 3);
  s.coupling.matrix(0, 2) = 2.0;  // c^{0,1} != c^{0,2}
  const std::string path = write("bad.json", serialize_scenario(s));
  EXPECT_EQ(cmd_certify(path, opts_, out_, err_), kExitCertificationFailure);
  EXPECT_THAT(err_.str(), HasSubstr("certification failed"));
}

TEST_F(Cli, InputErrors) {
  EXPECT_EQ(cmd_certify((dir_ / "missing.json").string(), opts_, out_, err_), kExitInputError);
  const std::string empty = write("empty.json",
                                  "{\"dt\": 0.1, \"horizon_seconds\": 1, \"agents\": [], "
                                  "\"coupling\": {\"structure\": \"uniform_outgoing\"}}");
  EXPECT_EQ(cmd_solve(empty, opts_, out_, err_), kExitInputError);
  const std::string broken = write("broken.json", "{\n\"dt\": }");
  EXPECT_EQ(cmd_bench(broken, opts_, out_, err_), kExitInputError);
  EXPECT_THAT(err_.str(), HasSubstr("line 2"));
}

TEST_F(Cli, SolveSwapWritesTrajectoryAndMetrics) {
  ASSERT_EQ(cmd_solve(scenario("four_agent_swap"), opts_, out_, err_), kExitOk) << err_.str();
  const auto rows = read_csv(dir_ / "trajectory.csv");
  ASSERT_EQ(rows.size(), 1u + 51 * 4);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"k", "t", "agent", "x0", "x1", "x2", "x3", "u0", "u1"}));
  EXPECT_EQ(rows.back()[0], "50");
  EXPECT_EQ(rows.back()[7], "");
  const auto m = nlohmann::json::parse(slurp(dir_ / "metrics.json"));
  EXPECT_EQ(m["failed"], false);
  EXPECT_GE(m["metrics"]["min_pairwise_distance"].get<double>(), 0.3 - 1e-4);
  EXPECT_FALSE(fs::exists(dir_ / "trace.jsonl"));
}

TEST_F(Cli, SolveLqFileMatchesTheNashOracle) {
  ASSERT_EQ(cmd_solve(scenario("lq_two_player"), opts_, out_, err_), kExitOk) << err_.str();
  const Scenario sc = build_scenario(load_scenario(scenario("lq_two_player")));
  const Trajectory nash = open_loop_nash_exact(example_lq::game(sc.game.horizon));
  const auto rows = read_csv(dir_ / "trajectory.csv");
  ASSERT_EQ(rows.size(), 1u + (sc.game.horizon + 1) * 2);
  double worst = 0.0;
  for (size_t r = 1; r < rows.size(); ++r) {
    const int k = std::stoi(rows[r][0]);
    const int agent = std::stoi(rows[r][2]);
    for (int c = 0; c < 2; ++c) {
      const double want = nash.states[k][2 * agent + c];
      worst = std::max(worst, std::abs(std::stod(rows[r][3 + c]) - want) / std::max(1.0, std::abs(want)));
    }
  }
  EXPECT_LE(worst, 1e-8);
}

TEST_F(Cli, RecedingSolveWithTrace) {
  opts_.receding = 5;
  opts_.trace = true;
  ASSERT_EQ(cmd_solve(scenario("four_agent_swap"), opts_, out_, err_), kExitOk) << err_.str();
  const auto m = nlohmann::json::parse(slurp(dir_ / "metrics.json"));
  EXPECT_EQ(m["mode"], "receding_horizon");
  EXPECT_EQ(m["replans"], 50);
  std::istringstream trace(slurp(dir_ / "trace.jsonl"));
  int lines = 0;
  for (std::string l; std::getline(trace, l); ++lines) EXPECT_NO_THROW(nlohmann::json::parse(l));
  EXPECT_GT(lines, 50);
}

TEST_F(Cli, SolverFailureStillWritesOutputs) {
  opts_.tol["gradient"] = 1e-300;
  ScenarioSpec s = four_agent_swap_spec();
  s.solver.max_ilqr_iterations = 2;
  s.solver.max_outer_iterations = 1;
  const std::string path = write("tight.json", serialize_scenario(s));
  EXPECT_EQ(cmd_solve(path, opts_, out_, err_), kExitSolverFailure);
  const auto m = nlohmann::json::parse(slurp(dir_ / "metrics.json"));
  EXPECT_EQ(m["failed"], true);
  EXPECT_TRUE(fs::exists(dir_ / "trajectory.csv"));
}

TEST_F(Cli, BenchIsReproducible) {
  opts_.n = 6;
  opts_.seed = 7;
  ASSERT_EQ(cmd_bench(scenario("four_agent_swap"), opts_, out_, err_), kExitOk) << err_.str();
  const std::string runs = slurp(dir_ / "runs.csv");
  const std::string summary = slurp(dir_ / "summary.json");
  opts_.workers = 2;
  ASSERT_EQ(cmd_bench(scenario("four_agent_swap"), opts_, out_, err_), kExitOk);
  EXPECT_EQ(slurp(dir_ / "runs.csv"), runs);
  EXPECT_EQ(slurp(dir_ / "summary.json"), summary);
  EXPECT_EQ(read_csv(dir_ / "runs.csv").size(), 7u);

  const auto hist = read_csv(dir_ / "histogram.csv");
  ASSERT_EQ(hist.size(), 31u);
  int total = 0;
  for (size_t r = 1; r < hist.size(); ++r) total += std::stoi(hist[r].back());
  EXPECT_EQ(total, 6);
  const auto timing = nlohmann::json::parse(slurp(dir_ / "timing.json"));
  EXPECT_EQ(timing["reference_mean_ms"], kReferenceSolveMs);
}

TEST_F(Cli, BenchOfOneRunAggregatesThatRun) {
  opts_.n = 1;
  opts_.radius = 0.0;
  ASSERT_EQ(cmd_bench(scenario("three_agent_asymmetric"), opts_, out_, err_), kExitOk);
  const auto rows = read_csv(dir_ / "runs.csv");
  const auto summary = nlohmann::json::parse(slurp(dir_ / "summary.json"));
  EXPECT_EQ(summary["success_rate"], 1.0);
  EXPECT_EQ(summary["runs"], 1);
  ASSERT_EQ(rows.size(), 2u);
}

TEST_F(Cli, DerivativeCheckPasses) {
  for (const char* name : {"four_agent_swap", "three_agent_asymmetric", "lq_two_player"}) {
    std::ostringstream out;
    EXPECT_EQ(cmd_check_derivatives(scenario(name), opts_, out, err_), kExitOk) << name << err_.str();
    EXPECT_THAT(out.str(), HasSubstr("ok"));
  }
}

int run_binary(const std::string& args) {
  const int status = std::system((std::string(WCPDG_CLI_PATH) + " " + args + " >/dev/null 2>&1").c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

TEST_F(Cli, BinaryExitCodes) {
  EXPECT_EQ(run_binary("certify " + scenario("four_agent_swap")), 0);
  EXPECT_EQ(run_binary("certify " + (dir_ / "nope.json").string()), 2);
  EXPECT_EQ(run_binary("frobnicate"), 2);
  EXPECT_EQ(run_binary("solve " + scenario("four_agent_swap") + " --tol speed=1"), 2);
  ScenarioSpec s = three_agent_asymmetric_spec({1, 1, 1});
  s.coupling.matrix = Mat::Ones(3, 3);
  s.coupling.matrix(1, 0) = 3.0;
  EXPECT_EQ(run_binary("certify " + write("bad.json", serialize_scenario(s))), 3);
  EXPECT_EQ(run_binary("solve " + scenario("lq_two_player") + " -o " + dir_.string()), 0);
  EXPECT_TRUE(fs::exists(dir_ / "trajectory.csv"));
}

}  // namespace
}  // namespace wcpdg
