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

#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "support/random_games.hpp"
#include "wcpdg/scenarios/builders.hpp"
#include "wcpdg/sim/benchmark.hpp"
#include "wcpdg/sim/metrics.hpp"
#include "wcpdg/sim/receding.hpp"

namespace wcpdg {
namespace {

using testing::tight_options;

double max_state_gap(const Trajectory& a, const Trajectory& b) {
  double d = 0.0;
  for (size_t k = 0; k < a.states.size(); ++k) d = std::max(d, max_abs(Vec(a.states[k] - b.states[k])));
  return d;
}

TEST(Metrics, SegmentDistance) {
  const Eigen::Vector2d a(0, 0), b(2, 0);
  EXPECT_DOUBLE_EQ(segment_distance({1, 1}, a, b), 1.0);
  EXPECT_DOUBLE_EQ(segment_distance({-3, 4}, a, b), 5.0);
  EXPECT_DOUBLE_EQ(segment_distance({5, -4}, a, b), 5.0);
  EXPECT_DOUBLE_EQ(segment_distance({1, 2}, a, a), std::sqrt(5.0));
}

TEST(Metrics, HandComputedStillRun) {
  AsymmetricOptions o;
  const Scenario sc = build_three_agent_asymmetric({1, 1, 1}, o);
  const BlockLayout& xl = sc.game.state_layout();
  Trajectory tr;
  // Everyone stays put except agent 0, which steps sideways once.
  for (int k = 0; k <= sc.game.horizon; ++k) tr.states.push_back(sc.game.x0);
  xl.block(tr.states[3], 0).head(2) += Eigen::Vector2d(0, 0.25);
  for (int k = 0; k < sc.game.horizon; ++k) tr.controls.push_back(Vec::Zero(6));
  const RunMetrics m = compute_metrics(sc.game, tr, sc.goal_positions);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(m.goal_error[i], 4.0, 1e-12);
  EXPECT_NEAR(m.min_pairwise_distance, 2.0 * std::sqrt(3.0), 1e-12);
  const Eigen::Vector2d p0 = planar_position(xl, sc.game.x0, 0);
  const Eigen::Vector2d step = planar_position(xl, tr.states[3], 0);
  EXPECT_NEAR(m.max_path_deviation[0], segment_distance(step, p0, sc.goal_positions[0]), 1e-15);
  EXPECT_EQ(m.max_path_deviation[1], 0.0);
  EXPECT_EQ(m.max_violation, 0.0);
  EXPECT_EQ(m.max_goal_error(), m.goal_error[0]);
}

TEST(Metrics, TimingStats) {
  const TimingStats t = TimingStats::of({1.0, 2.0, 3.0, 6.0});
  EXPECT_EQ(t.count, 4);
  EXPECT_DOUBLE_EQ(t.mean_ms, 3.0);
  EXPECT_DOUBLE_EQ(t.std_ms, std::sqrt(3.5));
  EXPECT_DOUBLE_EQ(t.max_ms, 6.0);
  EXPECT_EQ(TimingStats::of({}).count, 0);
}

TEST(Histogram, CountsEveryValueOnce) {
  Rng rng(5);
  std::vector<double> v;
  for (int i = 0; i < 257; ++i) v.push_back(std::uniform_real_distribution<double>(0.0, 40.0)(rng));
  const Histogram h = make_histogram(v);
  EXPECT_EQ(h.counts.size(), 30u);
  EXPECT_EQ(h.total(), 257);
  EXPECT_GE(h.counts.back(), 1);
  EXPECT_DOUBLE_EQ(h.edge(30), h.hi);
  EXPECT_EQ(make_histogram({0.0, 0.0}, 4).counts[0], 2);
}

TEST(Receding, ShiftRepeatsTheLastControl) {
  const std::vector<Vec> u = {Vec::Constant(1, 1), Vec::Constant(1, 2), Vec::Constant(1, 3)};
  const std::vector<Vec> s = shift_controls(u, 1);
  EXPECT_EQ(s[0][0], 2);
  EXPECT_EQ(s[1][0], 3);
  EXPECT_EQ(s[2][0], 3);
}

TEST(Receding, ConfigValidation) {
  RecedingHorizonConfig c;
  c.execute = 6;
  EXPECT_THROW(c.validate(), DimensionError);
  c.execute = 0;
  EXPECT_THROW(c.validate(), DimensionError);
  const Scenario sc = build_four_agent_swap();
  RecedingHorizonConfig big;
  big.plan = 60;
  EXPECT_THROW(run_receding_horizon(sc.game, certify_scenario(sc), big, {}, sc.goal_positions),
               DimensionError);
}

TEST(Receding, ExecutingTheWholePlanIsOpenLoop) {
  const Scenario sc = build_four_agent_swap();
  const PotentialCertificate cert = certify_scenario(sc);
  RecedingHorizonConfig cfg;
  cfg.plan = cfg.execute = cfg.total = sc.game.horizon;
  const RecedingHorizonResult r = run_receding_horizon(sc.game, cert, cfg, {}, sc.goal_positions);
  const OcpSolution open = al_solve(sc.game, cert);
  ASSERT_TRUE(r.success) << r.message;
  EXPECT_EQ(r.iterations.size(), 1u);
  EXPECT_EQ(max_state_gap(r.trajectory, open.trajectory), 0.0);
}

TEST(Receding, SwapKeepsSeparationWithShortPlans) {
  const Scenario sc = build_four_agent_swap();
  const PotentialCertificate cert = certify_scenario(sc);
  const RecedingHorizonResult r =
      run_receding_horizon(sc.game, cert, RecedingHorizonConfig{}, {}, sc.goal_positions);
  ASSERT_TRUE(r.success) << r.message;
  EXPECT_EQ(r.trajectory.states.size(), 51u);
  EXPECT_EQ(r.iterations.size(), 50u);
  EXPECT_GE(r.metrics.min_pairwise_distance, 0.3 - 1e-3);
  EXPECT_EQ(r.metrics.solve_time.count, 50);

  // Executed segments chain through the true dynamics.
  for (size_t k = 0; k < r.trajectory.controls.size(); ++k) {
    const Vec next = sc.game.dynamics->step(static_cast<int>(k), r.trajectory.states[k],
                                            r.trajectory.controls[k]);
    EXPECT_EQ(next, r.trajectory.states[k + 1]);
  }
  // Every executed prefix is feasible.
  for (size_t k = 0; k < r.trajectory.controls.size(); ++k) {
    const Vec g = sc.game.constraints->stage(static_cast<int>(k), r.trajectory.states[k],
                                             r.trajectory.controls[k]);
    if (g.size() > 0) {
      EXPECT_LE(g.maxCoeff(), 1e-4) << "step " << k;
    }
  }
}

TEST(Receding, WarmAndColdStartsAgree) {
  const Scenario sc = build_four_agent_swap();
  const PotentialCertificate cert = certify_scenario(sc);
  SolverOptions o = tight_options();
  o.constraint_tol = 1e-9;
  RecedingHorizonConfig cfg;
  const RecedingHorizonResult warm = run_receding_horizon(sc.game, cert, cfg, o, sc.goal_positions);
  cfg.warm_start = false;
  const RecedingHorizonResult cold = run_receding_horizon(sc.game, cert, cfg, o, sc.goal_positions);
  ASSERT_TRUE(warm.success && cold.success);
  EXPECT_LE(max_state_gap(warm.trajectory, cold.trajectory), 1e-6);
  int fewer = 0;
  for (size_t i = 0; i < warm.iterations.size(); ++i) fewer += warm.iterations[i] <= cold.iterations[i];
  EXPECT_GE(fewer, 0.8 * warm.iterations.size());
}

TEST(Receding, FailureKeepsThePartialRun) {
  const Scenario sc = build_four_agent_swap();
  SolverOptions o;
  o.max_ilqr_iterations = 1;
  o.max_outer_iterations = 1;
  const RecedingHorizonResult r = run_receding_horizon(sc.game, certify_scenario(sc),
                                                       RecedingHorizonConfig{}, o,
                                                       sc.goal_positions);
  ASSERT_FALSE(r.success);
  EXPECT_EQ(r.failure_index, 0);
  EXPECT_EQ(r.trajectory.states.size(), 1u);
  EXPECT_NE(r.message.find("replan 0"), std::string::npos);
}

TEST(Benchmark, SingleUnjitteredRunMatchesADirectSolve) {
  SwapOptions so;
  const ScenarioSpec spec = four_agent_swap_spec(so);
  const BenchmarkReport rep = monte_carlo_benchmark(spec, 1, 0.0, 3, {}, 1);
  const Scenario sc = build_scenario(spec);
  const OcpSolution sol = al_solve(sc.game, certify_scenario(sc), sc.solver_options({}));
  const RunMetrics m = compute_metrics(sc.game, sol.trajectory, sc.goal_positions);
  ASSERT_EQ(rep.rows.size(), 1u);
  const BenchmarkRow& row = rep.rows[0];
  EXPECT_EQ(row.cost, sol.cost);
  EXPECT_EQ(row.iterations, sol.iterations);
  EXPECT_EQ(row.min_distance, m.min_pairwise_distance);
  EXPECT_EQ(row.max_goal_error, m.max_goal_error());
  EXPECT_EQ(rep.success_rate, row.success ? 1.0 : 0.0);
}

TEST(Benchmark, FixedSeedIsReproducible) {
  const ScenarioSpec spec = four_agent_swap_spec();
  const BenchmarkReport a = monte_carlo_benchmark(spec, 12, 0.3, 11, {}, 1);
  const BenchmarkReport b = monte_carlo_benchmark(spec, 12, 0.3, 11, {}, 3);
  ASSERT_EQ(a.rows.size(), b.rows.size());
  for (size_t r = 0; r < a.rows.size(); ++r) {
    EXPECT_EQ(a.rows[r].seed, b.rows[r].seed);
    EXPECT_EQ(a.rows[r].cost, b.rows[r].cost);
    EXPECT_EQ(a.rows[r].iterations, b.rows[r].iterations);
    EXPECT_EQ(a.rows[r].min_distance, b.rows[r].min_distance);
  }
  EXPECT_EQ(a.successes, b.successes);
  EXPECT_GE(a.success_rate, 0.9);
  EXPECT_GE(a.monotone_rate, 0.9);
  EXPECT_EQ(a.histogram.total(), a.successes);
  EXPECT_EQ(a.timing.count, a.successes);
}

TEST(Benchmark, RejectsEmptyRuns) {
  EXPECT_THROW(monte_carlo_benchmark(four_agent_swap_spec(), 0, 0.1, 1, {}), DimensionError);
}

}  // namespace
}  // namespace wcpdg
