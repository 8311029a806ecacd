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
#include <numbers>
#include <vector>

#include <gmock/gmock.h>
#include <gtest/gtest.h>

#include "wcpdg/ocp/al.hpp"
#include "wcpdg/potential/objective.hpp"
#include "wcpdg/scenarios/builders.hpp"
#include "wcpdg/sim/metrics.hpp"

namespace wcpdg {
namespace {

using std::numbers::pi;
using ::testing::HasSubstr;

Vec v4(double a, double b, double c, double d) { return (Vec(4) << a, b, c, d).finished(); }
Vec v2(double a, double b) { return (Vec(2) << a, b).finished(); }

TEST(Unicycle, StraightLine) {
  const Vec x = UnicycleDynamics(0.1).step(0, v4(0, 0, 0, 1), v2(0, 0));
  EXPECT_EQ(x, v4(0.1, 0, 0, 1));
}

TEST(Unicycle, AxisAlignedHeading) {
  const Vec x = UnicycleDynamics(0.1).step(0, v4(0, 0, pi / 2, 1), v2(0, 0));
  EXPECT_NEAR(x[0], 0.0, 1e-15);
  EXPECT_NEAR(x[1], 0.1, 1e-15);
}

TEST(Unicycle, ControlsActThroughHeadingAndSpeed) {
  const Vec x = UnicycleDynamics(0.1).step(0, v4(0, 0, 0, 0), v2(1, 1));
  EXPECT_EQ(x, v4(0, 0, 0.1, 0.1));
}

TEST(Unicycle, HeadingIsNotWrappedDuringIntegration) {
  const Vec x = UnicycleDynamics(1.0).step(0, v4(0, 0, 3.0, 0), v2(1, 0));
  EXPECT_DOUBLE_EQ(x[2], 4.0);
  EXPECT_NEAR(wrap_angle(x[2]), 4.0 - 2 * pi, 1e-15);
  EXPECT_DOUBLE_EQ(wrap_angle(pi), pi);
  EXPECT_DOUBLE_EQ(wrap_angle(-pi), pi);
}

TEST(Unicycle, RejectsNonPositiveStep) { EXPECT_THROW(UnicycleDynamics(0.0), DimensionError); }

TEST(Proximity, Examples) {
  EXPECT_DOUBLE_EQ(ProximityKernel::value(1.0, 2.0), 1.0);
  EXPECT_EQ(ProximityKernel::value(2.5, 2.0), 0.0);
  EXPECT_EQ(ProximityKernel::value(2.0, 2.0), 0.0);
  const ProximityKernel k(2.0);
  EXPECT_DOUBLE_EQ(k.stage(0, v4(0, 0, 5, 5), v4(0, 1, -1, 0)), 1.0);
}

TEST(Proximity, ValueAndGradientVanishAtTheThreshold) {
  const ProximityKernel k(2.0);
  for (double h : {1e-3, 1e-6, 1e-9}) {
    const Vec a = v4(2.0 - h, 0, 0, 0);
    const QuadraticModel q = k.stage_quadratic(0, a, v4(0, 0, 0, 0));
    EXPECT_LE(q.value, 1.01 * h * h);
    EXPECT_LE(q.gx.norm(), 2.01 * h);
  }
  const QuadraticModel out = k.stage_quadratic(0, v4(2.0, 0, 0, 0), v4(0, 0, 0, 0));
  EXPECT_EQ(out.value, 0.0);
  EXPECT_EQ(out.gx.norm(), 0.0);
}

TEST(Tracking, Examples) {
  const Vec goal = v4(1, 2, 0.5, 0);
  const QuadraticTrackingCost c(goal, Mat::Identity(4, 4), Mat::Identity(2, 2), 10 * Mat::Identity(4, 4));
  EXPECT_EQ(c.stage(0, goal, v2(0, 0)), 0.0);
  EXPECT_DOUBLE_EQ(c.stage(0, goal + v4(1, 0, 0, 0), v2(0, 0)), 0.5);
  EXPECT_DOUBLE_EQ(c.terminal(goal + v4(1, 0, 0, 0)), 5.0);
}

TEST(Tracking, MatchesNaiveQuadraticForms) {
  Rng rng(12);
  for (int t = 0; t < 20; ++t) {
    const Vec goal = normal_vector(rng, 4, 1.0);
    const Vec qd = normal_vector(rng, 4, 1.0).cwiseAbs();
    const Vec cd = normal_vector(rng, 2, 1.0).cwiseAbs();
    const QuadraticTrackingCost c(goal, qd.asDiagonal(), cd.asDiagonal(), 2 * Mat(qd.asDiagonal()));
    const Vec x = normal_vector(rng, 4, 2.0);
    const Vec u = normal_vector(rng, 2, 2.0);
    double naive = 0.0;
    for (int i = 0; i < 4; ++i) naive += 0.5 * qd[i] * (x[i] - goal[i]) * (x[i] - goal[i]);
    for (int i = 0; i < 2; ++i) naive += 0.5 * cd[i] * u[i] * u[i];
    EXPECT_NEAR(c.stage(0, x, u), naive, 1e-12 * std::max(1.0, naive));
  }
}

TEST(Collision, Examples) {
  EXPECT_EQ(CollisionConstraint::value(0.3, 0.3), 0.0);
  EXPECT_DOUBLE_EQ(CollisionConstraint::value(1.0, 0.3), -0.7);
  EXPECT_DOUBLE_EQ(CollisionConstraint::value(0.1, 0.3), 0.2);
  const BlockLayout xl({4, 4});
  const CollisionConstraint c(0, 1, 0.3, xl);
  Vec x(8);
  x << 0, 0, 1, 1, 0.6, 0.8, -1, 2;
  EXPECT_DOUBLE_EQ(c.eval(0, x, Vec::Zero(4))[0], -0.7);
}

TEST(ControlBound, Examples) {
  const BlockLayout ul({2, 2});
  const ControlBound b(1, v2(3, 3), ul);
  auto eval = [&](const Vec& ui) {
    Vec u = Vec::Zero(4);
    u.tail(2) = ui;
    return b.eval(0, Vec::Zero(8), u);
  };
  EXPECT_EQ(eval(v2(3, 3)), v2(0, 0));
  EXPECT_EQ(eval(v2(0, 0)), v2(-3, -3));
  EXPECT_EQ(eval(v2(4, -4)), v2(1, 1));
}

TEST(Spec, ValidationNamesTheProblem) {
  ScenarioSpec s = three_agent_asymmetric_spec({1, 1, 1});
  s.constraints.d_collision = 2.5;  // not below d_m = 2
  EXPECT_THROW(build_scenario(s), ScenarioError);
  s = three_agent_asymmetric_spec({1, 1, 1});
  s.agents[1].C = Mat::Zero(2, 2);
  try {
    build_scenario(s);
    FAIL() << "expected ScenarioError";
  } catch (const ScenarioError& e) {
    EXPECT_THAT(e.what(), HasSubstr("agent 1"));
  }
  s = three_agent_asymmetric_spec({1, 1, 1});
  s.dt = 0.0;
  EXPECT_THROW(build_scenario(s), ScenarioError);
}

TEST(Swap, CornersGoalsAndDuration) {
  SwapOptions o;
  o.jitter = 0.0;
  const Scenario sc = build_four_agent_swap(o);
  const BlockLayout& xl = sc.game.state_layout();
  EXPECT_EQ(Vec(xl.block(sc.game.x0, 0).head(2)), v2(0, 0));
  EXPECT_EQ(Vec(xl.block(sc.game.x0, 2).head(2)), v2(3, 3));
  EXPECT_EQ(sc.goal_positions[0], Eigen::Vector2d(3, 3));
  EXPECT_EQ(sc.goal_positions[2], Eigen::Vector2d(0, 0));
  EXPECT_EQ(sc.goal_positions[1], Eigen::Vector2d(0, 3));
  EXPECT_EQ(sc.game.horizon, 50);
  EXPECT_DOUBLE_EQ(sc.game.dt, 0.1);
}

TEST(Swap, DefaultJitterIsSmallAndDeterministic) {
  const Scenario a = build_four_agent_swap();
  const Scenario b = build_four_agent_swap();
  SwapOptions exact;
  exact.jitter = 0.0;
  const Scenario c = build_four_agent_swap(exact);
  EXPECT_EQ(a.game.x0, b.game.x0);
  const BlockLayout& xl = a.game.state_layout();
  for (int i = 0; i < 4; ++i) {
    const double d = (xl.block(a.game.x0, i) - xl.block(c.game.x0, i)).head(2).norm();
    EXPECT_LE(d, 1e-3);
    EXPECT_GT(d, 0.0);
  }
}

TEST(Swap, ConstraintLayout) {
  const Scenario sc = build_four_agent_swap();
  const auto& cons = *sc.game.constraints;
  // Six pairwise separations plus a two-row bound block per agent.
  EXPECT_EQ(cons.stage_dim(), 6 + 4 * 2);
  EXPECT_EQ(cons.terminal_dim(), 6);
}

TEST(Swap, CertifiesAsAnExactPotentialGame) {
  const Scenario sc = build_four_agent_swap();
  const PotentialCertificate cert = certify_scenario(sc);
  EXPECT_EQ(cert.structure(), Structure::UniformOutgoing);
  EXPECT_TRUE(cert.is_exact());
  EXPECT_NO_THROW(certify_exact(sc.game.costs));
}

TEST(Swap, QuarterTurnRelabelingIsASymmetry) {
  SwapOptions o;
  o.jitter = 0.0;
  const Scenario sc = build_four_agent_swap(o);
  const BlockLayout& ul = sc.game.control_layout();
  const PotentialObjective pot(certify_scenario(sc));
  Rng rng(31);
  for (int t = 0; t < 5; ++t) {
    std::vector<Vec> u, rotated;
    for (int k = 0; k < sc.game.horizon; ++k) {
      u.push_back(normal_vector(rng, 8, 1.0));
      Vec r(8);
      // Agent i + 1 replays agent i's controls.
      for (int i = 0; i < 4; ++i) ul.block(r, (i + 1) % 4) = ul.block(u.back(), i);
      rotated.push_back(r);
    }
    const Trajectory a = rollout(sc.game, u);
    const Trajectory b = rollout(sc.game, rotated);
    const double pa = potential_value(pot, a);
    EXPECT_NEAR(potential_value(pot, b), pa, 1e-9 * std::max(1.0, std::abs(pa)));
    for (int i = 0; i < 4; ++i) {
      const double ja = agent_cost(sc.game, a, AgentId(i));
      EXPECT_NEAR(agent_cost(sc.game, b, AgentId((i + 1) % 4)), ja, 1e-9 * std::max(1.0, ja));
    }
  }
}

TEST(ThreeAgent, WeightsFollowTheCoefficients) {
  const PotentialCertificate cert = certify_scenario(build_three_agent_asymmetric({10, 1, 1}));
  EXPECT_DOUBLE_EQ(cert.weight(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(cert.weight(1, 0), 0.1);
  EXPECT_DOUBLE_EQ(cert.weight(2, 0), 0.1);
  EXPECT_TRUE(certify_scenario(build_three_agent_asymmetric({1, 1, 1})).is_exact());
}

TEST(ThreeAgent, Layout) {
  const Scenario sc = build_three_agent_asymmetric({10, 1, 1});
  EXPECT_EQ(sc.game.constraints->stage_dim(), 0);
  EXPECT_EQ(sc.game.horizon, 50);
  for (int i = 0; i < 3; ++i) {
    EXPECT_NEAR(sc.goal_positions[i].norm(), 2.0, 1e-12);
    EXPECT_NEAR((sc.goal_positions[i] + sc.spec.agents[i].start.head(2)).norm(), 0.0, 1e-12);
  }
}

TEST(ThreeAgent, TheCautiousAgentYields) {
  const Scenario sc = build_three_agent_asymmetric({10, 1, 1});
  const OcpSolution sol = al_solve(sc.game, certify_scenario(sc));
  ASSERT_TRUE(sol.converged) << sol.message;
  const RunMetrics m = compute_metrics(sc.game, sol.trajectory, sc.goal_positions);
  EXPECT_GT(m.max_path_deviation[0], m.max_path_deviation[1]);
  EXPECT_GT(m.max_path_deviation[0], m.max_path_deviation[2]);
}

TEST(Builders, AllShippedScenariosCertify) {
  EXPECT_NO_THROW(certify_scenario(build_four_agent_swap()));
  EXPECT_NO_THROW(certify_scenario(build_three_agent_asymmetric({10, 1, 1})));
  EXPECT_NO_THROW(certify_scenario(build_three_agent_asymmetric({0.5, 3, 2})));
  EXPECT_NO_THROW(certify_scenario(build_scenario(lq_example_spec(20))));
}

}  // namespace
}  // namespace wcpdg
