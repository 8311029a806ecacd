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
#include <memory>
#include <vector>

#include <gmock/gmock.h>
#include <gtest/gtest.h>

#include "support/random_games.hpp"
#include "wcpdg/potential/objective.hpp"
#include "wcpdg/potential/verify.hpp"
#include "wcpdg/scenarios/builders.hpp"

namespace wcpdg {
namespace {

using ::testing::HasSubstr;
using testing::GeneratedGame;

// Two or three proximity-coupled unicycles, close enough that the kernels
// are active, with the coefficient vector read through `structure`.
Scenario coupled(Structure structure, std::vector<double> c) {
  AsymmetricOptions o;
  o.radius = 0.8;
  ScenarioSpec s = three_agent_asymmetric_spec({1.0, 1.0, 1.0}, o);
  s.agents.resize(c.size());
  s.coupling.structure = structure;
  s.coupling.c = std::move(c);
  return build_scenario(s);
}

std::vector<double> weights_at(const PotentialCertificate& cert, int k) {
  std::vector<double> w;
  for (int i = 0; i < cert.agents(); ++i) w.push_back(cert.weight(i, k));
  return w;
}

TEST(Weights, DyadicUsesTheOtherAgentsCoefficient) {
  const Scenario sc = coupled(Structure::Dyadic, {2.0, 4.0});
  const PotentialCertificate cert = certify_dyadic(sc.game.costs);
  for (int k = 0; k <= cert.horizon(); ++k) {
    EXPECT_DOUBLE_EQ(cert.weight(0, k), 0.25);
    EXPECT_DOUBLE_EQ(cert.weight(1, k), 0.5);
  }
  EXPECT_FALSE(cert.is_exact());
  EXPECT_TRUE(cert.time_invariant_weights());
}

TEST(Weights, UniformOutgoingIsInverseProductOfOthers) {
  const Scenario sc = coupled(Structure::UniformOutgoing, {1.0, 2.0, 4.0});
  const PotentialCertificate cert = certify_uniform_outgoing(sc.game.costs);
  EXPECT_THAT(weights_at(cert, 0), ::testing::ElementsAre(0.125, 0.25, 0.5));
  EXPECT_THAT(weights_at(cert, cert.horizon()), ::testing::ElementsAre(0.125, 0.25, 0.5));
}

TEST(Weights, UniformIncomingIsInverseOwnCoefficient) {
  const Scenario sc = coupled(Structure::UniformIncoming, {2.0, 1.0, 5.0});
  const PotentialCertificate cert = certify_uniform_incoming(sc.game.costs);
  EXPECT_THAT(weights_at(cert, 3), ::testing::ElementsAre(0.5, 1.0, 0.2));
}

TEST(Weights, LqGameIsExact) {
  const Scenario sc = build_scenario(lq_example_spec(20));
  const PotentialCertificate cert = certify_scenario(sc);
  EXPECT_EQ(cert.structure(), Structure::Dyadic);
  EXPECT_TRUE(cert.is_exact());
}

TEST(Weights, TwoAgentStructuresAgree) {
  // With two agents every coefficient pair fits all three patterns.
  const Scenario sc = coupled(Structure::Dyadic, {0.7, 3.0});
  const auto d = weights_at(certify_dyadic(sc.game.costs), 0);
  const auto o = weights_at(certify_uniform_outgoing(sc.game.costs), 0);
  const auto in = weights_at(certify_uniform_incoming(sc.game.costs), 0);
  for (int i = 0; i < 2; ++i) {
    EXPECT_DOUBLE_EQ(d[i], o[i]);
    EXPECT_DOUBLE_EQ(d[i], in[i]);
  }
}

TEST(Certify, PatternViolationNamesTheCoefficient) {
  ScenarioSpec s = three_agent_asymmetric_spec({1.0, 1.0, 1.0});
  s.coupling.matrix = Mat::Ones(3, 3);
  s.coupling.matrix(0, 2) = 2.0;
  const Scenario sc = build_scenario(s);
  try {
    certify_uniform_outgoing(sc.game.costs);
    FAIL() << "expected StructureError";
  } catch (const StructureError& e) {
    EXPECT_THAT(e.what(), HasSubstr("c^{0,2}_0"));
  }
  EXPECT_THROW(certify_exact(sc.game.costs), StructureError);
  EXPECT_THROW(certify_dyadic(sc.game.costs), StructureError);
}

TEST(Certify, AsymmetricKernelIsRejected) {
  const Scenario sc = coupled(Structure::UniformOutgoing, {1.0, 1.0});
  Mat M = Mat::Zero(4, 4);
  M(0, 1) = 0.3;
  const Game broken = testing::break_kernel_symmetry(sc.game, M);
  try {
    certify_uniform_outgoing(broken.costs);
    FAIL() << "expected AsymmetricKernelError";
  } catch (const AsymmetricKernelError& e) {
    EXPECT_GT(e.worst_residual(), 1e-3);
  }
}

TEST(Certify, StructureNamesRoundTrip) {
  for (Structure s : {Structure::Dyadic, Structure::UniformOutgoing, Structure::UniformIncoming,
                      Structure::ExactSpecialCase}) {
    EXPECT_EQ(parse_structure(to_string(s)), s);
  }
  EXPECT_FALSE(parse_structure("weighted").has_value());
}

TEST(Certify, TimeVaryingCoefficientsGiveTimeVaryingWeights) {
  const Scenario sc = coupled(Structure::UniformIncoming, {1.0, 2.0, 3.0});
  auto costs = std::make_shared<StructuredCost>(*sc.game.costs);
  for (int k = 0; k <= costs->horizon(); ++k) {
    for (int i = 0; i < 3; ++i) {
      if (i != 1) costs->set_coefficient(i, 1, k, 1.0 + 0.1 * k);
    }
  }
  Game g = sc.game;
  g.costs = costs;
  const PotentialCertificate cert = certify_uniform_incoming(costs);
  EXPECT_FALSE(cert.time_invariant_weights());
  EXPECT_DOUBLE_EQ(cert.weight(1, 10), 0.5);
  const VerificationReport r = verify_potential_property(g, cert, 30, 1e-8, 4);
  EXPECT_TRUE(r.passed) << r.max_residual << " " << r.worst_detail;
}

TEST(Property, ExactSwapGameHoldsToRounding) {
  const Scenario sc = build_four_agent_swap();
  const PotentialCertificate cert = certify_exact(sc.game.costs);
  const VerificationReport r = verify_potential_property(sc.game, cert, 50, 1e-10, 9);
  EXPECT_TRUE(r.passed) << r.max_residual;
  EXPECT_EQ(r.samples, 50);
}

TEST(Property, DyadicWeightsHoldAndBreakWithCoefficients) {
  const Scenario sc = coupled(Structure::Dyadic, {2.0, 4.0});
  const PotentialCertificate cert = certify_scenario(sc);
  const VerificationReport ok = verify_potential_property(sc.game, cert, 50, 1e-8, 1);
  EXPECT_TRUE(ok.passed) << ok.max_residual;
  const VerificationReport bad =
      verify_potential_property(testing::break_coefficients(sc.game), cert, 50, 1e-8, 1);
  EXPECT_FALSE(bad.passed);
  EXPECT_GT(bad.max_residual, 1e-6);
}

TEST(Property, ReportsFeasibilityExhaustion) {
  SwapOptions o;
  o.d_collision = 3.5;  // adjacent corners start 3 apart
  o.jitter = 0.0;
  ScenarioSpec s = four_agent_swap_spec(o);
  s.coupling.kernel.type = "none";
  const Scenario sc = build_scenario(s);
  PropertySamplingOptions opts;
  opts.max_retries = 3;
  EXPECT_THROW(verify_potential_property(sc.game, certify_scenario(sc), 2, 1e-8, 1, opts),
               SamplingError);
}

class RandomGames : public ::testing::TestWithParam<testing::GameRecipe> {};

TEST_P(RandomGames, PotentialPropertyHolds) {
  const GeneratedGame g = testing::generate_game(GetParam());
  const VerificationReport r = verify_potential_property(g.scenario.game, g.cert, 100, 1e-8,
                                                         GetParam().seed);
  EXPECT_TRUE(r.passed) << g.label() << " residual " << r.max_residual << " " << r.worst_detail;
}

TEST_P(RandomGames, BrokenGamesAreDetected) {
  const GeneratedGame g = testing::generate_game(GetParam());
  const Game coef = testing::break_coefficients(g.scenario.game);
  EXPECT_FALSE(verify_potential_property(coef, g.cert, 100, 1e-8, GetParam().seed).passed)
      << g.label();
  Mat M = Mat::Zero(g.scenario.game.state_layout().size(0), g.scenario.game.state_layout().size(1));
  M(0, 1) = 0.3;
  const Game sym = testing::break_kernel_symmetry(g.scenario.game, M);
  EXPECT_FALSE(verify_potential_property(sym, g.cert, 100, 1e-8, GetParam().seed).passed)
      << g.label();
}

TEST_P(RandomGames, DerivativeConditionsHold) {
  const GeneratedGame g = testing::generate_game(GetParam());
  DerivativeConditionOptions analytic;
  analytic.source = DerivativeSource::Analytic;
  const VerificationReport a =
      verify_derivative_conditions(g.scenario.game, g.cert, 30, 1e-10, 5, analytic);
  EXPECT_TRUE(a.passed) << g.label() << " " << a.max_residual;
  const VerificationReport f = verify_derivative_conditions(g.scenario.game, g.cert, 30, 1e-6, 5);
  EXPECT_TRUE(f.passed) << g.label() << " " << f.max_residual;
}

TEST_P(RandomGames, WeightsArePositive) {
  const GeneratedGame g = testing::generate_game(GetParam());
  for (int i = 0; i < g.cert.agents(); ++i) {
    for (int k = 0; k <= g.cert.horizon(); ++k) {
      EXPECT_GT(g.cert.weight(i, k), 0.0);
      EXPECT_TRUE(std::isfinite(g.cert.weight(i, k)));
    }
  }
}

TEST_P(RandomGames, RemainderIgnoresTheAgentsOwnBlocks) {
  const GeneratedGame g = testing::generate_game(GetParam());
  const Game& game = g.scenario.game;
  const BlockLayout& xl = game.state_layout();
  const BlockLayout& ul = game.control_layout();
  Rng rng(GetParam().seed);
  // Arbitrary sequences: the decomposition is pointwise, dynamics play no part.
  Trajectory tr;
  tr.dt = game.dt;
  for (int k = 0; k <= game.horizon; ++k) tr.states.push_back(normal_vector(rng, game.state_dim(), 1.5));
  for (int k = 0; k < game.horizon; ++k) tr.controls.push_back(normal_vector(rng, game.control_dim(), 1.0));
  for (int i = 0; i < game.agents(); ++i) {
    const double base = decomposition_remainder(game, g.cert, i, tr);
    Trajectory moved = tr;
    for (Vec& x : moved.states) xl.block(x, i) += normal_vector(rng, xl.size(i), 1.0);
    for (Vec& u : moved.controls) ul.block(u, i) += normal_vector(rng, ul.size(i), 1.0);
    const double after = decomposition_remainder(game, g.cert, i, moved);
    EXPECT_NEAR(base, after, 1e-9 * std::max(1.0, std::abs(base))) << g.label() << " agent " << i;
  }
}

TEST_P(RandomGames, ScalingThePotentialScalesItsValue) {
  const GeneratedGame g = testing::generate_game(GetParam());
  const Game& game = g.scenario.game;
  Rng rng(GetParam().seed + 1);
  std::vector<Vec> u;
  for (int k = 0; k < game.horizon; ++k) u.push_back(normal_vector(rng, game.control_dim(), 0.5));
  const Trajectory tr = rollout(game, u);
  const double base = potential_value(PotentialObjective(g.cert), tr);
  for (double alpha : {0.5, 2.0}) {
    EXPECT_NEAR(potential_value(PotentialObjective(g.cert, alpha), tr), alpha * base,
                1e-12 * std::max(1.0, std::abs(base)));
  }
}

INSTANTIATE_TEST_SUITE_P(Mix, RandomGames, ::testing::ValuesIn(testing::recipe_mix(24, 2026)),
                         [](const auto& info) { return "game" + std::to_string(info.index); });

}  // namespace
}  // namespace wcpdg
