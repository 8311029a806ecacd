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

// Random certified games for the property suites. Every game is a
// ScenarioSpec, so the generator also exercises the scenario pipeline.

#ifndef WCPDG_TESTS_SUPPORT_RANDOM_GAMES_HPP_
#define WCPDG_TESTS_SUPPORT_RANDOM_GAMES_HPP_

#include <cmath>
#include <cstdint>
#include <memory>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "wcpdg/core/random.hpp"
#include "wcpdg/ocp/options.hpp"
#include "wcpdg/potential/certificate.hpp"
#include "wcpdg/scenarios/spec.hpp"

namespace wcpdg::testing {

struct GameRecipe {
  Structure structure = Structure::UniformOutgoing;
  int agents = 3;
  int horizon = 20;
  std::uint64_t seed = 1;
};

struct GeneratedGame {
  GameRecipe recipe;
  ScenarioSpec spec;
  Scenario scenario;
  PotentialCertificate cert;

  std::string label() const {
    return std::string(to_string(recipe.structure)) + " N=" + std::to_string(recipe.agents) +
           " T=" + std::to_string(recipe.horizon) + " seed=" + std::to_string(recipe.seed);
  }
};

/// Planar double integrator: (p, q, vp, vq), controls (ap, aq).
inline AgentSpec double_integrator(double dt) {
  AgentSpec a;
  a.dynamics = "linear";
  a.A = Mat::Identity(4, 4);
  a.A(0, 2) = dt;
  a.A(1, 3) = dt;
  a.B = Mat::Zero(4, 2);
  a.B(0, 0) = a.B(1, 1) = 0.5 * dt * dt;
  a.B(2, 0) = a.B(3, 1) = dt;
  return a;
}

/// Agents start on a circle and head for the antipode, so paths interact.
/// Each agent is a unicycle or a double integrator at random. Pair (0, 1)
/// and a random subset of the others use a weak quadratic coupling, the rest
/// a proximity kernel. Half of the games carry collision constraints and all
/// carry control bounds.
inline ScenarioSpec random_game_spec(const GameRecipe& r) {
  Rng rng(r.seed);
  std::uniform_real_distribution<double> coef(0.5, 2.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double dt = 0.25;

  ScenarioSpec s;
  s.name = "random";
  s.dt = dt;
  s.horizon_seconds = r.horizon * dt;
  const double phase = 2.0 * std::numbers::pi * unit(rng);
  for (int i = 0; i < r.agents; ++i) {
    const double a = phase + 2.0 * std::numbers::pi * i / r.agents + 0.2 * (unit(rng) - 0.5);
    const double rad = 1.5 + 0.3 * unit(rng);
    const Eigen::Vector2d from(rad * std::cos(a), rad * std::sin(a));
    const Eigen::Vector2d to = -from;
    AgentSpec ag = unit(rng) < 0.5 ? double_integrator(dt) : AgentSpec{};
    const double heading = std::atan2(to.y() - from.y(), to.x() - from.x());
    ag.start = Vec::Zero(4);
    ag.goal = Vec::Zero(4);
    ag.start.head<2>() = from;
    ag.goal.head<2>() = to;
    if (ag.dynamics == "unicycle") {
      ag.start[2] = heading + 0.3 * (unit(rng) - 0.5);
      ag.goal[2] = heading;
    }
    const double qp = 0.5 + unit(rng);
    ag.Q = Vec((Vec(4) << qp, qp, 0.01, 0.01).finished()).asDiagonal();
    ag.C = Vec((Vec(2) << 0.1 + 0.4 * unit(rng), 0.1 + 0.4 * unit(rng)).finished()).asDiagonal();
    ag.Qf = Vec((Vec(4) << 5.0, 5.0, 0.1, 0.1).finished()).asDiagonal();
    s.agents.push_back(std::move(ag));
  }

  CouplingSpec& cp = s.coupling;
  cp.structure = r.structure;
  const int n_coef = r.structure == Structure::Dyadic ? 2 : r.agents;
  for (int i = 0; i < n_coef; ++i) cp.c.push_back(coef(rng));
  cp.kernel.type = "proximity";
  cp.kernel.d_m = 1.0;
  for (int i = 0; i < r.agents; ++i) {
    for (int j = i + 1; j < r.agents; ++j) {
      // Pair (0, 1) is always coupled so broken-coefficient controls bite.
      if (i + j > 1 && unit(rng) < 0.5) continue;
      PairKernelSpec pk;
      pk.i = i;
      pk.j = j;
      pk.kernel.type = "quadratic";
      pk.kernel.cross = 0.02 * Mat::NullaryExpr(4, 4, [&] { return unit(rng) - 0.5; });
      pk.kernel.cross.bottomRows(2).setZero();
      pk.kernel.cross.rightCols(2).setZero();
      cp.pair_kernels.push_back(std::move(pk));
    }
  }

  if (unit(rng) < 0.5) s.constraints.d_collision = 0.3;
  s.constraints.u_bound = Vec::Constant(2, 1.5);
  return s;
}

inline GeneratedGame generate_game(const GameRecipe& r) {
  ScenarioSpec spec = random_game_spec(r);
  Scenario sc = build_scenario(spec);
  PotentialCertificate cert = certify(sc.game.costs, r.structure);
  return GeneratedGame{r, std::move(spec), std::move(sc), std::move(cert)};
}

/// A mix over {dyadic, uniform_outgoing, uniform_incoming}, N in {2,3,4}
/// (dyadic is N = 2) and T in {5,20}.
inline std::vector<GameRecipe> recipe_mix(int count, std::uint64_t seed) {
  const Structure structures[] = {Structure::Dyadic, Structure::UniformOutgoing,
                                  Structure::UniformIncoming};
  std::vector<GameRecipe> out;
  for (int g = 0; g < count; ++g) {
    GameRecipe r;
    r.structure = structures[g % 3];
    r.agents = r.structure == Structure::Dyadic ? 2 : 2 + (g / 3) % 3;
    r.horizon = (g / 2) % 2 == 0 ? 20 : 5;
    r.seed = derive_seed(seed, static_cast<std::uint64_t>(g));
    out.push_back(r);
  }
  return out;
}

/// Same game with one off-diagonal coefficient scaled, so the certificate
/// issued for the original no longer describes it.
inline Game break_coefficients(const Game& g, double factor = 1.5) {
  auto costs = std::make_shared<StructuredCost>(*g.costs);
  for (int k = 0; k <= costs->horizon(); ++k) {
    costs->set_coefficient(0, 1, k, factor * costs->coefficient(0, 1, k));
  }
  Game broken = g;
  broken.costs = costs;
  return broken;
}

/// Kernel (0,1) replaced by a non-swapped copy on one side, breaking the
/// symmetry L^{01}(a, b) = L^{10}(b, a).
inline Game break_kernel_symmetry(const Game& g, const Mat& cross) {
  auto costs = std::make_shared<StructuredCost>(*g.costs);
  costs->set_kernel(0, 1, std::make_shared<QuadraticCouplingKernel>(cross));
  costs->set_kernel(1, 0, std::make_shared<QuadraticCouplingKernel>(cross));
  Game broken = g;
  broken.costs = costs;
  return broken;
}

/// Tight tolerances under which first-order residuals reach 1e-6.
inline SolverOptions tight_options() {
  SolverOptions o;
  o.cost_tol = 1e-16;
  o.gradient_tol = 1e-9;
  o.constraint_tol = 1e-8;
  return o;
}

}  // namespace wcpdg::testing

#endif  // WCPDG_TESTS_SUPPORT_RANDOM_GAMES_HPP_
