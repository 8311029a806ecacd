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

#ifndef WCPDG_SCENARIOS_BUILDERS_HPP_
#define WCPDG_SCENARIOS_BUILDERS_HPP_

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "wcpdg/core/random.hpp"
#include "wcpdg/lq/model.hpp"
#include "wcpdg/scenarios/spec.hpp"

namespace wcpdg {

/// Default tracking weights for unicycle agents: position channels carry
/// the weight, heading and speed only a small pull toward the goal state.
struct UnicycleWeights {
  Vec Q = (Vec(4) << 1.0, 1.0, 0.01, 0.01).finished();
  Vec C = (Vec(2) << 0.1, 0.1).finished();
  Vec Qf = (Vec(4) << 10.0, 10.0, 0.1, 0.1).finished();
};

/// Unicycle agent moving from `from` to `to`, at rest and heading along the
/// segment at both ends.
inline AgentSpec unicycle_agent(const Eigen::Vector2d& from, const Eigen::Vector2d& to,
                                const UnicycleWeights& w = {}) {
  const Eigen::Vector2d d = to - from;
  const double heading = std::atan2(d.y(), d.x());
  AgentSpec a;
  a.dynamics = "unicycle";
  a.start = (Vec(4) << from.x(), from.y(), heading, 0.0).finished();
  a.goal = (Vec(4) << to.x(), to.y(), heading, 0.0).finished();
  a.Q = w.Q.asDiagonal();
  a.C = w.C.asDiagonal();
  a.Qf = w.Qf.asDiagonal();
  return a;
}

/// Offset drawn uniformly from the disc of the given radius.
inline Eigen::Vector2d disc_offset(Rng& rng, double radius) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double r = radius * std::sqrt(unit(rng));
  const double a = 2.0 * std::numbers::pi * unit(rng);
  return {r * std::cos(a), r * std::sin(a)};
}

/// Moves every agent's start position by an independent disc offset.
inline ScenarioSpec jitter_starts(ScenarioSpec spec, double radius, std::uint64_t seed) {
  if (radius <= 0.0) return spec;
  Rng rng(seed);
  for (AgentSpec& a : spec.agents) {
    const Eigen::Vector2d o = disc_offset(rng, radius);
    a.start[0] += o.x();
    a.start[1] += o.y();
  }
  return spec;
}

struct SwapOptions {
  double side = 3.0;
  double d_collision = 0.3;
  double u_bound = 3.0;
  double dt = 0.1;
  double horizon_seconds = 5.0;
  /// Tie-breaking start perturbation; 0 gives the exactly symmetric problem.
  double jitter = 1e-3;
  std::uint64_t jitter_seed = 0;
  UnicycleWeights weights;
};

/// Four unicycles on the corners of a square swap diagonally: agent 0
/// (0,0) -> (s,s), 1 (s,0) -> (0,s), 2 (s,s) -> (0,0), 3 (0,s) -> (s,0).
/// Pairwise collision constraints, control bounds, no soft coupling; every
/// c^{ij} = 1 under the uniform-outgoing tag.
inline ScenarioSpec four_agent_swap_spec(const SwapOptions& o = {}) {
  const double s = o.side;
  const std::array<Eigen::Vector2d, 4> corner = {Eigen::Vector2d(0, 0), Eigen::Vector2d(s, 0),
                                                 Eigen::Vector2d(s, s), Eigen::Vector2d(0, s)};
  ScenarioSpec spec;
  spec.name = "four_agent_swap";
  spec.dt = o.dt;
  spec.horizon_seconds = o.horizon_seconds;
  for (int i = 0; i < 4; ++i) {
    spec.agents.push_back(unicycle_agent(corner[i], corner[(i + 2) % 4], o.weights));
  }
  spec.coupling.structure = Structure::UniformOutgoing;
  spec.coupling.c = {1.0, 1.0, 1.0, 1.0};
  spec.constraints.d_collision = o.d_collision;
  spec.constraints.u_bound = Vec::Constant(2, o.u_bound);
  return jitter_starts(std::move(spec), o.jitter, derive_seed(o.jitter_seed, 0x5741));
}

inline Scenario build_four_agent_swap(const SwapOptions& o = {}) {
  return build_scenario(four_agent_swap_spec(o));
}

struct AsymmetricOptions {
  double radius = 2.0;
  double d_m = 2.0;
  double dt = 0.1;
  double horizon_seconds = 5.0;
  UnicycleWeights weights;
};

/// Three unicycles on a circle (90, 210 and 330 degrees) heading to the
/// antipodal points, with proximity costs c^{ij} = c^i and no hard
/// constraints.
inline ScenarioSpec three_agent_asymmetric_spec(const std::array<double, 3>& c,
                                                const AsymmetricOptions& o = {}) {
  ScenarioSpec spec;
  spec.name = "three_agent_asymmetric";
  spec.dt = o.dt;
  spec.horizon_seconds = o.horizon_seconds;
  for (int i = 0; i < 3; ++i) {
    const double a = (90.0 + 120.0 * i) * std::numbers::pi / 180.0;
    const Eigen::Vector2d p(o.radius * std::cos(a), o.radius * std::sin(a));
    spec.agents.push_back(unicycle_agent(p, -p, o.weights));
  }
  spec.coupling.structure = Structure::UniformOutgoing;
  spec.coupling.c = {c[0], c[1], c[2]};
  spec.coupling.kernel.type = "proximity";
  spec.coupling.kernel.d_m = o.d_m;
  return spec;
}

inline Scenario build_three_agent_asymmetric(const std::array<double, 3>& c,
                                             const AsymmetricOptions& o = {}) {
  return build_scenario(three_agent_asymmetric_spec(c, o));
}

/// The two-player LQ game of the lq module written as a scenario: linear
/// agents, tracking the origin, coupled through the off-diagonal block of
/// the potential's state weight. Its unconstrained solution is the LQ
/// open-loop Nash equilibrium.
inline ScenarioSpec lq_example_spec(int horizon = example_lq::kDefaultHorizon) {
  const Mat A = example_lq::A();
  const Mat B = example_lq::B();
  const Mat Q1 = example_lq::Q1();
  const Mat Q2 = example_lq::Q2();
  const Mat R = example_lq::R();
  const Vec x0 = example_lq::x0();
  ScenarioSpec spec;
  spec.name = "lq_two_player";
  spec.dt = 1.0;
  spec.horizon_seconds = horizon;
  for (int i = 0; i < 2; ++i) {
    AgentSpec a;
    a.dynamics = "linear";
    a.A = A.block(2 * i, 2 * i, 2, 2);
    a.B = B.block(2 * i, i, 2, 1);
    a.start = x0.segment(2 * i, 2);
    a.goal = Vec::Zero(2);
    const Mat& Qi = i == 0 ? Q1 : Q2;
    a.Q = Qi.block(2 * i, 2 * i, 2, 2);
    a.Qf = a.Q;
    a.C = R.block(i, i, 1, 1);
    spec.agents.push_back(std::move(a));
  }
  spec.coupling.structure = Structure::Dyadic;
  spec.coupling.c = {1.0, 1.0};
  spec.coupling.pair_kernels.push_back({0, 1, KernelSpec{"quadratic", 2.0, Q1.block(0, 2, 2, 2)}});
  spec.solver.cost_tol = 1e-12;
  spec.solver.gradient_tol = 1e-9;
  return spec;
}

}  // namespace wcpdg

#endif  // WCPDG_SCENARIOS_BUILDERS_HPP_
