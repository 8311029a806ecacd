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

#ifndef WCPDG_CORE_GAME_HPP_
#define WCPDG_CORE_GAME_HPP_

#include <algorithm>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "wcpdg/core/constraints.hpp"
#include "wcpdg/core/cost.hpp"
#include "wcpdg/core/dynamics.hpp"
#include "wcpdg/core/types.hpp"

namespace wcpdg {

/// A constrained dynamic game: separable dynamics, structured per-agent
/// costs, shared constraints, initial joint state and horizon.
///
/// Members are shared and immutable so games are cheap to copy and safe to
/// hand across threads.
struct Game {
  std::shared_ptr<const DynamicsModel> dynamics;
  std::shared_ptr<const StructuredCost> costs;
  std::shared_ptr<const ConstraintSet> constraints;
  Vec x0;
  int horizon = 1;
  double dt = 1.0;

  int agents() const { return dynamics->agents(); }
  int state_dim() const { return dynamics->state_dim(); }
  int control_dim() const { return dynamics->control_dim(); }
  const BlockLayout& state_layout() const { return dynamics->state_layout(); }
  const BlockLayout& control_layout() const { return dynamics->control_layout(); }

  void validate() const {
    if (!dynamics || !costs || !constraints) {
      throw DimensionError("game: dynamics, costs and constraints are required");
    }
    if (horizon < 1) throw DimensionError("game: horizon must be >= 1");
    if (!(dt > 0.0)) throw DimensionError("game: dt must be positive");
    if (!(costs->state_layout() == dynamics->state_layout()) ||
        !(costs->control_layout() == dynamics->control_layout())) {
      throw DimensionError("game: cost layout does not match dynamics");
    }
    if (costs->horizon() != horizon) {
      throw DimensionError("game: cost horizon does not match game horizon");
    }
    if (constraints->state_dim() != state_dim() ||
        constraints->control_dim() != control_dim()) {
      throw DimensionError("game: constraint dimensions do not match dynamics");
    }
    if (x0.size() != state_dim()) throw DimensionError("game: x0 dimension");
    if (!x0.allFinite()) throw DimensionError("game: x0 must be finite");
  }

  /// Sub-game over stages [k0, k0 + len) starting from `start`.
  Game window(int k0, int len, const Vec& start) const {
    Game g = *this;
    g.costs = std::make_shared<const StructuredCost>(costs->window(k0, len));
    g.horizon = len;
    g.x0 = start;
    return g;
  }

  Game with_initial_state(const Vec& start) const {
    Game g = *this;
    g.x0 = start;
    return g;
  }
};

namespace detail {

inline std::string offending_block(const BlockLayout& layout, Eigen::Index size,
                                   const char* what) {
  for (int i = 0; i < layout.blocks(); ++i) {
    if (layout.offset(i) + layout.size(i) > size) {
      return std::string(what) + " block of agent " + std::to_string(i) +
             " is incomplete (have " + std::to_string(size) + " entries, need " +
             std::to_string(layout.total()) + ")";
    }
  }
  return std::string(what) + " has " + std::to_string(size) +
         " entries; the agent blocks end at " + std::to_string(layout.total()) +
         " (surplus after agent " + std::to_string(layout.blocks() - 1) + ")";
}

}  // namespace detail

/// Forward simulation x_{k+1} = f(x_k, u_k) from x0.
inline Trajectory rollout(const Dynamics& dynamics, const Vec& x0,
                          std::span<const Vec> controls, double dt = 1.0) {
  if (x0.size() != dynamics.state_dim()) {
    if (auto* dm = dynamic_cast<const DynamicsModel*>(&dynamics)) {
      throw DimensionError("rollout: " +
                           detail::offending_block(dm->state_layout(), x0.size(), "x0"));
    }
    throw DimensionError("rollout: x0 dimension mismatch");
  }
  Trajectory traj;
  traj.dt = dt;
  traj.states.reserve(controls.size() + 1);
  traj.states.push_back(x0);
  traj.controls.assign(controls.begin(), controls.end());
  for (size_t k = 0; k < controls.size(); ++k) {
    if (controls[k].size() != dynamics.control_dim()) {
      if (auto* dm = dynamic_cast<const DynamicsModel*>(&dynamics)) {
        throw DimensionError(
            "rollout: step " + std::to_string(k) + ": " +
            detail::offending_block(dm->control_layout(), controls[k].size(), "control"));
      }
      throw DimensionError("rollout: control dimension mismatch at step " +
                           std::to_string(k));
    }
    Vec next = dynamics.step(static_cast<int>(k), traj.states.back(), controls[k]);
    if (!next.allFinite()) {
      throw DivergenceError("rollout: non-finite state produced at step " +
                                std::to_string(k + 1),
                            static_cast<int>(k + 1));
    }
    traj.states.push_back(std::move(next));
  }
  return traj;
}

inline Trajectory rollout(const Game& game, std::span<const Vec> controls) {
  if (static_cast<int>(controls.size()) != game.horizon) {
    throw DimensionError("rollout: expected " + std::to_string(game.horizon) +
                         " controls, got " + std::to_string(controls.size()));
  }
  return rollout(*game.dynamics, game.x0, controls, game.dt);
}

inline void check_trajectory(const Game& game, const Trajectory& traj) {
  traj.validate(game.state_dim(), game.control_dim());
  if (traj.horizon() != game.horizon) {
    throw DimensionError("trajectory horizon " + std::to_string(traj.horizon()) +
                         " does not match game horizon " + std::to_string(game.horizon));
  }
}

/// J^i = L^i_T(x_T) + sum_{k<T} L^i_k(x_k, u^i_k).
inline double agent_cost(const Game& game, const Trajectory& traj, AgentId agent) {
  check_trajectory(game, traj);
  if (agent.index < 0 || agent.index >= game.agents()) {
    throw DimensionError("agent index out of range");
  }
  const StructuredCost& costs = *game.costs;
  double total = costs.agent_terminal(agent.index, traj.states.back());
  for (int k = 0; k < traj.horizon(); ++k) {
    total += costs.agent_stage(agent.index, k, traj.states[k], traj.controls[k]);
  }
  return total;
}

struct FeasibilityReport {
  double max_dynamics_defect = 0.0;
  double max_stage_violation = 0.0;
  double max_terminal_violation = 0.0;
  bool feasible = true;

  double max_violation() const {
    return std::max({max_dynamics_defect, max_stage_violation, max_terminal_violation});
  }
};

inline FeasibilityReport feasibility_report(const Game& game, const Trajectory& traj,
                                            double tol) {
  if (tol < 0.0) throw DimensionError("feasibility tolerance must be >= 0");
  check_trajectory(game, traj);
  FeasibilityReport r;
  const Constraints& cons = *game.constraints;
  for (int k = 0; k < traj.horizon(); ++k) {
    const Vec next = game.dynamics->step(k, traj.states[k], traj.controls[k]);
    r.max_dynamics_defect =
        std::max(r.max_dynamics_defect, max_abs(next - traj.states[k + 1]));
    if (cons.stage_dim() > 0) {
      const Vec g = cons.stage(k, traj.states[k], traj.controls[k]);
      for (int row = 0; row < g.size(); ++row) {
        r.max_stage_violation =
            std::max(r.max_stage_violation, row_violation(g[row], cons.stage_kind(row)));
      }
    }
  }
  if (cons.terminal_dim() > 0) {
    const Vec g = cons.terminal(traj.states.back());
    for (int row = 0; row < g.size(); ++row) {
      r.max_terminal_violation =
          std::max(r.max_terminal_violation, row_violation(g[row], cons.terminal_kind(row)));
    }
  }
  r.feasible = r.max_violation() <= tol;
  return r;
}

}  // namespace wcpdg

#endif  // WCPDG_CORE_GAME_HPP_
