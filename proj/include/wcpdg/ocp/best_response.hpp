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

#ifndef WCPDG_OCP_BEST_RESPONSE_HPP_
#define WCPDG_OCP_BEST_RESPONSE_HPP_

#include <algorithm>
#include <cmath>
#include <vector>

#include "wcpdg/core/game.hpp"
#include "wcpdg/ocp/al.hpp"

namespace wcpdg {

namespace detail {

/// Expands agent i's blocks into a joint vector taken from `ref`.
inline Vec embed(const BlockLayout& layout, const Vec& ref, int agent, const VecRef& block) {
  Vec joint = ref;
  layout.block(joint, agent) = block;
  return joint;
}

}  // namespace detail

/// Agent i's own cost J^i as a single-agent objective over (x^i, u^i), with
/// every other agent's state frozen along a reference trajectory.
class FrozenAgentObjective final : public Objective {
 public:
  FrozenAgentObjective(const StructuredCost& costs, int agent, const Trajectory& ref)
      : costs_(costs), agent_(agent), ref_(ref) {}

  double stage(int k, const VecRef& x, const VecRef& u) const override {
    return costs_.agent_stage(agent_, k, joint_x(k, x), joint_u(k, u));
  }
  double terminal(const VecRef& x) const override {
    return costs_.agent_terminal(agent_, joint_x(ref_.horizon(), x));
  }

  QuadraticModel stage_quadratic(int k, const VecRef& x, const VecRef& u) const override {
    const int t = costs_.stage_time(k);
    const int i = agent_;
    const BlockLayout& xl = costs_.state_layout();
    QuadraticModel q = QuadraticModel::zero(static_cast<int>(x.size()), static_cast<int>(u.size()));
    if (const OwnCost* own = costs_.own(i)) q = own->stage_quadratic(t, x, u);
    for (int j = 0; j < costs_.agents(); ++j) {
      const PairKernel* ker = j == i ? nullptr : costs_.kernel(i, j);
      if (!ker) continue;
      const QuadraticModel p = ker->stage_quadratic(t, x, xl.block(ref_.states[k], j));
      const double c = costs_.coefficient(i, j, k);
      q.value += c * p.value;
      q.gx += c * p.gx;
      q.Hxx += c * p.Hxx;
    }
    return q;
  }

  QuadraticModel terminal_quadratic(const VecRef& x) const override {
    const int i = agent_;
    const int T = ref_.horizon();
    const BlockLayout& xl = costs_.state_layout();
    QuadraticModel q;
    q.gx = Vec::Zero(x.size());
    q.Hxx = Mat::Zero(x.size(), x.size());
    if (const OwnCost* own = costs_.own(i)) {
      const QuadraticModel o = own->terminal_quadratic(x);
      q.value = o.value;
      q.gx = o.gx;
      q.Hxx = o.Hxx;
    }
    for (int j = 0; j < costs_.agents(); ++j) {
      const PairKernel* ker = j == i ? nullptr : costs_.kernel(i, j);
      if (!ker) continue;
      const QuadraticModel p = ker->terminal_quadratic(x, xl.block(ref_.states[T], j));
      const double c = costs_.coefficient(i, j, T);
      q.value += c * p.value;
      q.gx += c * p.gx;
      q.Hxx += c * p.Hxx;
    }
    return q;
  }

 private:
  Vec joint_x(int k, const VecRef& x) const {
    return detail::embed(costs_.state_layout(), ref_.states[k], agent_, x);
  }
  Vec joint_u(int k, const VecRef& u) const {
    return detail::embed(costs_.control_layout(), ref_.controls[k], agent_, u);
  }

  const StructuredCost& costs_;
  int agent_;
  const Trajectory& ref_;
};

/// Constraints touching agent i, restricted to agent i's blocks with the
/// other agents frozen along a reference trajectory.
class FrozenAgentConstraints final : public Constraints {
 public:
  FrozenAgentConstraints(ConstraintSet set, const BlockLayout& xl, const BlockLayout& ul,
                         int agent, const Trajectory& ref)
      : set_(std::move(set)), xl_(xl), ul_(ul), agent_(agent), ref_(ref) {}

  int stage_dim() const override { return set_.stage_dim(); }
  int terminal_dim() const override { return set_.terminal_dim(); }
  ConstraintKind stage_kind(int r) const override { return set_.stage_kind(r); }
  ConstraintKind terminal_kind(int r) const override { return set_.terminal_kind(r); }

  Vec stage(int k, const VecRef& x, const VecRef& u) const override {
    return set_.stage(k, joint_x(k, x), joint_u(k, u));
  }
  Vec terminal(const VecRef& x) const override {
    return set_.terminal(joint_x(ref_.horizon(), x));
  }
  void stage_jacobians(int k, const VecRef& x, const VecRef& u, Mat& Jx, Mat& Ju) const override {
    Mat fx, fu;
    set_.stage_jacobians(k, joint_x(k, x), joint_u(k, u), fx, fu);
    Jx = fx.middleCols(xl_.offset(agent_), xl_.size(agent_));
    Ju = fu.middleCols(ul_.offset(agent_), ul_.size(agent_));
  }
  Mat terminal_jacobian(const VecRef& x) const override {
    return set_.terminal_jacobian(joint_x(ref_.horizon(), x))
        .middleCols(xl_.offset(agent_), xl_.size(agent_));
  }

 private:
  Vec joint_x(int k, const VecRef& x) const { return detail::embed(xl_, ref_.states[k], agent_, x); }
  Vec joint_u(int k, const VecRef& u) const {
    return detail::embed(ul_, ref_.controls[k], agent_, u);
  }

  ConstraintSet set_;
  BlockLayout xl_;
  BlockLayout ul_;
  int agent_;
  const Trajectory& ref_;
};

struct BestResponseResult {
  int agent = 0;
  double equilibrium_cost = 0.0;
  double best_response_cost = 0.0;
  /// (J_eq - J_br) / max(1, |J_eq|); positive when the deviation helps.
  double relative_improvement = 0.0;
  bool feasible = false;
  Trajectory trajectory;  // joint trajectory after agent i's deviation
  OcpSolution solution;   // the single-agent solve
};

/// Agent i's constrained best response to the other agents' controls in
/// `equilibrium`, solved from agent i's equilibrium controls as warm start.
inline BestResponseResult best_response(const Game& game, const Trajectory& equilibrium,
                                        int agent, const SolverOptions& opts = {}) {
  game.validate();
  check_trajectory(game, equilibrium);
  const BlockLayout& xl = game.state_layout();
  const BlockLayout& ul = game.control_layout();
  const FrozenAgentObjective obj(*game.costs, agent, equilibrium);
  const FrozenAgentConstraints cons(game.constraints->involving(agent), xl, ul, agent, equilibrium);
  std::vector<Vec> u0(game.horizon);
  for (int k = 0; k < game.horizon; ++k) u0[k] = ul.block(equilibrium.controls[k], agent);

  BestResponseResult res;
  res.agent = agent;
  res.solution = al_solve(obj, game.dynamics->agent(agent), cons, xl.block(game.x0, agent), u0,
                          opts, game.dt);
  std::vector<Vec> joint = equilibrium.controls;
  for (int k = 0; k < game.horizon; ++k) {
    ul.block(joint[k], agent) = res.solution.trajectory.controls[k];
  }
  res.trajectory = rollout(game, joint);
  res.equilibrium_cost = agent_cost(game, equilibrium, AgentId(agent));
  res.best_response_cost = agent_cost(game, res.trajectory, AgentId(agent));
  res.relative_improvement = (res.equilibrium_cost - res.best_response_cost) /
                             std::max(1.0, std::abs(res.equilibrium_cost));
  res.feasible = feasibility_report(game, res.trajectory, opts.constraint_tol).feasible;
  return res;
}

}  // namespace wcpdg

#endif  // WCPDG_OCP_BEST_RESPONSE_HPP_
