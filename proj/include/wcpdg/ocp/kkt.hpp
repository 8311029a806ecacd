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

#ifndef WCPDG_OCP_KKT_HPP_
#define WCPDG_OCP_KKT_HPP_

#include <algorithm>
#include <string>
#include <vector>

#include "wcpdg/core/game.hpp"
#include "wcpdg/ocp/options.hpp"
#include "wcpdg/potential/certificate.hpp"

namespace wcpdg {

struct AgentKkt {
  std::vector<double> stationarity_x;  // k = 1..T (index 0 unused, 0)
  std::vector<double> stationarity_u;  // k = 0..T-1
  double max_x = 0.0;
  double max_u = 0.0;
  double max() const { return std::max(max_x, max_u); }
};

/// Each agent's generalized-Nash KKT residuals at a potential-problem
/// solution, using the recovered multipliers
///   lambda^i_k = w^i_k xi_k,   mu^i_k = w^i_k delta_k  (<= 0).
struct KktReport {
  std::vector<AgentKkt> agents;
  std::vector<std::vector<Vec>> lambda;  // [i][k], k = 0..T-1
  std::vector<std::vector<Vec>> mu;      // [i][k], k = 0..T-1
  std::vector<Vec> mu_terminal;          // [i]
  double max_stationarity = 0.0;
  double complementarity = 0.0;     // max |delta_k g_k| over inequality rows
  double primal_feasibility = 0.0;  // max constraint violation and dynamics defect
  double dual_feasibility = 0.0;    // max positive part of delta on inequality rows
  double tol = 0.0;
  bool partial = false;
  bool passed = false;
  std::string detail;

  double max_residual() const {
    return std::max({max_stationarity, complementarity, primal_feasibility, dual_feasibility});
  }
};

/// Agent i's Lagrangian is
///   J^i + sum_k lambda^i_k'(f(x_k,u_k) - x_{k+1}) - sum_k mu^i_k' g_k - mu^i_T' g_T,
/// stationary in its own blocks (x^i_k for k = 1..T, u^i_k for k < T).
inline KktReport kkt_check(const Game& game, const PotentialCertificate& cert,
                           const OcpSolution& sol, double tol) {
  game.validate();
  const Trajectory& tr = sol.trajectory;
  check_trajectory(game, tr);
  KktReport rep;
  rep.tol = tol;
  const int N = game.agents();
  const int T = game.horizon;
  const Constraints& cons = *game.constraints;
  const BlockLayout& xl = game.state_layout();
  const BlockLayout& ul = game.control_layout();
  const bool multipliers_ok =
      sol.has_multipliers && static_cast<int>(sol.xi.size()) == T &&
      static_cast<int>(sol.delta.size()) == T && sol.delta_terminal.size() == cons.terminal_dim();
  if (!multipliers_ok) {
    rep.partial = true;
    rep.detail = "solution carries no multipliers";
    return rep;
  }
  if (!sol.converged) {
    rep.partial = true;
    rep.detail = "solution did not converge; residuals are indicative only";
  }

  const FeasibilityReport feas = feasibility_report(game, tr, 0.0);
  rep.primal_feasibility = feas.max_violation();

  std::vector<Mat> A(T), Jx(T), Ju(T);
  std::vector<Vec> g(T);
  std::vector<Mat> Bs(T);
  for (int k = 0; k < T; ++k) {
    game.dynamics->jacobians(k, tr.states[k], tr.controls[k], A[k], Bs[k]);
    if (cons.stage_dim() > 0) {
      cons.stage_jacobians(k, tr.states[k], tr.controls[k], Jx[k], Ju[k]);
      g[k] = cons.stage(k, tr.states[k], tr.controls[k]);
      for (int r = 0; r < g[k].size(); ++r) {
        if (cons.stage_kind(r) != ConstraintKind::Inequality) continue;
        rep.complementarity = std::max(rep.complementarity, std::abs(sol.delta[k][r] * g[k][r]));
        rep.dual_feasibility = std::max(rep.dual_feasibility, sol.delta[k][r]);
      }
    } else {
      Jx[k] = Mat::Zero(0, game.state_dim());
      Ju[k] = Mat::Zero(0, game.control_dim());
    }
  }
  Mat JT = Mat::Zero(0, game.state_dim());
  if (cons.terminal_dim() > 0) {
    JT = cons.terminal_jacobian(tr.states[T]);
    const Vec gT = cons.terminal(tr.states[T]);
    for (int r = 0; r < gT.size(); ++r) {
      if (cons.terminal_kind(r) != ConstraintKind::Inequality) continue;
      rep.complementarity = std::max(rep.complementarity, std::abs(sol.delta_terminal[r] * gT[r]));
      rep.dual_feasibility = std::max(rep.dual_feasibility, sol.delta_terminal[r]);
    }
  }

  const StructuredCost& costs = *game.costs;
  rep.agents.resize(N);
  rep.lambda.assign(N, {});
  rep.mu.assign(N, {});
  rep.mu_terminal.assign(N, Vec());
  for (int i = 0; i < N; ++i) {
    AgentKkt& ak = rep.agents[i];
    ak.stationarity_x.assign(T + 1, 0.0);
    ak.stationarity_u.assign(T, 0.0);
    auto& lam = rep.lambda[i];
    auto& mu = rep.mu[i];
    lam.resize(T);
    mu.resize(T);
    for (int k = 0; k < T; ++k) {
      lam[k] = cert.weight(i, k) * sol.xi[k];
      mu[k] = cert.weight(i, k) * sol.delta[k];
    }
    rep.mu_terminal[i] = cert.weight(i, T) * sol.delta_terminal;

    Vec gx, gu;
    for (int k = 0; k < T; ++k) {
      costs.agent_stage_gradient(i, k, tr.states[k], tr.controls[k], gx, gu);
      const Vec ru = ul.block(gu, i) +
                     ul.block(Vec(Bs[k].transpose() * lam[k] - Ju[k].transpose() * mu[k]), i);
      ak.stationarity_u[k] = max_abs(ru);
      if (k >= 1) {
        const Vec rx = xl.block(gx, i) +
                       xl.block(Vec(A[k].transpose() * lam[k] - Jx[k].transpose() * mu[k] -
                                    lam[k - 1]),
                                i);
        ak.stationarity_x[k] = max_abs(rx);
      }
    }
    const Vec gT = costs.agent_terminal_gradient(i, tr.states[T]);
    const Vec rT =
        xl.block(gT, i) + xl.block(Vec(-JT.transpose() * rep.mu_terminal[i] - lam[T - 1]), i);
    ak.stationarity_x[T] = max_abs(rT);
    ak.max_x = *std::max_element(ak.stationarity_x.begin(), ak.stationarity_x.end());
    ak.max_u = *std::max_element(ak.stationarity_u.begin(), ak.stationarity_u.end());
    rep.max_stationarity = std::max(rep.max_stationarity, ak.max());
  }
  rep.passed = !rep.partial && rep.max_residual() <= tol;
  return rep;
}

}  // namespace wcpdg

#endif  // WCPDG_OCP_KKT_HPP_
