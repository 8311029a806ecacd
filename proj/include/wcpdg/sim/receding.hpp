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

#ifndef WCPDG_SIM_RECEDING_HPP_
#define WCPDG_SIM_RECEDING_HPP_

#include <chrono>
#include <string>
#include <vector>

#include "wcpdg/ocp/al.hpp"
#include "wcpdg/potential/certificate.hpp"
#include "wcpdg/sim/metrics.hpp"

namespace wcpdg {

struct RecedingHorizonConfig {
  int plan = 5;     // steps per planning window
  int execute = 1;  // steps applied before re-planning
  int total = 50;   // closed-loop steps
  bool warm_start = true;

  void validate() const {
    if (plan < 1 || execute < 1 || execute > plan) {
      throw DimensionError("receding horizon: need 1 <= execute <= plan");
    }
    if (total < 1) throw DimensionError("receding horizon: total must be >= 1");
  }
};

struct RecedingHorizonResult {
  Trajectory trajectory;  // executed closed loop, possibly partial
  RunMetrics metrics;
  std::vector<int> iterations;   // per replan
  std::vector<double> solve_ms;  // per replan, solver only
  bool success = false;
  int failure_index = -1;  // replan that failed, -1 if none
  SolveStatus failure_status = SolveStatus::Converged;
  std::string message;
};

/// Next warm start: drop the executed prefix and repeat the last control.
inline std::vector<Vec> shift_controls(const std::vector<Vec>& u, int executed) {
  std::vector<Vec> out(u.size());
  const int n = static_cast<int>(u.size());
  for (int k = 0; k < n; ++k) out[k] = u[std::min(k + executed, n - 1)];
  return out;
}

/// Plans over `cfg.plan` steps from the current state, applies the first
/// `cfg.execute` controls through the game's dynamics and repeats until
/// `cfg.total` steps are executed. Windows past the game's horizon reuse its
/// last stage costs. Each window is certified with the structure of `cert`.
inline RecedingHorizonResult run_receding_horizon(const Game& game,
                                                  const PotentialCertificate& cert,
                                                  const RecedingHorizonConfig& cfg,
                                                  const SolverOptions& opts,
                                                  const std::vector<Eigen::Vector2d>& goals) {
  cfg.validate();
  game.validate();
  if (game.horizon < cfg.plan) throw DimensionError("receding horizon: plan exceeds game horizon");
  RecedingHorizonResult res;
  Trajectory& cl = res.trajectory;
  cl.dt = game.dt;
  cl.states.push_back(game.x0);
  std::vector<Vec> warm(cfg.plan, Vec::Zero(game.control_dim()));

  int k = 0;
  for (int replan = 0; k < cfg.total; ++replan) {
    const Game win = game.window(k, cfg.plan, cl.states.back());
    const PotentialCertificate wc = certify(win.costs, cert.structure());
    std::vector<Vec> init =
        cfg.warm_start ? warm : std::vector<Vec>(cfg.plan, Vec::Zero(game.control_dim()));
    const auto t0 = std::chrono::steady_clock::now();
    const OcpSolution sol = al_solve(win, wc, std::move(init), opts);
    res.solve_ms.push_back(
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count());
    res.iterations.push_back(sol.iterations);
    if (!sol.converged) {
      res.failure_index = replan;
      res.failure_status = sol.status;
      res.message = "replan " + std::to_string(replan) + " at step " + std::to_string(k) + ": " +
                    std::string(to_string(sol.status)) +
                    (sol.message.empty() ? "" : " (" + sol.message + ")");
      break;
    }
    const int steps = std::min(cfg.execute, cfg.total - k);
    for (int s = 0; s < steps; ++s, ++k) {
      const Vec& u = sol.trajectory.controls[s];
      cl.controls.push_back(u);
      cl.states.push_back(game.dynamics->step(k, cl.states.back(), u));
    }
    warm = shift_controls(sol.trajectory.controls, steps);
  }
  res.success = res.failure_index < 0;
  res.metrics = compute_metrics(game, cl, goals);
  res.metrics.solve_time = TimingStats::of(res.solve_ms);
  return res;
}

}  // namespace wcpdg

#endif  // WCPDG_SIM_RECEDING_HPP_
