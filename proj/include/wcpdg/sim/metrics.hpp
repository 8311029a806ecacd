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

#ifndef WCPDG_SIM_METRICS_HPP_
#define WCPDG_SIM_METRICS_HPP_

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "wcpdg/core/constraints.hpp"
#include "wcpdg/core/game.hpp"

namespace wcpdg {

struct TimingStats {
  int count = 0;
  double mean_ms = 0.0;
  double std_ms = 0.0;
  double max_ms = 0.0;

  static TimingStats of(const std::vector<double>& ms) {
    TimingStats t;
    t.count = static_cast<int>(ms.size());
    if (ms.empty()) return t;
    double sum = 0.0;
    for (double v : ms) sum += v;
    t.mean_ms = sum / t.count;
    double sq = 0.0;
    for (double v : ms) sq += (v - t.mean_ms) * (v - t.mean_ms);
    t.std_ms = std::sqrt(sq / t.count);
    t.max_ms = *std::max_element(ms.begin(), ms.end());
    return t;
  }
};

/// Position-based summary of a run. Positions are the first two state
/// components of every agent.
struct RunMetrics {
  double min_pairwise_distance = std::numeric_limits<double>::infinity();
  std::vector<double> goal_error;          // |p^i_T - goal^i|
  std::vector<double> max_path_deviation;  // from the straight start -> goal segment
  TimingStats solve_time;
  double max_violation = 0.0;  // stage and terminal constraints, not dynamics

  double max_goal_error() const {
    return goal_error.empty() ? 0.0 : *std::max_element(goal_error.begin(), goal_error.end());
  }
};

inline Eigen::Vector2d planar_position(const BlockLayout& xl, const Vec& x, int agent) {
  const auto b = xl.block(x, agent);
  return {b[0], b[1]};
}

/// Distance from p to the segment [a, b].
inline double segment_distance(const Eigen::Vector2d& p, const Eigen::Vector2d& a,
                               const Eigen::Vector2d& b) {
  const Eigen::Vector2d ab = b - a;
  const double len2 = ab.squaredNorm();
  const double t = len2 > 0.0 ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
  return (p - (a + t * ab)).norm();
}

/// Max constraint violation along any state/control sequence, with the
/// terminal rows evaluated at the last state.
inline double constraint_violation(const Constraints& cons, const Trajectory& tr) {
  double v = 0.0;
  if (cons.stage_dim() > 0) {
    for (int k = 0; k < tr.horizon(); ++k) {
      const Vec g = cons.stage(k, tr.states[k], tr.controls[k]);
      for (int r = 0; r < g.size(); ++r) v = std::max(v, row_violation(g[r], cons.stage_kind(r)));
    }
  }
  if (cons.terminal_dim() > 0 && !tr.states.empty()) {
    const Vec g = cons.terminal(tr.states.back());
    for (int r = 0; r < g.size(); ++r) v = std::max(v, row_violation(g[r], cons.terminal_kind(r)));
  }
  return v;
}

/// Metrics of `tr` against goal positions; nominal paths start at tr's
/// first state. Solve times are left empty.
inline RunMetrics compute_metrics(const Game& game, const Trajectory& tr,
                                  const std::vector<Eigen::Vector2d>& goals) {
  const int N = game.agents();
  if (static_cast<int>(goals.size()) != N) throw DimensionError("metrics: one goal per agent");
  if (tr.states.empty()) throw DimensionError("metrics: empty trajectory");
  const BlockLayout& xl = game.state_layout();
  RunMetrics m;
  m.goal_error.assign(N, 0.0);
  m.max_path_deviation.assign(N, 0.0);
  std::vector<Eigen::Vector2d> start(N);
  for (int i = 0; i < N; ++i) start[i] = planar_position(xl, tr.states.front(), i);
  for (const Vec& x : tr.states) {
    for (int i = 0; i < N; ++i) {
      const Eigen::Vector2d pi = planar_position(xl, x, i);
      m.max_path_deviation[i] =
          std::max(m.max_path_deviation[i], segment_distance(pi, start[i], goals[i]));
      for (int j = i + 1; j < N; ++j) {
        m.min_pairwise_distance =
            std::min(m.min_pairwise_distance, (pi - planar_position(xl, x, j)).norm());
      }
    }
  }
  for (int i = 0; i < N; ++i) {
    m.goal_error[i] = (planar_position(xl, tr.states.back(), i) - goals[i]).norm();
  }
  m.max_violation = constraint_violation(*game.constraints, tr);
  return m;
}

}  // namespace wcpdg

#endif  // WCPDG_SIM_METRICS_HPP_
