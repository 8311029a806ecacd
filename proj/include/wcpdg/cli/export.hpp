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

#ifndef WCPDG_CLI_EXPORT_HPP_
#define WCPDG_CLI_EXPORT_HPP_

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "wcpdg/core/game.hpp"
#include "wcpdg/ocp/options.hpp"
#include "wcpdg/sim/benchmark.hpp"
#include "wcpdg/sim/metrics.hpp"

namespace wcpdg {

/// Locale-independent shortest form with at most 9 significant digits.
inline std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 9);
  return std::string(buf, r.ptr);
}

/// One row per (k, agent): k, t, agent, x0.., u0.. with the widest agent's
/// column count; missing and terminal control cells are empty.
inline void write_trajectory_csv(std::ostream& out, const Game& game, const Trajectory& tr) {
  const BlockLayout& xl = game.state_layout();
  const BlockLayout& ul = game.control_layout();
  const int N = game.agents();
  int nx = 0;
  int nu = 0;
  for (int i = 0; i < N; ++i) {
    nx = std::max(nx, xl.size(i));
    nu = std::max(nu, ul.size(i));
  }
  out << "k,t,agent";
  for (int c = 0; c < nx; ++c) out << ",x" << c;
  for (int c = 0; c < nu; ++c) out << ",u" << c;
  out << '\n';
  for (int k = 0; k < static_cast<int>(tr.states.size()); ++k) {
    for (int i = 0; i < N; ++i) {
      out << k << ',' << format_number(k * tr.dt) << ',' << i;
      const auto x = xl.block(tr.states[k], i);
      for (int c = 0; c < nx; ++c) out << ',' << (c < x.size() ? format_number(x[c]) : "");
      const bool has_u = k < static_cast<int>(tr.controls.size());
      for (int c = 0; c < nu; ++c) {
        out << ',';
        if (has_u && c < ul.size(i)) out << format_number(ul.block(tr.controls[k], i)[c]);
      }
      out << '\n';
    }
  }
}

/// JSON number, or null when not finite.
inline nlohmann::json json_number(double v) {
  return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

inline nlohmann::json metrics_to_json(const RunMetrics& m, bool with_timing) {
  nlohmann::json j;
  j["min_pairwise_distance"] = json_number(m.min_pairwise_distance);
  j["goal_error"] = m.goal_error;
  j["max_path_deviation"] = m.max_path_deviation;
  j["max_violation"] = json_number(m.max_violation);
  if (with_timing) {
    j["solve_time_ms"] = {{"count", m.solve_time.count},
                          {"mean", m.solve_time.mean_ms},
                          {"std", m.solve_time.std_ms},
                          {"max", m.solve_time.max_ms}};
  }
  return j;
}

inline nlohmann::json trace_to_json(const TraceRecord& r) {
  return {{"outer", r.outer},
          {"iteration", r.iteration},
          {"cost", json_number(r.cost)},
          {"violation", json_number(r.violation)},
          {"regularization", json_number(r.regularization)},
          {"step", json_number(r.step)},
          {"gradient", json_number(r.gradient)},
          {"penalty", json_number(r.penalty)}};
}

/// Deterministic per-run table (no timings).
inline void write_benchmark_runs_csv(std::ostream& out, const BenchmarkReport& rep) {
  out << "run,seed,status,converged,feasible,success,iterations,outer_iterations,cost,"
         "min_distance,max_goal_error,max_violation,violation_monotone\n";
  for (const BenchmarkRow& r : rep.rows) {
    out << r.run << ',' << r.seed << ',' << to_string(r.status) << ',' << int(r.converged) << ','
        << int(r.feasible) << ',' << int(r.success) << ',' << r.iterations << ','
        << r.outer_iterations << ',' << format_number(r.cost) << ','
        << format_number(r.min_distance) << ',' << format_number(r.max_goal_error) << ','
        << format_number(r.max_violation) << ',' << int(r.violation_monotone) << '\n';
  }
}

/// Deterministic aggregate block.
inline nlohmann::json benchmark_summary_json(const BenchmarkReport& rep) {
  double max_goal = 0.0;
  double min_dist = std::numeric_limits<double>::infinity();
  double max_viol = 0.0;
  for (const BenchmarkRow& r : rep.rows) {
    if (!r.error.empty()) continue;
    max_goal = std::max(max_goal, r.max_goal_error);
    min_dist = std::min(min_dist, r.min_distance);
    max_viol = std::max(max_viol, r.max_violation);
  }
  return {{"runs", rep.rows.size()},
          {"successes", rep.successes},
          {"success_rate", rep.success_rate},
          {"violation_monotone_rate", rep.monotone_rate},
          {"max_goal_error", json_number(max_goal)},
          {"min_distance", json_number(min_dist)},
          {"max_violation", json_number(max_viol)}};
}

/// Machine-dependent timing block: single open-loop solves, solver only.
inline nlohmann::json benchmark_timing_json(const BenchmarkReport& rep, double reference_ms) {
  return {{"label", "single open-loop solve, solver iterations only"},
          {"successful_runs", rep.timing.count},
          {"mean_ms", rep.timing.mean_ms},
          {"std_ms", rep.timing.std_ms},
          {"max_ms", rep.timing.max_ms},
          {"reference_mean_ms", reference_ms}};
}

inline void write_timing_csv(std::ostream& out, const BenchmarkReport& rep) {
  out << "run,success,solve_ms\n";
  for (const BenchmarkRow& r : rep.rows) {
    out << r.run << ',' << int(r.success) << ',' << format_number(r.solve_ms) << '\n';
  }
}

inline void write_histogram_csv(std::ostream& out, const Histogram& h) {
  out << "bin,lo_ms,hi_ms,count\n";
  const int bins = static_cast<int>(h.counts.size());
  for (int b = 0; b < bins; ++b) {
    out << b << ',' << format_number(h.edge(b)) << ',' << format_number(h.edge(b + 1)) << ','
        << h.counts[b] << '\n';
  }
}

}  // namespace wcpdg

#endif  // WCPDG_CLI_EXPORT_HPP_
