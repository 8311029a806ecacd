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

#ifndef WCPDG_SIM_BENCHMARK_HPP_
#define WCPDG_SIM_BENCHMARK_HPP_

#include <chrono>
#include <cstdint>
#include <string>
#include <vector>

#include "wcpdg/core/parallel.hpp"
#include "wcpdg/ocp/al.hpp"
#include "wcpdg/scenarios/builders.hpp"
#include "wcpdg/sim/metrics.hpp"

namespace wcpdg {

/// One Monte-Carlo run. Everything except solve_ms is a deterministic
/// function of (scenario, seed, run).
struct BenchmarkRow {
  int run = 0;
  std::uint64_t seed = 0;
  SolveStatus status = SolveStatus::Converged;
  bool converged = false;
  bool feasible = false;
  bool success = false;  // converged and feasible
  int iterations = 0;
  int outer_iterations = 0;
  double cost = 0.0;
  double min_distance = 0.0;
  double max_goal_error = 0.0;
  double max_violation = 0.0;
  /// Outer violations never increase after the first multiplier update,
  /// ignoring changes below the constraint tolerance.
  bool violation_monotone = true;
  std::string error;  // construction or solver exception, if any
  double solve_ms = 0.0;
};

struct Histogram {
  double lo = 0.0;
  double hi = 0.0;
  std::vector<int> counts;

  double edge(int b) const {
    return lo + (hi - lo) * b / static_cast<double>(counts.size());
  }
  int total() const {
    int s = 0;
    for (int c : counts) s += c;
    return s;
  }
};

/// `bins` equal bins over [0, max(values)]; the maximum lands in the last bin.
inline Histogram make_histogram(const std::vector<double>& values, int bins = 30) {
  Histogram h;
  h.counts.assign(bins, 0);
  if (values.empty()) return h;
  h.hi = *std::max_element(values.begin(), values.end());
  for (double v : values) {
    int b = h.hi > 0.0 ? static_cast<int>(v / h.hi * bins) : 0;
    h.counts[std::clamp(b, 0, bins - 1)]++;
  }
  return h;
}

struct BenchmarkReport {
  std::vector<BenchmarkRow> rows;
  int successes = 0;
  double success_rate = 0.0;
  double monotone_rate = 0.0;
  TimingStats timing;  // successful runs, single open-loop solves
  Histogram histogram;
};

/// Solves `spec` from n jittered starts (uniform in a disc of `radius` in
/// position, heading and speed unchanged). Run r uses derive_seed(seed, r),
/// runs are spread over `workers` threads and collected by index.
inline BenchmarkReport monte_carlo_benchmark(const ScenarioSpec& spec, int n, double radius,
                                             std::uint64_t seed, const SolverOptions& opts,
                                             int workers = worker_count()) {
  if (n < 1) throw DimensionError("benchmark: n must be >= 1");
  spec.validate();
  BenchmarkReport rep;
  rep.rows.resize(n);
  parallel_for(
      n,
      [&](int r) {
        BenchmarkRow& row = rep.rows[r];
        row.run = r;
        row.seed = derive_seed(seed, static_cast<std::uint64_t>(r));
        try {
          const Scenario sc = build_scenario(jitter_starts(spec, radius, row.seed));
          const PotentialCertificate cert = certify_scenario(sc);
          const SolverOptions eff = sc.solver_options(opts);
          const auto t0 = std::chrono::steady_clock::now();
          const OcpSolution sol = al_solve(sc.game, cert, eff);
          row.solve_ms =
              std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
                  .count();
          const RunMetrics m = compute_metrics(sc.game, sol.trajectory, sc.goal_positions);
          row.status = sol.status;
          row.converged = sol.converged;
          row.iterations = sol.iterations;
          row.outer_iterations = sol.outer_iterations;
          row.cost = sol.cost;
          row.min_distance = m.min_pairwise_distance;
          row.max_goal_error = m.max_goal_error();
          row.max_violation = m.max_violation;
          row.feasible = m.max_violation <= eff.constraint_tol;
          row.success = row.converged && row.feasible;
          for (size_t o = 2; o < sol.outer_violations.size(); ++o) {
            const double bound = std::max(sol.outer_violations[o - 1], eff.constraint_tol);
            if (sol.outer_violations[o] > bound) row.violation_monotone = false;
          }
        } catch (const std::exception& e) {
          row.status = SolveStatus::Diverged;
          row.error = e.what();
        }
      },
      workers);

  std::vector<double> times;
  int monotone = 0;
  for (const BenchmarkRow& row : rep.rows) {
    if (row.success) {
      ++rep.successes;
      times.push_back(row.solve_ms);
    }
    if (row.violation_monotone) ++monotone;
  }
  rep.success_rate = rep.successes / static_cast<double>(n);
  rep.monotone_rate = monotone / static_cast<double>(n);
  rep.timing = TimingStats::of(times);
  rep.histogram = make_histogram(times);
  return rep;
}

}  // namespace wcpdg

#endif  // WCPDG_SIM_BENCHMARK_HPP_
