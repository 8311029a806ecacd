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

#ifndef WCPDG_LQ_EQUIVALENCE_HPP_
#define WCPDG_LQ_EQUIVALENCE_HPP_

#include <cmath>
#include <cstdint>
#include <vector>

#include "wcpdg/core/parallel.hpp"
#include "wcpdg/core/random.hpp"
#include "wcpdg/lq/solvers.hpp"

namespace wcpdg {

struct EquivalenceReport {
  int runs = 0;
  double max_deviation = 0.0;  // max over runs and k of |x_pot - x_nash|_inf
  int worst_run = -1;
  std::vector<double> run_deviation;
  // Per-time statistics across runs, k = 0..T.
  std::vector<Vec> mean_potential;
  std::vector<Vec> std_potential;
  std::vector<Vec> mean_nash;
  std::vector<Vec> std_nash;

  bool equivalent(double tol) const { return max_deviation <= tol; }
};

/// Solves the potential LQR problem and the exact open-loop Nash problem from
/// n initial states drawn uniformly from the infinity-ball of `radius` around
/// game.x0 and compares the state trajectories.
inline EquivalenceReport monte_carlo_equivalence(const LqGame& game, const LqPotential& pot,
                                                 int n, double radius, std::uint64_t seed,
                                                 int workers = worker_count()) {
  if (n < 1) throw DimensionError("equivalence: n must be >= 1");
  if (radius < 0.0) throw DimensionError("equivalence: radius must be >= 0");
  game.validate();
  const int T = game.horizon;
  std::vector<Trajectory> pot_runs(n), nash_runs(n);
  parallel_for(
      n,
      [&](int r) {
        Rng rng(derive_seed(seed, static_cast<std::uint64_t>(r)));
        LqGame g = game;
        g.x0 = game.x0 + uniform_vector(rng, game.state_dim(), radius);
        pot_runs[r] = lqr_solve(pot, g).trajectory;
        nash_runs[r] = open_loop_nash_exact(g);
      },
      workers);

  EquivalenceReport rep;
  rep.runs = n;
  rep.run_deviation.assign(n, 0.0);
  for (int r = 0; r < n; ++r) {
    double d = 0.0;
    for (int k = 0; k <= T; ++k) {
      d = std::max(d, max_abs(Vec(pot_runs[r].states[k] - nash_runs[r].states[k])));
    }
    rep.run_deviation[r] = d;
    if (d > rep.max_deviation || rep.worst_run < 0) {
      rep.max_deviation = std::max(rep.max_deviation, d);
      rep.worst_run = r;
    }
  }
  auto stats = [&](const std::vector<Trajectory>& runs, std::vector<Vec>& mean,
                   std::vector<Vec>& stdev) {
    mean.assign(T + 1, Vec::Zero(game.state_dim()));
    stdev.assign(T + 1, Vec::Zero(game.state_dim()));
    for (int k = 0; k <= T; ++k) {
      for (const auto& tr : runs) mean[k] += tr.states[k];
      mean[k] /= n;
      for (const auto& tr : runs) stdev[k] += (tr.states[k] - mean[k]).cwiseAbs2();
      stdev[k] = (stdev[k] / n).cwiseSqrt();
    }
  };
  stats(pot_runs, rep.mean_potential, rep.std_potential);
  stats(nash_runs, rep.mean_nash, rep.std_nash);
  return rep;
}

}  // namespace wcpdg

#endif  // WCPDG_LQ_EQUIVALENCE_HPP_
