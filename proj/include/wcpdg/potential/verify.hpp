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

#ifndef WCPDG_POTENTIAL_VERIFY_HPP_
#define WCPDG_POTENTIAL_VERIFY_HPP_

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "wcpdg/core/finite_difference.hpp"
#include "wcpdg/core/game.hpp"
#include "wcpdg/core/random.hpp"
#include "wcpdg/potential/certificate.hpp"
#include "wcpdg/potential/objective.hpp"

namespace wcpdg {

struct VerificationReport {
  int samples = 0;
  double max_residual = 0.0;
  double tol = 0.0;
  bool passed = true;
  int worst_sample = -1;
  std::string worst_detail;

  void record(int sample, double residual, const std::string& detail) {
    ++samples;
    if (residual > max_residual || worst_sample < 0) {
      max_residual = std::max(max_residual, residual);
      worst_sample = sample;
      worst_detail = detail;
    }
    passed = max_residual <= tol;
  }
};

struct PropertySamplingOptions {
  int max_retries = 100;
  /// Feasibility tolerance for base and deviated strategies.
  double feasibility_tol = 1e-9;
  /// Base controls are reference + noise; default reference is zero.
  std::vector<Vec> reference_controls;
};

namespace detail {

inline void perturb_block(Rng& rng, const BlockLayout& ul, int agent, Vec& u) {
  auto blk = ul.block(u, agent);
  const double scale = 0.1 * (1.0 + blk.norm());
  blk += normal_vector(rng, ul.size(agent), scale);
}

inline double weighted_potential_difference(const PotentialObjective& pot,
                                            const PotentialCertificate& cert, int agent,
                                            const Trajectory& a, const Trajectory& b) {
  const int T = a.horizon();
  double d = cert.weight(agent, T) * (pot.terminal(a.states[T]) - pot.terminal(b.states[T]));
  for (int k = 0; k < T; ++k) {
    d += cert.weight(agent, k) *
         (pot.stage(k, a.states[k], a.controls[k]) - pot.stage(k, b.states[k], b.controls[k]));
  }
  return d;
}

}  // namespace detail

/// Checks J^i(x,u) - J^i(x',u') == sum_k w^i_k (L_k - L'_k) + w^i_T (L_T - L'_T)
/// on random pairs of feasible strategies that differ only in one agent's
/// controls. Perturbations are zero-mean Gaussian with scale 0.1 (1 + |u|),
/// projected onto control bounds when the game has them.
inline VerificationReport verify_potential_property(
    const Game& game, const PotentialCertificate& cert, int samples, double tol,
    std::uint64_t seed, const PropertySamplingOptions& opts = {}) {
  if (samples < 1) throw SamplingError("verify_potential_property: samples must be >= 1");
  game.validate();
  const PotentialObjective pot(cert);
  const BlockLayout& ul = game.control_layout();
  const int T = game.horizon;
  VerificationReport report;
  report.tol = tol;
  auto feasible = [&](const Trajectory& tr) {
    return feasibility_report(game, tr, opts.feasibility_tol).feasible;
  };
  for (int s = 0; s < samples; ++s) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(s)));
    const int agent = std::uniform_int_distribution<int>(0, game.agents() - 1)(rng);
    bool found = false;
    for (int attempt = 0; attempt < opts.max_retries && !found; ++attempt) {
      std::vector<Vec> base(T);
      for (int k = 0; k < T; ++k) {
        base[k] = opts.reference_controls.empty() ? Vec::Zero(game.control_dim())
                                                  : opts.reference_controls.at(k);
        for (int i = 0; i < game.agents(); ++i) detail::perturb_block(rng, ul, i, base[k]);
        game.constraints->project_controls(base[k]);
      }
      std::vector<Vec> dev = base;
      for (int k = 0; k < T; ++k) {
        detail::perturb_block(rng, ul, agent, dev[k]);
        game.constraints->project_controls(dev[k]);
      }
      const Trajectory a = rollout(game, base);
      const Trajectory b = rollout(game, dev);
      if (!feasible(a) || !feasible(b)) continue;
      found = true;
      const double dj = agent_cost(game, a, AgentId(agent)) - agent_cost(game, b, AgentId(agent));
      const double dp = detail::weighted_potential_difference(pot, cert, agent, a, b);
      report.record(s, std::abs(dj - dp),
                    "agent " + std::to_string(agent) + " dJ=" + std::to_string(dj));
    }
    if (!found) {
      throw SamplingError("verify_potential_property: no feasible unilateral deviation after " +
                          std::to_string(opts.max_retries) + " attempts (sample " +
                          std::to_string(s) + ")");
    }
  }
  return report;
}

enum class DerivativeSource { FiniteDifference, Analytic };

struct DerivativeConditionOptions {
  DerivativeSource source = DerivativeSource::FiniteDifference;
  double state_scale = 1.5;
  double control_scale = 1.0;
};

/// Checks dL^i_k/dx^i == w^i_k dL_k/dx^i and the u^i and terminal analogues at
/// random points.
inline VerificationReport verify_derivative_conditions(
    const Game& game, const PotentialCertificate& cert, int samples, double tol,
    std::uint64_t seed, const DerivativeConditionOptions& opts = {}) {
  game.validate();
  const PotentialObjective pot(cert);
  const StructuredCost& costs = *game.costs;
  const BlockLayout& xl = game.state_layout();
  const BlockLayout& ul = game.control_layout();
  const int T = game.horizon;
  const int n = game.state_dim();
  const int m = game.control_dim();
  VerificationReport report;
  report.tol = tol;
  const bool use_fd = opts.source == DerivativeSource::FiniteDifference;

  for (int s = 0; s < samples; ++s) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(s)));
    const int k = std::uniform_int_distribution<int>(0, T - 1)(rng);
    const Vec x = normal_vector(rng, n, opts.state_scale);
    const Vec u = normal_vector(rng, m, opts.control_scale);
    const Vec xT = normal_vector(rng, n, opts.state_scale);

    Vec pgx, pgu, pgT;
    if (use_fd) {
      pgx = fd::gradient([&](const Vec& p) { return pot.stage(k, p, u); }, x);
      pgu = fd::gradient([&](const Vec& p) { return pot.stage(k, x, p); }, u);
      pgT = fd::gradient([&](const Vec& p) { return pot.terminal(p); }, xT);
    } else {
      const QuadraticModel q = pot.stage_quadratic(k, x, u);
      pgx = q.gx;
      pgu = q.gu;
      pgT = pot.terminal_quadratic(xT).gx;
    }

    for (int i = 0; i < game.agents(); ++i) {
      Vec agx, agu, agT;
      if (use_fd) {
        agx = fd::gradient([&](const Vec& p) { return costs.agent_stage(i, k, p, u); }, x);
        agu = fd::gradient([&](const Vec& p) { return costs.agent_stage(i, k, x, p); }, u);
        agT = fd::gradient([&](const Vec& p) { return costs.agent_terminal(i, p); }, xT);
      } else {
        costs.agent_stage_gradient(i, k, x, u, agx, agu);
        agT = costs.agent_terminal_gradient(i, xT);
      }
      const double wk = cert.weight(i, k);
      const double wT = cert.weight(i, T);
      const double rx = max_abs(Vec(xl.block(agx, i) - wk * xl.block(pgx, i)));
      const double ru = max_abs(Vec(ul.block(agu, i) - wk * ul.block(pgu, i)));
      const double rT = max_abs(Vec(xl.block(agT, i) - wT * xl.block(pgT, i)));
      report.record(s, std::max({rx, ru, rT}),
                    "agent " + std::to_string(i) + " k=" + std::to_string(k));
    }
  }
  return report;
}

/// J^i - (sum_k w^i_k L_k + w^i_T L_T) evaluated on an arbitrary (not
/// necessarily dynamically consistent) state/control sequence. For a
/// certified game this does not depend on agent i's own blocks.
inline double decomposition_remainder(const Game& game, const PotentialCertificate& cert,
                                      int agent, const Trajectory& traj) {
  const PotentialObjective pot(cert);
  const StructuredCost& costs = *game.costs;
  const int T = traj.horizon();
  double r = costs.agent_terminal(agent, traj.states[T]) -
             cert.weight(agent, T) * pot.terminal(traj.states[T]);
  for (int k = 0; k < T; ++k) {
    r += costs.agent_stage(agent, k, traj.states[k], traj.controls[k]) -
         cert.weight(agent, k) * pot.stage(k, traj.states[k], traj.controls[k]);
  }
  return r;
}

}  // namespace wcpdg

#endif  // WCPDG_POTENTIAL_VERIFY_HPP_
