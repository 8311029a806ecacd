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

#ifndef WCPDG_OCP_OPTIONS_HPP_
#define WCPDG_OCP_OPTIONS_HPP_

#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "wcpdg/core/types.hpp"

namespace wcpdg {

/// One accepted iLQR iterate, as emitted to SolverOptions::trace.
struct TraceRecord {
  int outer = 0;
  int iteration = 0;
  double cost = 0.0;
  double violation = 0.0;
  double regularization = 0.0;
  double step = 0.0;
  double gradient = 0.0;
  double penalty = 0.0;
};

struct SolverOptions {
  int max_outer_iterations = 30;
  int max_ilqr_iterations = 300;
  double cost_tol = 1e-8;
  double gradient_tol = 1e-6;
  double constraint_tol = 1e-6;

  double penalty_initial = 1.0;
  double penalty_growth = 10.0;
  double penalty_max = 1e8;
  // Grow the penalty only when the violation shrank by less than this factor.
  double penalty_progress = 0.25;

  // Levenberg term on Q_uu.
  double reg_initial = 0.0;
  double reg_floor = 1e-8;   // smallest nonzero value; below it the term is dropped
  double reg_restart = 1e-6; // first nonzero value after a failure from zero
  double reg_increase = 2.0;
  double reg_decrease = 0.5;
  double reg_max = 1e10;

  double line_search_factor = 0.5;
  double min_step = 1e-8;
  double armijo = 1e-4;

  std::function<void(const TraceRecord&)> trace;

  void validate() const {
    auto positive = [](double v, const char* what) {
      if (!(v > 0.0)) throw DimensionError(std::string("solver options: ") + what + " must be > 0");
    };
    positive(cost_tol, "cost_tol");
    positive(gradient_tol, "gradient_tol");
    positive(constraint_tol, "constraint_tol");
    positive(penalty_initial, "penalty_initial");
    positive(min_step, "min_step");
    positive(reg_max, "reg_max");
    if (!(penalty_growth > 1.0)) throw DimensionError("solver options: penalty_growth must be > 1");
    if (!(penalty_progress > 0.0 && penalty_progress <= 1.0)) {
      throw DimensionError("solver options: penalty_progress must be in (0, 1]");
    }
    if (!(reg_increase > 1.0)) throw DimensionError("solver options: reg_increase must be > 1");
    if (!(reg_decrease > 0.0 && reg_decrease < 1.0)) {
      throw DimensionError("solver options: reg_decrease must be in (0, 1)");
    }
    if (!(line_search_factor > 0.0 && line_search_factor < 1.0)) {
      throw DimensionError("solver options: line_search_factor must be in (0, 1)");
    }
    if (max_outer_iterations < 1 || max_ilqr_iterations < 1) {
      throw DimensionError("solver options: iteration limits must be >= 1");
    }
  }
};

enum class SolveStatus {
  Converged,
  MaxIterations,
  Stalled,
  RegularizationFailure,
  Infeasible,
  Diverged,
};

inline std::string_view to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::Converged: return "converged";
    case SolveStatus::MaxIterations: return "max_iterations";
    case SolveStatus::Stalled: return "stalled";
    case SolveStatus::RegularizationFailure: return "regularization_failure";
    case SolveStatus::Infeasible: return "infeasible";
    case SolveStatus::Diverged: return "diverged";
  }
  return "unknown";
}

/// Result of one optimal control solve.
///
/// Multipliers follow the Lagrangian
///   L_T + delta_T' g_T + sum_k [L_k + xi_k'(f(x_k,u_k) - x_{k+1}) + delta_k' g_k]
/// with delta <= 0 on inequality rows.
struct OcpSolution {
  Trajectory trajectory;
  std::vector<Vec> xi;      // k = 0..T-1
  std::vector<Vec> delta;   // k = 0..T-1, stage rows
  Vec delta_terminal;
  bool has_multipliers = false;

  SolveStatus status = SolveStatus::MaxIterations;
  bool converged = false;
  std::string message;
  int iterations = 0;        // total iLQR iterations
  int outer_iterations = 0;
  double cost = 0.0;         // objective without penalty terms
  double gradient = 0.0;     // max |dL/du| of the penalized problem at exit
  double max_violation = 0.0;
  double complementarity = 0.0;
  double penalty = 0.0;
  std::vector<double> cost_history;       // accepted iLQR costs
  std::vector<double> outer_violations;   // violation after each outer iteration
};

}  // namespace wcpdg

#endif  // WCPDG_OCP_OPTIONS_HPP_
