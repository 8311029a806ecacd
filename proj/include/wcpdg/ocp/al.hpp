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

#ifndef WCPDG_OCP_AL_HPP_
#define WCPDG_OCP_AL_HPP_

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

#include "wcpdg/core/constraints.hpp"
#include "wcpdg/core/game.hpp"
#include "wcpdg/ocp/ilqr.hpp"
#include "wcpdg/potential/certificate.hpp"
#include "wcpdg/potential/objective.hpp"

namespace wcpdg {

/// Objective plus the augmented-Lagrangian terms of a constraint map.
///
/// Multipliers nu use the conventional sign (nu >= 0 on g <= 0 rows). An
/// inequality row contributes (max(0, nu + mu g)^2 - nu^2) / (2 mu), an
/// equality row nu g + mu g^2 / 2. Both are C^1; the Hessian is the
/// Gauss-Newton term mu J'J on rows where the shifted multiplier is positive.
class AugmentedObjective final : public Objective {
 public:
  AugmentedObjective(const Objective& base, const Constraints& cons,
                     const std::vector<Vec>& nu, const Vec& nu_terminal, double mu)
      : base_(base), cons_(cons), nu_(nu), nu_T_(nu_terminal), mu_(mu) {}

  double stage(int k, const VecRef& x, const VecRef& u) const override {
    double v = base_.stage(k, x, u);
    if (cons_.stage_dim() > 0) {
      const Vec g = cons_.stage(k, x, u);
      for (int r = 0; r < g.size(); ++r) v += penalty(g[r], nu_[k][r], cons_.stage_kind(r));
    }
    return v;
  }

  double terminal(const VecRef& x) const override {
    double v = base_.terminal(x);
    if (cons_.terminal_dim() > 0) {
      const Vec g = cons_.terminal(x);
      for (int r = 0; r < g.size(); ++r) v += penalty(g[r], nu_T_[r], cons_.terminal_kind(r));
    }
    return v;
  }

  QuadraticModel stage_quadratic(int k, const VecRef& x, const VecRef& u) const override {
    QuadraticModel q = base_.stage_quadratic(k, x, u);
    if (cons_.stage_dim() == 0) return q;
    const Vec g = cons_.stage(k, x, u);
    Mat Jx, Ju;
    cons_.stage_jacobians(k, x, u, Jx, Ju);
    Vec m(g.size()), w(g.size());
    for (int r = 0; r < g.size(); ++r) shifted(g[r], nu_[k][r], cons_.stage_kind(r), m[r], w[r]);
    q.value = stage(k, x, u);
    q.gx += Jx.transpose() * m;
    q.gu += Ju.transpose() * m;
    q.Hxx += Jx.transpose() * w.asDiagonal() * Jx;
    q.Huu += Ju.transpose() * w.asDiagonal() * Ju;
    q.Hux += Ju.transpose() * w.asDiagonal() * Jx;
    return q;
  }

  QuadraticModel terminal_quadratic(const VecRef& x) const override {
    QuadraticModel q = base_.terminal_quadratic(x);
    if (cons_.terminal_dim() == 0) return q;
    const Vec g = cons_.terminal(x);
    const Mat Jx = cons_.terminal_jacobian(x);
    Vec m(g.size()), w(g.size());
    for (int r = 0; r < g.size(); ++r) shifted(g[r], nu_T_[r], cons_.terminal_kind(r), m[r], w[r]);
    q.value = terminal(x);
    q.gx += Jx.transpose() * m;
    q.Hxx += Jx.transpose() * w.asDiagonal() * Jx;
    return q;
  }

  /// Multiplier estimate after a solve: max(0, nu + mu g), unclamped for
  /// equality rows.
  static double update(double g, double nu, double mu, ConstraintKind kind) {
    const double s = nu + mu * g;
    return kind == ConstraintKind::Equality ? s : std::max(0.0, s);
  }

 private:
  double penalty(double g, double nu, ConstraintKind kind) const {
    if (kind == ConstraintKind::Equality) return nu * g + 0.5 * mu_ * g * g;
    const double s = std::max(0.0, nu + mu_ * g);
    return (s * s - nu * nu) / (2.0 * mu_);
  }

  void shifted(double g, double nu, ConstraintKind kind, double& m, double& w) const {
    m = update(g, nu, mu_, kind);
    w = (kind == ConstraintKind::Equality || nu + mu_ * g > 0.0) ? mu_ : 0.0;
  }

  const Objective& base_;
  const Constraints& cons_;
  const std::vector<Vec>& nu_;
  const Vec& nu_T_;
  double mu_;
};

namespace detail {

struct ConstraintStatus {
  double violation = 0.0;
  double complementarity = 0.0;
  double max_multiplier = 0.0;

  /// |nu g| measured against the multiplier scale, so that large multipliers
  /// do not demand a constraint value below rounding.
  bool complementary(double tol) const { return complementarity <= tol * std::max(1.0, max_multiplier); }
};

inline ConstraintStatus constraint_status(const Constraints& cons, const Trajectory& tr,
                                          const std::vector<Vec>& nu, const Vec& nu_T) {
  ConstraintStatus st;
  auto rows = [&](const Vec& g, const Vec& m, auto kind) {
    for (int r = 0; r < g.size(); ++r) {
      const ConstraintKind kd = kind(r);
      st.violation = std::max(st.violation, row_violation(g[r], kd));
      if (kd == ConstraintKind::Inequality) {
        st.complementarity = std::max(st.complementarity, std::abs(m[r] * g[r]));
        st.max_multiplier = std::max(st.max_multiplier, std::abs(m[r]));
      }
    }
  };
  if (cons.stage_dim() > 0) {
    for (int k = 0; k < tr.horizon(); ++k) {
      rows(cons.stage(k, tr.states[k], tr.controls[k]), nu[k],
           [&](int r) { return cons.stage_kind(r); });
    }
  }
  if (cons.terminal_dim() > 0) {
    rows(cons.terminal(tr.states.back()), nu_T, [&](int r) { return cons.terminal_kind(r); });
  }
  return st;
}

/// Costates of the constrained problem at a fixed trajectory and multipliers:
///   xi_{T-1} = dL_T/dx + J_T' nu_T,
///   xi_{k-1} = dL_k/dx + A_k' xi_k + Jx_k' nu_k.
/// Also returns the control stationarity residual dL_k/du + B_k' xi_k + Ju_k' nu_k.
inline void constrained_adjoint(const Objective& obj, const Dynamics& dyn,
                                const Constraints& cons, const Trajectory& tr,
                                const std::vector<Vec>& nu, const Vec& nu_T,
                                std::vector<Vec>& xi, std::vector<Vec>& grad_u) {
  const int T = tr.horizon();
  xi.assign(T, Vec());
  grad_u.assign(T, Vec());
  Vec next = obj.terminal_quadratic(tr.states[T]).gx;
  if (cons.terminal_dim() > 0) next += cons.terminal_jacobian(tr.states[T]).transpose() * nu_T;
  Mat A, B, Jx, Ju;
  for (int k = T - 1; k >= 0; --k) {
    xi[k] = next;
    dyn.jacobians(k, tr.states[k], tr.controls[k], A, B);
    const QuadraticModel q = obj.stage_quadratic(k, tr.states[k], tr.controls[k]);
    Vec gx = q.gx + A.transpose() * next;
    Vec gu = q.gu + B.transpose() * next;
    if (cons.stage_dim() > 0) {
      cons.stage_jacobians(k, tr.states[k], tr.controls[k], Jx, Ju);
      gx += Jx.transpose() * nu[k];
      gu += Ju.transpose() * nu[k];
    }
    grad_u[k] = std::move(gu);
    next = std::move(gx);
  }
}

}  // namespace detail

/// Augmented-Lagrangian outer loop around iLQR for
///   min terminal(x_T) + sum_k stage(k, x_k, u_k)
///   s.t. x_{k+1} = f(x_k, u_k), g(k, x_k, u_k) <= 0, g_T(x_T) <= 0.
///
/// After each inner solve the multipliers are updated. While the violation
/// exceeds constraint_tol the penalty grows by penalty_growth whenever the
/// violation shrank by less than penalty_progress since the last outer
/// iteration. Stalling at the penalty cap is reported as infeasible. The solve
/// converges once the inner problem converged, the violation is within
/// constraint_tol and complementarity |nu g| is within constraint_tol
/// scaled by max(1, max |nu|).
inline OcpSolution al_solve(const Objective& obj, const Dynamics& dyn, const Constraints& cons,
                            const Vec& x0, std::vector<Vec> u_init, const SolverOptions& opts,
                            double dt = 1.0) {
  opts.validate();
  const int T = static_cast<int>(u_init.size());
  if (T < 1) throw DimensionError("al_solve: need at least one control");
  std::vector<Vec> nu(T, Vec::Zero(cons.stage_dim()));
  Vec nu_T = Vec::Zero(cons.terminal_dim());
  double mu = opts.penalty_initial;

  std::vector<Vec> u = std::move(u_init);
  std::vector<double> history;
  std::vector<double> outer_viol;
  int total_iterations = 0;
  bool at_cap = false;
  OcpSolution inner;
  std::vector<Vec> nu_new;
  Vec nu_T_new;
  detail::ConstraintStatus st;
  int outer = 0;
  for (; outer < opts.max_outer_iterations; ++outer) {
    const AugmentedObjective aug(obj, cons, nu, nu_T, mu);
    SolverOptions inner_opts = opts;
    if (opts.trace) {
      // Inner records carry the violation of the previous outer iterate.
      const double last = outer_viol.empty() ? 0.0 : outer_viol.back();
      inner_opts.trace = [&opts, last](const TraceRecord& r) {
        TraceRecord rec = r;
        rec.violation = last;
        opts.trace(rec);
      };
    }
    inner = ilqr_solve(aug, dyn, x0, u, inner_opts, dt, outer, mu);
    total_iterations += inner.iterations;
    history.insert(history.end(), inner.cost_history.begin(), inner.cost_history.end());
    u = inner.trajectory.controls;
    const Trajectory& tr = inner.trajectory;

    nu_new = nu;
    nu_T_new = nu_T;
    if (cons.stage_dim() > 0) {
      for (int k = 0; k < T; ++k) {
        const Vec g = cons.stage(k, tr.states[k], tr.controls[k]);
        for (int r = 0; r < g.size(); ++r)
          nu_new[k][r] = AugmentedObjective::update(g[r], nu[k][r], mu, cons.stage_kind(r));
      }
    }
    if (cons.terminal_dim() > 0) {
      const Vec g = cons.terminal(tr.states.back());
      for (int r = 0; r < g.size(); ++r)
        nu_T_new[r] = AugmentedObjective::update(g[r], nu_T[r], mu, cons.terminal_kind(r));
    }
    st = detail::constraint_status(cons, tr, nu_new, nu_T_new);
    outer_viol.push_back(st.violation);
    if (opts.trace) {
      TraceRecord rec;
      rec.outer = outer;
      rec.iteration = total_iterations;
      rec.cost = detail::objective_value(obj, tr);
      rec.violation = st.violation;
      rec.gradient = inner.gradient;
      rec.penalty = mu;
      opts.trace(rec);
    }
    const bool inner_ok = inner.converged;
    nu = nu_new;
    nu_T = nu_T_new;
    if (inner.status == SolveStatus::Diverged ||
        inner.status == SolveStatus::RegularizationFailure) {
      break;
    }
    if (inner_ok && st.violation <= opts.constraint_tol &&
        st.complementary(opts.constraint_tol)) {
      ++outer;
      break;
    }
    if (st.violation > opts.constraint_tol) {
      const double prev = outer_viol.size() >= 2 ? outer_viol[outer_viol.size() - 2]
                                                 : std::numeric_limits<double>::infinity();
      if (st.violation > opts.penalty_progress * prev) {
        if (at_cap) {
          ++outer;
          break;
        }
        mu = std::min(mu * opts.penalty_growth, opts.penalty_max);
        at_cap = mu >= opts.penalty_max;
      }
    }
  }

  OcpSolution sol;
  sol.trajectory = inner.trajectory;
  sol.iterations = total_iterations;
  sol.outer_iterations = outer;
  sol.cost = detail::objective_value(obj, sol.trajectory);
  sol.cost_history = std::move(history);
  sol.outer_violations = std::move(outer_viol);
  sol.max_violation = st.violation;
  sol.complementarity = st.complementarity;
  sol.penalty = mu;
  std::vector<Vec> grad_u;
  detail::constrained_adjoint(obj, dyn, cons, sol.trajectory, nu, nu_T, sol.xi, grad_u);
  sol.gradient = detail::max_norm(grad_u);
  sol.delta.resize(T);
  for (int k = 0; k < T; ++k) sol.delta[k] = -nu[k];
  sol.delta_terminal = -nu_T;
  sol.has_multipliers = true;

  const bool feasible = st.violation <= opts.constraint_tol;
  if (inner.converged && feasible && st.complementary(opts.constraint_tol)) {
    sol.status = SolveStatus::Converged;
  } else if (inner.status == SolveStatus::Diverged ||
             inner.status == SolveStatus::RegularizationFailure) {
    sol.status = inner.status;
    sol.message = inner.message;
  } else if (!feasible && at_cap) {
    sol.status = SolveStatus::Infeasible;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", st.violation);
    sol.message = std::string("penalty reached its cap without feasibility (violation ") + buf + ")";
  } else if (inner.status == SolveStatus::Stalled) {
    sol.status = SolveStatus::Stalled;
    sol.message = inner.message;
  } else {
    sol.status = SolveStatus::MaxIterations;
    sol.message = "outer iteration limit reached";
  }
  sol.converged = sol.status == SolveStatus::Converged;
  return sol;
}

/// Zero controls for a game (cold start).
inline std::vector<Vec> zero_controls(const Game& game) {
  return std::vector<Vec>(game.horizon, Vec::Zero(game.control_dim()));
}

/// Solves the potential problem of a certified game.
inline OcpSolution al_solve(const Game& game, const PotentialCertificate& cert,
                            std::vector<Vec> u_init, const SolverOptions& opts = {}) {
  game.validate();
  if (cert.costs_ptr() != game.costs) {
    throw CertificateMismatchError("al_solve: certificate was issued for different costs");
  }
  if (static_cast<int>(u_init.size()) != game.horizon) {
    throw DimensionError("al_solve: expected " + std::to_string(game.horizon) +
                         " initial controls, got " + std::to_string(u_init.size()));
  }
  const PotentialObjective pot(cert);
  return al_solve(pot, *game.dynamics, *game.constraints, game.x0, std::move(u_init), opts,
                  game.dt);
}

inline OcpSolution al_solve(const Game& game, const PotentialCertificate& cert,
                            const SolverOptions& opts = {}) {
  return al_solve(game, cert, zero_controls(game), opts);
}

}  // namespace wcpdg

#endif  // WCPDG_OCP_AL_HPP_
