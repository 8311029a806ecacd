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

#ifndef WCPDG_LQ_SOLVERS_HPP_
#define WCPDG_LQ_SOLVERS_HPP_

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <string>
#include <vector>

#include "wcpdg/lq/model.hpp"

namespace wcpdg {

struct LqrSolution {
  Trajectory trajectory;
  std::vector<Mat> K;  // u_k = K_k x_k + d_k
  std::vector<Vec> d;
  std::vector<Mat> P;  // value V_k(x) = 1/2 x' P_k x + p_k' x + s_k, k = 0..T
  std::vector<Vec> p;
  std::vector<double> s;

  /// Optimal cost from the recursion, V_0(x_0).
  double value() const {
    const Vec& x0 = trajectory.states[0];
    return 0.5 * x0.dot(P[0] * x0) + p[0].dot(x0) + s[0];
  }
};

/// Backward Riccati recursion for the quadratic potential, then a forward
/// rollout. Throws ConditioningError when R_k + B_k' P_{k+1} B_k is not
/// positive definite.
inline LqrSolution lqr_solve(const LqPotential& pot, const std::vector<Mat>& A,
                             const std::vector<Mat>& B, const Vec& x0) {
  const int T = pot.horizon;
  const int n = static_cast<int>(x0.size());
  if (static_cast<int>(A.size()) < T || static_cast<int>(B.size()) < T) {
    throw DimensionError("lqr: need A_k, B_k for k = 0..T-1");
  }
  const int m = static_cast<int>(B[0].cols());
  pot.validate(n, m);

  LqrSolution sol;
  sol.K.resize(T);
  sol.d.resize(T);
  sol.P.resize(T + 1);
  sol.p.resize(T + 1);
  sol.s.assign(T + 1, 0.0);
  sol.P[T] = pot.Q[T];
  sol.p[T] = pot.linear_state(T, n);
  for (int k = T - 1; k >= 0; --k) {
    const Mat& Pn = sol.P[k + 1];
    const Vec& pn = sol.p[k + 1];
    const Mat Quu = pot.R[k] + B[k].transpose() * Pn * B[k];
    const Mat Qux = B[k].transpose() * Pn * A[k];
    const Vec qu = pot.linear_control(k, m) + B[k].transpose() * pn;
    Eigen::LLT<Mat> llt(Quu);
    if (llt.info() != Eigen::Success) {
      throw ConditioningError("lqr: R + B'PB is not positive definite at k = " +
                              std::to_string(k));
    }
    sol.K[k] = -llt.solve(Qux);
    sol.d[k] = -llt.solve(qu);
    const Mat Qk = k > 0 ? pot.Q[k] : Mat::Zero(n, n);
    const Vec qk = k > 0 ? pot.linear_state(k, n) : Vec::Zero(n);
    Mat P = Qk + A[k].transpose() * Pn * A[k] + Qux.transpose() * sol.K[k];
    sol.P[k] = 0.5 * (P + P.transpose());
    sol.p[k] = qk + A[k].transpose() * pn + Qux.transpose() * sol.d[k];
    sol.s[k] = sol.s[k + 1] + 0.5 * qu.dot(sol.d[k]);
  }
  Trajectory& tr = sol.trajectory;
  tr.states.push_back(x0);
  for (int k = 0; k < T; ++k) {
    const Vec u = sol.K[k] * tr.states[k] + sol.d[k];
    tr.controls.push_back(u);
    tr.states.push_back(A[k] * tr.states[k] + B[k] * u);
  }
  return sol;
}

inline LqrSolution lqr_solve(const LqPotential& pot, const LqGame& game) {
  return lqr_solve(pot, game.A, game.B, game.x0);
}

/// Selects which players optimize in the stacked first-order system. An
/// inactive player's controls are pinned to the matching blocks of
/// `fixed_controls`, which turns the solve into a best response.
struct NashOptions {
  std::vector<bool> active;         // empty = every player active
  std::vector<Vec> fixed_controls;  // joint controls, k = 0..T-1
};

struct LqNashSolution {
  Trajectory trajectory;
  /// costates[i][k] for k = 1..T (index 0 unused) of active player i; the
  /// Lagrangian is J^i + sum_k costates[i][k+1]' (A_k x_k + B_k u_k - x_{k+1}).
  std::vector<std::vector<Vec>> costates;
  /// Infinity norm of the stacked residual K z - b.
  double kkt_residual = 0.0;
};

/// Exact open-loop Nash trajectory of an LQ game: every active player's
/// control stationarity, costate recursion, and the dynamics, assembled into
/// one sparse linear system and solved by LU.
inline LqNashSolution open_loop_nash(const LqGame& game, const NashOptions& opts = {}) {
  game.validate();
  const int N = game.players();
  const int n = game.state_dim();
  const int m = game.control_dim();
  const int T = game.horizon;
  const BlockLayout ul = game.control_layout();
  std::vector<bool> active = opts.active.empty() ? std::vector<bool>(N, true) : opts.active;
  if (static_cast<int>(active.size()) != N) throw DimensionError("nash: active mask size");
  std::vector<int> slot(N, -1);
  int P = 0;
  for (int i = 0; i < N; ++i)
    if (active[i]) slot[i] = P++;
  if (P < N && static_cast<int>(opts.fixed_controls.size()) != T) {
    throw DimensionError("nash: inactive players need fixed controls for k = 0..T-1");
  }

  const int nx = T * n;
  const int nu = T * m;
  const int dim = nx + nu + P * T * n;
  auto xi = [&](int k) { return (k - 1) * n; };  // x_k, k = 1..T
  auto ui = [&](int k) { return nx + k * m; };
  auto li = [&](int p, int k) { return nx + nu + (p * T + (k - 1)) * n; };  // lambda_k, k = 1..T

  std::vector<Eigen::Triplet<double>> trip;
  Vec b = Vec::Zero(dim);
  auto add = [&](int row, int col, const Mat& M, double sign = 1.0) {
    for (int r = 0; r < M.rows(); ++r)
      for (int c = 0; c < M.cols(); ++c)
        if (M(r, c) != 0.0) trip.emplace_back(row + r, col + c, sign * M(r, c));
  };
  const Mat I = Mat::Identity(n, n);

  // Dynamics rows: x_{k+1} - A_k x_k - B_k u_k = 0.
  for (int k = 0; k < T; ++k) {
    const int row = xi(k + 1);
    add(row, xi(k + 1), I);
    if (k > 0) add(row, xi(k), game.A[k], -1.0);
    add(row, ui(k), game.B[k], -1.0);
    if (k == 0) b.segment(row, n) = game.A[0] * game.x0;
  }
  // Control rows.
  for (int k = 0; k < T; ++k) {
    for (int i = 0; i < N; ++i) {
      const int row = ui(k) + ul.offset(i);
      const int mi = ul.size(i);
      if (!active[i]) {
        add(row, row, Mat::Identity(mi, mi));
        b.segment(row, mi) = ul.block(opts.fixed_controls[k], i);
        continue;
      }
      add(row, row, game.R[i][i][k]);
      add(row, li(slot[i], k + 1), game.B[k].middleCols(ul.offset(i), mi).transpose());
      b.segment(row, mi) = -game.linear_control(i, k);
    }
  }
  // Costate rows: Q^i_k x_k + A_k' lambda_{k+1} - lambda_k = -q^i_k, and
  // Q^i_T x_T - lambda_T = -q^i_T.
  for (int i = 0; i < N; ++i) {
    if (!active[i]) continue;
    const int p = slot[i];
    for (int k = 1; k <= T; ++k) {
      const int row = li(p, k);
      add(row, xi(k), game.Q[i][k]);
      add(row, li(p, k), I, -1.0);
      if (k < T) add(row, li(p, k + 1), game.A[k].transpose());
      b.segment(row, n) = -game.linear_state(i, k);
    }
  }

  Eigen::SparseMatrix<double> K(dim, dim);
  K.setFromTriplets(trip.begin(), trip.end());
  K.makeCompressed();
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.analyzePattern(K);
  lu.factorize(K);
  if (lu.info() != Eigen::Success) {
    throw NoUniqueEquilibriumError("open-loop Nash: stacked first-order system is singular (" +
                                   lu.lastErrorMessage() + ")");
  }
  const Vec z = lu.solve(b);
  if (lu.info() != Eigen::Success || !z.allFinite()) {
    throw NoUniqueEquilibriumError("open-loop Nash: stacked solve failed");
  }
  LqNashSolution sol;
  sol.kkt_residual = max_abs(Vec(K * z - b));
  if (sol.kkt_residual > 1e-6 * (1.0 + max_abs(b))) {
    throw NoUniqueEquilibriumError("open-loop Nash: stacked system is numerically singular "
                                   "(residual " + std::to_string(sol.kkt_residual) + ")");
  }
  Trajectory& tr = sol.trajectory;
  tr.states.push_back(game.x0);
  for (int k = 0; k < T; ++k) {
    tr.controls.push_back(z.segment(ui(k), m));
    tr.states.push_back(z.segment(xi(k + 1), n));
  }
  sol.costates.assign(N, {});
  for (int i = 0; i < N; ++i) {
    if (!active[i]) continue;
    sol.costates[i].assign(T + 1, Vec::Zero(n));
    for (int k = 1; k <= T; ++k) sol.costates[i][k] = z.segment(li(slot[i], k), n);
  }
  return sol;
}

/// Open-loop Nash trajectory of an LQ game.
inline Trajectory open_loop_nash_exact(const LqGame& game) {
  return open_loop_nash(game).trajectory;
}

/// Player i's best response with every other player's controls frozen.
inline Trajectory lq_best_response(const LqGame& game, int player,
                                   const std::vector<Vec>& controls) {
  NashOptions opts;
  opts.active.assign(game.players(), false);
  opts.active.at(player) = true;
  opts.fixed_controls = controls;
  return open_loop_nash(game, opts).trajectory;
}

}  // namespace wcpdg

#endif  // WCPDG_LQ_SOLVERS_HPP_
