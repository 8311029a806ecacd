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

#ifndef WCPDG_LQ_MODEL_HPP_
#define WCPDG_LQ_MODEL_HPP_

#include <Eigen/Eigenvalues>

#include <string>
#include <vector>

#include "wcpdg/core/types.hpp"

namespace wcpdg {

namespace detail {

inline void check_symmetric_floor(const Mat& M, double floor, const std::string& what) {
  if (M.rows() != M.cols()) throw DimensionError(what + " must be square");
  if (!M.allFinite()) throw DimensionError(what + " must be finite");
  if ((M - M.transpose()).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + M.cwiseAbs().maxCoeff())) {
    throw ConditioningError(what + " must be symmetric");
  }
  if (M.rows() == 0) return;
  const double lmin = Eigen::SelfAdjointEigenSolver<Mat>(M, Eigen::EigenvaluesOnly).eigenvalues()[0];
  if (lmin < floor) {
    throw ConditioningError(what + " has smallest eigenvalue " + std::to_string(lmin) +
                            " below " + std::to_string(floor));
  }
}

}  // namespace detail

/// Linear-quadratic game
///   x_{k+1} = A_k x_k + B_k u_k,
///   L^i_0 = 1/2 sum_j u^j' R^{ij}_0 u^j,
///   L^i_k = 1/2 (x_k' Q^i_k x_k + sum_j u^j' R^{ij}_k u^j)   (0 < k < T),
///   L^i_T = 1/2 x_T' Q^i_T x_T,
/// plus optional linear terms q^i_k' x_k (k >= 1) and r^i_k' u^i_k.
struct LqGame {
  Vec x0;
  int horizon = 1;
  std::vector<int> control_sizes;
  std::vector<Mat> A;                           // k = 0..T-1
  std::vector<Mat> B;                           // k = 0..T-1
  std::vector<std::vector<Mat>> Q;              // [i][k], k = 0..T; k = 0 unused
  std::vector<std::vector<std::vector<Mat>>> R;  // [i][j][k], k = 0..T-1; empty = 0
  std::vector<std::vector<Vec>> q;              // [i][k], k = 0..T; optional
  std::vector<std::vector<Vec>> r;              // [i][k], k = 0..T-1; optional

  int players() const { return static_cast<int>(control_sizes.size()); }
  int state_dim() const { return static_cast<int>(x0.size()); }
  BlockLayout control_layout() const { return BlockLayout(control_sizes); }
  int control_dim() const { return control_layout().total(); }

  bool has_linear_terms() const { return !q.empty() || !r.empty(); }

  void validate() const {
    const int N = players();
    const int n = state_dim();
    const int m = control_dim();
    const int T = horizon;
    if (N < 1) throw DimensionError("lq game: need at least one player");
    if (T < 1) throw DimensionError("lq game: horizon must be >= 1");
    if (static_cast<int>(A.size()) != T || static_cast<int>(B.size()) != T) {
      throw DimensionError("lq game: need A_k, B_k for k = 0..T-1");
    }
    for (int k = 0; k < T; ++k) {
      if (A[k].rows() != n || A[k].cols() != n) throw DimensionError("lq game: A_k shape");
      if (B[k].rows() != n || B[k].cols() != m) throw DimensionError("lq game: B_k shape");
    }
    if (static_cast<int>(Q.size()) != N || static_cast<int>(R.size()) != N) {
      throw DimensionError("lq game: Q and R need one entry per player");
    }
    const BlockLayout ul = control_layout();
    for (int i = 0; i < N; ++i) {
      if (static_cast<int>(Q[i].size()) != T + 1) throw DimensionError("lq game: Q^i_k for k = 0..T");
      for (int k = 1; k <= T; ++k) {
        detail::check_symmetric_floor(Q[i][k], -1e-10,
                                      "Q^" + std::to_string(i) + "_" + std::to_string(k));
        if (Q[i][k].rows() != n) throw DimensionError("lq game: Q^i_k shape");
      }
      if (static_cast<int>(R[i].size()) != N) throw DimensionError("lq game: R^{ij} for every j");
      for (int j = 0; j < N; ++j) {
        if (static_cast<int>(R[i][j].size()) != T) throw DimensionError("lq game: R^{ij}_k for k < T");
        for (int k = 0; k < T; ++k) {
          const Mat& Rk = R[i][j][k];
          if (i == j) {
            if (Rk.rows() != ul.size(i)) throw DimensionError("lq game: R^{ii}_k shape");
            detail::check_symmetric_floor(Rk, 1e-10,
                                          "R^{" + std::to_string(i) + std::to_string(i) + "}_" +
                                              std::to_string(k));
          } else if (Rk.size() != 0 && (Rk.rows() != ul.size(j) || Rk.cols() != ul.size(j))) {
            throw DimensionError("lq game: R^{ij}_k shape");
          }
        }
      }
    }
    if (!q.empty()) {
      if (static_cast<int>(q.size()) != N) throw DimensionError("lq game: q needs one entry per player");
      for (const auto& qi : q) {
        if (static_cast<int>(qi.size()) != T + 1) throw DimensionError("lq game: q^i_k for k = 0..T");
        for (const auto& v : qi)
          if (v.size() != n) throw DimensionError("lq game: q^i_k shape");
      }
    }
    if (!r.empty()) {
      if (static_cast<int>(r.size()) != N) throw DimensionError("lq game: r needs one entry per player");
      for (int i = 0; i < N; ++i) {
        if (static_cast<int>(r[i].size()) != T) throw DimensionError("lq game: r^i_k for k < T");
        for (const auto& v : r[i])
          if (v.size() != ul.size(i)) throw DimensionError("lq game: r^i_k shape");
      }
    }
  }

  Vec linear_state(int i, int k) const { return q.empty() ? Vec::Zero(state_dim()) : q[i][k]; }
  Vec linear_control(int i, int k) const {
    return r.empty() ? Vec::Zero(control_sizes[i]) : r[i][k];
  }

  /// J^i along a trajectory, with the k = 0 / k = T case split.
  double agent_cost(int i, const Trajectory& traj) const {
    const BlockLayout ul = control_layout();
    const int T = horizon;
    double J = 0.0;
    for (int k = 0; k < T; ++k) {
      const Vec& x = traj.states[k];
      const Vec& u = traj.controls[k];
      if (k > 0) J += 0.5 * x.dot(Q[i][k] * x) + linear_state(i, k).dot(x);
      for (int j = 0; j < players(); ++j) {
        const Mat& Rk = R[i][j][k];
        if (Rk.size() == 0) continue;
        const Vec uj = ul.block(u, j);
        J += 0.5 * uj.dot(Rk * uj);
      }
      J += linear_control(i, k).dot(ul.block(u, i));
    }
    const Vec& xT = traj.states[T];
    J += 0.5 * xT.dot(Q[i][T] * xT) + linear_state(i, T).dot(xT);
    return J;
  }

  /// Game with A, B, Q^i and R^{ij} held constant over k.
  static LqGame time_invariant(const Mat& A, const Mat& B, const std::vector<Mat>& Qi,
                               const std::vector<std::vector<Mat>>& Rij,
                               std::vector<int> control_sizes, const Vec& x0, int T) {
    LqGame g;
    g.x0 = x0;
    g.horizon = T;
    g.control_sizes = std::move(control_sizes);
    g.A.assign(T, A);
    g.B.assign(T, B);
    const int N = static_cast<int>(Qi.size());
    g.Q.assign(N, std::vector<Mat>(T + 1));
    g.R.assign(N, std::vector<std::vector<Mat>>(N));
    for (int i = 0; i < N; ++i) {
      for (int k = 1; k <= T; ++k) g.Q[i][k] = Qi[i];
      g.Q[i][0] = Mat::Zero(A.rows(), A.rows());
      for (int j = 0; j < N; ++j) g.R[i][j].assign(T, Rij.at(i).at(j));
    }
    return g;
  }
};

/// Single-objective quadratic problem with the same k = 0 / k = T split:
///   1/2 sum_{k<T} u_k' R_k u_k + 1/2 sum_{k=1}^{T} x_k' Q_k x_k
/// plus optional q_k' x_k and r_k' u_k.
struct LqPotential {
  int horizon = 1;
  std::vector<Mat> Q;  // k = 0..T; k = 0 unused
  std::vector<Mat> R;  // k = 0..T-1
  std::vector<Vec> q;  // k = 0..T; optional
  std::vector<Vec> r;  // k = 0..T-1; optional

  void validate(int n, int m) const {
    const int T = horizon;
    if (T < 1) throw DimensionError("lq potential: horizon must be >= 1");
    if (static_cast<int>(Q.size()) != T + 1 || static_cast<int>(R.size()) != T) {
      throw DimensionError("lq potential: need Q_k (k = 0..T) and R_k (k < T)");
    }
    for (int k = 1; k <= T; ++k) {
      if (Q[k].rows() != n) throw DimensionError("lq potential: Q_k shape");
      detail::check_symmetric_floor(Q[k], -1e-10, "Q_" + std::to_string(k));
    }
    for (int k = 0; k < T; ++k) {
      if (R[k].rows() != m) throw DimensionError("lq potential: R_k shape");
      detail::check_symmetric_floor(R[k], 1e-10, "R_" + std::to_string(k));
    }
    if (!q.empty() && static_cast<int>(q.size()) != T + 1) throw DimensionError("lq potential: q_k");
    if (!r.empty() && static_cast<int>(r.size()) != T) throw DimensionError("lq potential: r_k");
  }

  Vec linear_state(int k, int n) const { return q.empty() ? Vec::Zero(n) : q[k]; }
  Vec linear_control(int k, int m) const { return r.empty() ? Vec::Zero(m) : r[k]; }

  double cost(const Trajectory& traj) const {
    const int n = static_cast<int>(traj.states[0].size());
    const int m = static_cast<int>(traj.controls[0].size());
    double J = 0.0;
    for (int k = 0; k < horizon; ++k) {
      const Vec& x = traj.states[k];
      const Vec& u = traj.controls[k];
      if (k > 0) J += 0.5 * x.dot(Q[k] * x) + linear_state(k, n).dot(x);
      J += 0.5 * u.dot(R[k] * u) + linear_control(k, m).dot(u);
    }
    const Vec& xT = traj.states[horizon];
    return J + 0.5 * xT.dot(Q[horizon] * xT) + linear_state(horizon, n).dot(xT);
  }

  static LqPotential time_invariant(const Mat& Qm, const Mat& Rm, int T) {
    LqPotential p;
    p.horizon = T;
    p.Q.assign(T + 1, Qm);
    p.Q[0] = Mat::Zero(Qm.rows(), Qm.cols());
    p.R.assign(T, Rm);
    return p;
  }
};

namespace example_lq {

inline Mat A() {
  Mat a(4, 4);
  a << 0, 1, 0, 0,
      -1, -1, 0, 0,
       0, 0, 0, 1,
       0, 0, -1, -1;
  return a;
}

inline Mat B() {
  Mat b(4, 2);
  b << 0, 0,
       1, 0,
       0, 0,
       0, 1;
  return b;
}

inline Mat Q1() {
  Mat q(4, 4);
  q << 1, -1, 2, 0,
      -1, 5, -1, 1,
       2, -1, 6, -2,
       0, 1, -2, 4;
  return q;
}

inline Mat Q2() {
  Mat q(4, 4);
  q << 1, -1, 2, 0,
      -1, 4, -1, 1,
       2, -1, 6, 0,
       0, 1, 0, 2;
  return q;
}

/// Potential state weight: agent 1's rows from Q^1, agent 2's rows from Q^2.
inline Mat Q() {
  Mat q(4, 4);
  q << 1, -1, 2, 0,
      -1, 5, -1, 1,
       2, -1, 6, 0,
       0, 1, 0, 2;
  return q;
}

inline Mat R() { return Eigen::Vector2d(3.0, 2.0).asDiagonal(); }

inline Vec x0() { return Eigen::Vector4d(3.0, 2.0, 4.0, 5.0); }

/// Horizon used when none is given.
inline constexpr int kDefaultHorizon = 20;

/// Two-player game with R^{11} = 3, R^{22} = 2 and zero cross control weights.
inline LqGame game(int T = kDefaultHorizon) {
  const Mat z = Mat::Zero(1, 1);
  std::vector<std::vector<Mat>> Rij = {{Mat::Constant(1, 1, 3.0), z},
                                       {z, Mat::Constant(1, 1, 2.0)}};
  return LqGame::time_invariant(A(), B(), {Q1(), Q2()}, Rij, {1, 1}, x0(), T);
}

inline LqPotential potential(int T = kDefaultHorizon) {
  return LqPotential::time_invariant(Q(), R(), T);
}

}  // namespace example_lq

}  // namespace wcpdg

#endif  // WCPDG_LQ_MODEL_HPP_
