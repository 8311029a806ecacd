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

#ifndef WCPDG_SCENARIOS_COMPONENTS_HPP_
#define WCPDG_SCENARIOS_COMPONENTS_HPP_

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "wcpdg/core/constraints.hpp"
#include "wcpdg/core/cost.hpp"
#include "wcpdg/core/dynamics.hpp"

namespace wcpdg {

/// Unicycle state (p, q, theta, v), control (omega, alpha), explicit Euler:
///   p+ = p + dt v cos(theta),  q+ = q + dt v sin(theta),
///   theta+ = theta + dt omega, v+ = v + dt alpha.
class UnicycleDynamics final : public AgentDynamics {
 public:
  explicit UnicycleDynamics(double dt) : dt_(dt) {
    if (!(dt_ > 0.0)) throw DimensionError("unicycle: dt must be positive");
  }

  int state_dim() const override { return 4; }
  int control_dim() const override { return 2; }
  std::string kind() const override { return "unicycle"; }
  double dt() const { return dt_; }

  Vec step(int, const VecRef& x, const VecRef& u) const override {
    Vec n(4);
    n[0] = x[0] + dt_ * x[3] * std::cos(x[2]);
    n[1] = x[1] + dt_ * x[3] * std::sin(x[2]);
    n[2] = x[2] + dt_ * u[0];
    n[3] = x[3] + dt_ * u[1];
    return n;
  }

  void jacobians(int, const VecRef& x, const VecRef&, Mat& A, Mat& B) const override {
    const double c = std::cos(x[2]);
    const double s = std::sin(x[2]);
    A = Mat::Identity(4, 4);
    A(0, 2) = -dt_ * x[3] * s;
    A(0, 3) = dt_ * c;
    A(1, 2) = dt_ * x[3] * c;
    A(1, 3) = dt_ * s;
    B = Mat::Zero(4, 2);
    B(2, 0) = dt_;
    B(3, 1) = dt_;
  }

 private:
  double dt_;
};

/// Heading wrapped to (-pi, pi], for reporting.
inline double wrap_angle(double a) {
  const double two_pi = 2.0 * std::numbers::pi;
  double r = std::fmod(a + std::numbers::pi, two_pi);
  if (r <= 0.0) r += two_pi;
  return r - std::numbers::pi;
}

/// 1/2 (x - x_f)' Q (x - x_f) + 1/2 u' C u per stage and
/// 1/2 (x_T - x_f)' Q_f (x_T - x_f) at the end.
class QuadraticTrackingCost final : public OwnCost {
 public:
  QuadraticTrackingCost(Vec goal, Mat Q, Mat C, Mat Qf)
      : goal_(std::move(goal)), Q_(std::move(Q)), C_(std::move(C)), Qf_(std::move(Qf)) {
    const auto n = goal_.size();
    if (Q_.rows() != n || Q_.cols() != n || Qf_.rows() != n || Qf_.cols() != n ||
        C_.rows() != C_.cols()) {
      throw DimensionError("tracking cost: weight shapes do not match the goal");
    }
  }

  std::string kind() const override { return "tracking"; }
  const Vec& goal() const { return goal_; }
  const Mat& Q() const { return Q_; }
  const Mat& C() const { return C_; }
  const Mat& Qf() const { return Qf_; }

  double stage(int, const VecRef& x, const VecRef& u) const override {
    const Vec e = x - goal_;
    return 0.5 * e.dot(Q_ * e) + 0.5 * u.dot(C_ * u);
  }
  double terminal(const VecRef& x) const override {
    const Vec e = x - goal_;
    return 0.5 * e.dot(Qf_ * e);
  }
  QuadraticModel stage_quadratic(int k, const VecRef& x, const VecRef& u) const override {
    QuadraticModel q;
    q.value = stage(k, x, u);
    q.gx = 0.5 * (Q_ + Q_.transpose()) * (x - goal_);
    q.gu = 0.5 * (C_ + C_.transpose()) * u;
    q.Hxx = 0.5 * (Q_ + Q_.transpose());
    q.Huu = 0.5 * (C_ + C_.transpose());
    q.Hux = Mat::Zero(u.size(), x.size());
    return q;
  }
  QuadraticModel terminal_quadratic(const VecRef& x) const override {
    QuadraticModel q;
    q.value = terminal(x);
    q.gx = 0.5 * (Qf_ + Qf_.transpose()) * (x - goal_);
    q.Hxx = 0.5 * (Qf_ + Qf_.transpose());
    q.gu = Vec(0);
    q.Huu = Mat(0, 0);
    q.Hux = Mat(0, x.size());
    return q;
  }

 private:
  Vec goal_;
  Mat Q_;
  Mat C_;
  Mat Qf_;
};

namespace detail {

/// Planar distance between the first two state components of a and b, and
/// the unit direction from b to a (zero when the points coincide).
inline double planar_distance(const VecRef& a, const VecRef& b, Eigen::Vector2d& e) {
  const Eigen::Vector2d d(a[0] - b[0], a[1] - b[1]);
  const double n = d.norm();
  e = n > 1e-12 ? Eigen::Vector2d(d / n) : Eigen::Vector2d::Zero();
  return n;
}

}  // namespace detail

/// Soft proximity penalty (d - d_m)^2 for d < d_m, 0 otherwise, with d the
/// planar distance between the agents. The backward pass gets the
/// Gauss-Newton Hessian 2 grad(d) grad(d)'.
class ProximityKernel final : public PairKernel {
 public:
  explicit ProximityKernel(double d_m) : d_m_(d_m) {
    if (!(d_m_ > 0.0)) throw DimensionError("proximity: d_m must be positive");
  }

  std::string kind() const override { return "proximity"; }
  double threshold() const { return d_m_; }

  static double value(double d, double d_m) { return d < d_m ? (d - d_m) * (d - d_m) : 0.0; }

  double stage(int, const VecRef& a, const VecRef& b) const override { return eval(a, b); }
  double terminal(const VecRef& a, const VecRef& b) const override { return eval(a, b); }
  QuadraticModel stage_quadratic(int, const VecRef& a, const VecRef& b) const override {
    return model(a, b);
  }
  QuadraticModel terminal_quadratic(const VecRef& a, const VecRef& b) const override {
    return model(a, b);
  }

 private:
  double eval(const VecRef& a, const VecRef& b) const {
    Eigen::Vector2d e;
    return value(detail::planar_distance(a, b, e), d_m_);
  }

  QuadraticModel model(const VecRef& a, const VecRef& b) const {
    const int na = static_cast<int>(a.size());
    const int nb = static_cast<int>(b.size());
    QuadraticModel q = QuadraticModel::zero(na, nb);
    Eigen::Vector2d e;
    const double d = detail::planar_distance(a, b, e);
    if (d >= d_m_) return q;
    const double s = d - d_m_;
    q.value = s * s;
    q.gx.head<2>() = 2.0 * s * e;
    q.gu.head<2>() = -2.0 * s * e;
    const Eigen::Matrix2d ee = 2.0 * e * e.transpose();
    q.Hxx.topLeftCorner<2, 2>() = ee;
    q.Huu.topLeftCorner<2, 2>() = ee;
    q.Hux.topLeftCorner<2, 2>() = -ee;
    return q;
  }

  double d_m_;
};

/// Bilinear coupling a' M b between two agents' states.
class QuadraticCouplingKernel final : public PairKernel {
 public:
  explicit QuadraticCouplingKernel(Mat M) : M_(std::move(M)) {}

  std::string kind() const override { return "quadratic"; }
  const Mat& matrix() const { return M_; }

  double stage(int, const VecRef& a, const VecRef& b) const override { return a.dot(M_ * b); }
  double terminal(const VecRef& a, const VecRef& b) const override { return a.dot(M_ * b); }
  QuadraticModel stage_quadratic(int, const VecRef& a, const VecRef& b) const override {
    return model(a, b);
  }
  QuadraticModel terminal_quadratic(const VecRef& a, const VecRef& b) const override {
    return model(a, b);
  }

 private:
  QuadraticModel model(const VecRef& a, const VecRef& b) const {
    QuadraticModel q = QuadraticModel::zero(static_cast<int>(a.size()), static_cast<int>(b.size()));
    q.value = a.dot(M_ * b);
    q.gx = M_ * b;
    q.gu = M_.transpose() * a;
    q.Hux = M_.transpose();
    return q;
  }

  Mat M_;
};

/// Minimum separation d_collision - d(x^i, x^j) <= 0 on stages and at x_T.
class CollisionConstraint final : public ConstraintTerm {
 public:
  CollisionConstraint(int i, int j, double d_collision, const BlockLayout& states)
      : i_(i), j_(j), d_(d_collision), xl_(states) {
    if (!(d_ > 0.0)) throw DimensionError("collision: d_collision must be positive");
    if (i_ == j_) throw DimensionError("collision: needs two distinct agents");
  }

  std::string kind() const override { return "collision"; }
  int dim() const override { return 1; }
  bool on_terminal() const override { return true; }
  bool involves(int agent) const override { return agent == i_ || agent == j_; }
  std::pair<int, int> agents() const { return {i_, j_}; }
  double threshold() const { return d_; }

  static double value(double d, double d_collision) { return -d + d_collision; }

  Vec eval(int, const VecRef& x, const VecRef&) const override {
    Eigen::Vector2d e;
    Vec g(1);
    g[0] = value(detail::planar_distance(xl_.block(x, i_), xl_.block(x, j_), e), d_);
    return g;
  }
  void jacobians(int, const VecRef& x, const VecRef& u, Mat& Jx, Mat& Ju) const override {
    Eigen::Vector2d e;
    detail::planar_distance(xl_.block(x, i_), xl_.block(x, j_), e);
    Jx = Mat::Zero(1, x.size());
    Jx.block<1, 2>(0, xl_.offset(i_)) = -e.transpose();
    Jx.block<1, 2>(0, xl_.offset(j_)) = e.transpose();
    Ju = Mat::Zero(1, u.size());
  }

 private:
  int i_;
  int j_;
  double d_;
  BlockLayout xl_;
};

/// |u^i| - u_bound elementwise on agent i's controls.
class ControlBound final : public ConstraintTerm {
 public:
  ControlBound(int agent, Vec bound, const BlockLayout& controls)
      : agent_(agent), bound_(std::move(bound)), ul_(controls) {
    if (bound_.size() != ul_.size(agent_)) throw DimensionError("control bound: size mismatch");
    if (!(bound_.array() > 0.0).all()) throw DimensionError("control bound: bounds must be positive");
  }

  std::string kind() const override { return "control_bound"; }
  int dim() const override { return static_cast<int>(bound_.size()); }
  bool involves(int agent) const override { return agent == agent_; }
  int agent() const { return agent_; }
  const Vec& bound() const { return bound_; }

  Vec eval(int, const VecRef&, const VecRef& u) const override {
    return ul_.block(u, agent_).cwiseAbs() - bound_;
  }
  void jacobians(int, const VecRef& x, const VecRef& u, Mat& Jx, Mat& Ju) const override {
    Jx = Mat::Zero(dim(), x.size());
    Ju = Mat::Zero(dim(), u.size());
    for (int r = 0; r < dim(); ++r) {
      const double v = u[ul_.offset(agent_) + r];
      Ju(r, ul_.offset(agent_) + r) = v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0);
    }
  }
  void project_controls(Vec& u) const override {
    auto blk = ul_.block(u, agent_);
    blk = blk.cwiseMax(-bound_).cwiseMin(bound_);
  }

 private:
  int agent_;
  Vec bound_;
  BlockLayout ul_;
};

/// d(x^i, x^j) - length == 0, e.g. two agents carrying a rigid link.
class EqualityLink final : public ConstraintTerm {
 public:
  EqualityLink(int i, int j, double length, const BlockLayout& states)
      : i_(i), j_(j), length_(length), xl_(states) {
    if (!(length_ > 0.0)) throw DimensionError("equality link: length must be positive");
  }

  std::string kind() const override { return "equality_link"; }
  int dim() const override { return 1; }
  ConstraintKind type() const override { return ConstraintKind::Equality; }
  bool on_terminal() const override { return true; }
  bool involves(int agent) const override { return agent == i_ || agent == j_; }

  Vec eval(int, const VecRef& x, const VecRef&) const override {
    Eigen::Vector2d e;
    Vec g(1);
    g[0] = detail::planar_distance(xl_.block(x, i_), xl_.block(x, j_), e) - length_;
    return g;
  }
  void jacobians(int, const VecRef& x, const VecRef& u, Mat& Jx, Mat& Ju) const override {
    Eigen::Vector2d e;
    detail::planar_distance(xl_.block(x, i_), xl_.block(x, j_), e);
    Jx = Mat::Zero(1, x.size());
    Jx.block<1, 2>(0, xl_.offset(i_)) = e.transpose();
    Jx.block<1, 2>(0, xl_.offset(j_)) = -e.transpose();
    Ju = Mat::Zero(1, u.size());
  }

 private:
  int i_;
  int j_;
  double length_;
  BlockLayout xl_;
};

}  // namespace wcpdg

#endif  // WCPDG_SCENARIOS_COMPONENTS_HPP_
