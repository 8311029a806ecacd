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

#ifndef WCPDG_CORE_DYNAMICS_HPP_
#define WCPDG_CORE_DYNAMICS_HPP_

#include <memory>
#include <string>
#include <vector>

#include "wcpdg/core/finite_difference.hpp"
#include "wcpdg/core/types.hpp"

namespace wcpdg {

/// Discrete-time map x_{k+1} = f_k(x_k, u_k).
///
/// The time index is threaded through every call so time-varying models fit
/// the same interface; all shipped models ignore it.
class Dynamics {
 public:
  virtual ~Dynamics() = default;

  virtual int state_dim() const = 0;
  virtual int control_dim() const = 0;
  virtual Vec step(int k, const VecRef& x, const VecRef& u) const = 0;

  /// df/dx (n x n) and df/du (n x m). Falls back to central differences.
  virtual void jacobians(int k, const VecRef& x, const VecRef& u, Mat& A,
                         Mat& B) const {
    const Vec xv = x;
    const Vec uv = u;
    const int n = state_dim();
    A = fd::jacobian([&](const Vec& xp) { return step(k, xp, uv); }, xv, n);
    B = fd::jacobian([&](const Vec& up) { return step(k, xv, up); }, uv, n);
  }
};

/// Single-agent step map f^i(x^i, u^i).
class AgentDynamics : public Dynamics {
 public:
  virtual std::string kind() const = 0;
};

class LinearDynamics final : public AgentDynamics {
 public:
  LinearDynamics(Mat A, Mat B) : A_(std::move(A)), B_(std::move(B)) {
    if (A_.rows() != A_.cols() || B_.rows() != A_.rows()) {
      throw DimensionError("linear dynamics: A must be n x n and B n x m");
    }
  }

  int state_dim() const override { return static_cast<int>(A_.rows()); }
  int control_dim() const override { return static_cast<int>(B_.cols()); }
  std::string kind() const override { return "linear"; }

  Vec step(int, const VecRef& x, const VecRef& u) const override {
    return A_ * x + B_ * u;
  }
  void jacobians(int, const VecRef&, const VecRef&, Mat& A,
                 Mat& B) const override {
    A = A_;
    B = B_;
  }

  const Mat& A() const { return A_; }
  const Mat& B() const { return B_; }

 private:
  Mat A_;
  Mat B_;
};

/// Block-separable joint dynamics: agent i's next state depends only on
/// (x^i, u^i). Joint vectors are contiguous with per-agent offsets.
class DynamicsModel final : public Dynamics {
 public:
  explicit DynamicsModel(std::vector<std::shared_ptr<const AgentDynamics>> agents)
      : agents_(std::move(agents)) {
    if (agents_.empty()) throw DimensionError("dynamics: need at least one agent");
    std::vector<int> ns;
    std::vector<int> ms;
    for (const auto& a : agents_) {
      if (!a) throw DimensionError("dynamics: null agent model");
      ns.push_back(a->state_dim());
      ms.push_back(a->control_dim());
    }
    states_ = BlockLayout(ns);
    controls_ = BlockLayout(ms);
  }

  int agents() const { return static_cast<int>(agents_.size()); }
  const AgentDynamics& agent(int i) const { return *agents_.at(i); }
  std::shared_ptr<const AgentDynamics> agent_ptr(int i) const {
    return agents_.at(i);
  }
  const BlockLayout& state_layout() const { return states_; }
  const BlockLayout& control_layout() const { return controls_; }

  int state_dim() const override { return states_.total(); }
  int control_dim() const override { return controls_.total(); }

  Vec step(int k, const VecRef& x, const VecRef& u) const override {
    check_dims(x, u);
    Vec next(states_.total());
    for (int i = 0; i < agents(); ++i) {
      next.segment(states_.offset(i), states_.size(i)) = agents_[i]->step(
          k, x.segment(states_.offset(i), states_.size(i)),
          u.segment(controls_.offset(i), controls_.size(i)));
    }
    return next;
  }

  void jacobians(int k, const VecRef& x, const VecRef& u, Mat& A,
                 Mat& B) const override {
    check_dims(x, u);
    A = Mat::Zero(states_.total(), states_.total());
    B = Mat::Zero(states_.total(), controls_.total());
    Mat Ai;
    Mat Bi;
    for (int i = 0; i < agents(); ++i) {
      agents_[i]->jacobians(k, x.segment(states_.offset(i), states_.size(i)),
                            u.segment(controls_.offset(i), controls_.size(i)),
                            Ai, Bi);
      A.block(states_.offset(i), states_.offset(i), states_.size(i),
              states_.size(i)) = Ai;
      B.block(states_.offset(i), controls_.offset(i), states_.size(i),
              controls_.size(i)) = Bi;
    }
  }

 private:
  void check_dims(const VecRef& x, const VecRef& u) const {
    if (x.size() != states_.total()) {
      throw DimensionError("dynamics: joint state has dimension " +
                           std::to_string(x.size()) + ", expected " +
                           std::to_string(states_.total()));
    }
    if (u.size() != controls_.total()) {
      throw DimensionError("dynamics: joint control has dimension " +
                           std::to_string(u.size()) + ", expected " +
                           std::to_string(controls_.total()));
    }
  }

  std::vector<std::shared_ptr<const AgentDynamics>> agents_;
  BlockLayout states_;
  BlockLayout controls_;
};

}  // namespace wcpdg

#endif  // WCPDG_CORE_DYNAMICS_HPP_
