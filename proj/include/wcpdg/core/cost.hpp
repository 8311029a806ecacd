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

#ifndef WCPDG_CORE_COST_HPP_
#define WCPDG_CORE_COST_HPP_

#include <algorithm>
#include <memory>
#include <string>
#include <vector>

#include "wcpdg/core/finite_difference.hpp"
#include "wcpdg/core/types.hpp"

namespace wcpdg {

/// Objective of a single optimal control problem:
///   terminal(x_T) + sum_{k<T} stage(k, x_k, u_k).
class Objective {
 public:
  virtual ~Objective() = default;

  virtual double stage(int k, const VecRef& x, const VecRef& u) const = 0;
  virtual double terminal(const VecRef& x) const = 0;

  virtual QuadraticModel stage_quadratic(int k, const VecRef& x,
                                         const VecRef& u) const {
    return fd::quadratic_model(
        [&](const Vec& a, const Vec& b) { return stage(k, a, b); }, Vec(x),
        Vec(u));
  }

  /// gu/Huu/Hux are empty.
  virtual QuadraticModel terminal_quadratic(const VecRef& x) const {
    const Vec xv = x;
    QuadraticModel q;
    auto f = [&](const Vec& a) { return terminal(a); };
    q.value = terminal(xv);
    q.gx = fd::gradient(f, xv);
    q.Hxx = fd::hessian(f, xv);
    q.gu = Vec(0);
    q.Huu = Mat(0, 0);
    q.Hux = Mat(0, xv.size());
    return q;
  }
};

/// Agent-specific cost L^{ii}_k(x^i, u^i) and terminal L^{ii}_T(x^i).
class OwnCost {
 public:
  virtual ~OwnCost() = default;

  virtual std::string kind() const = 0;
  virtual double stage(int k, const VecRef& x, const VecRef& u) const = 0;
  virtual double terminal(const VecRef& x) const = 0;

  virtual QuadraticModel stage_quadratic(int k, const VecRef& x,
                                         const VecRef& u) const {
    return fd::quadratic_model(
        [&](const Vec& a, const Vec& b) { return stage(k, a, b); }, Vec(x),
        Vec(u));
  }
  virtual QuadraticModel terminal_quadratic(const VecRef& x) const {
    const Vec xv = x;
    auto f = [&](const Vec& a) { return terminal(a); };
    QuadraticModel q;
    q.value = terminal(xv);
    q.gx = fd::gradient(f, xv);
    q.Hxx = fd::hessian(f, xv);
    return q;
  }
};

/// Inter-agent kernel L^{ij}_k(x^i, x^j). States only, no controls.
///
/// Quadratic models reuse QuadraticModel with (x, u) read as (x^i, x^j):
/// gx = dL/dx^i, gu = dL/dx^j, Hux = d^2L/(dx^j dx^i).
class PairKernel {
 public:
  virtual ~PairKernel() = default;

  virtual std::string kind() const = 0;
  virtual double stage(int k, const VecRef& a, const VecRef& b) const = 0;
  virtual double terminal(const VecRef& a, const VecRef& b) const = 0;

  virtual QuadraticModel stage_quadratic(int k, const VecRef& a,
                                         const VecRef& b) const {
    return fd::quadratic_model(
        [&](const Vec& p, const Vec& q) { return stage(k, p, q); }, Vec(a),
        Vec(b));
  }
  virtual QuadraticModel terminal_quadratic(const VecRef& a,
                                            const VecRef& b) const {
    return fd::quadratic_model(
        [&](const Vec& p, const Vec& q) { return terminal(p, q); }, Vec(a),
        Vec(b));
  }
};

/// Swaps the arguments of another kernel: (a, b) -> inner(b, a).
///
/// Builders register kernel[j][i] as the swap of kernel[i][j], which makes
/// the symmetry assumption hold by construction.
class SwappedKernel final : public PairKernel {
 public:
  explicit SwappedKernel(std::shared_ptr<const PairKernel> inner)
      : inner_(std::move(inner)) {}

  std::string kind() const override { return inner_->kind(); }
  double stage(int k, const VecRef& a, const VecRef& b) const override {
    return inner_->stage(k, b, a);
  }
  double terminal(const VecRef& a, const VecRef& b) const override {
    return inner_->terminal(b, a);
  }
  QuadraticModel stage_quadratic(int k, const VecRef& a,
                                 const VecRef& b) const override {
    return swap(inner_->stage_quadratic(k, b, a));
  }
  QuadraticModel terminal_quadratic(const VecRef& a,
                                    const VecRef& b) const override {
    return swap(inner_->terminal_quadratic(b, a));
  }
  const std::shared_ptr<const PairKernel>& inner() const { return inner_; }

 private:
  static QuadraticModel swap(QuadraticModel q) {
    QuadraticModel s;
    s.value = q.value;
    s.gx = std::move(q.gu);
    s.gu = std::move(q.gx);
    s.Hxx = std::move(q.Huu);
    s.Huu = std::move(q.Hxx);
    s.Hux = q.Hux.transpose();
    return s;
  }

  std::shared_ptr<const PairKernel> inner_;
};

/// Per-agent structured costs
///   L^i_k = L^{ii}_k(x^i, u^i) + sum_{j != i} c^{ij}_k L^{ij}_k(x^i, x^j)
/// with the analogous terminal form at index k = T.
///
/// Null own costs are zero; a null kernel[i][j] means i and j do not interact.
class StructuredCost {
 public:
  StructuredCost(BlockLayout states, BlockLayout controls, int horizon)
      : states_(std::move(states)),
        controls_(std::move(controls)),
        horizon_(horizon) {
    const int n = agents();
    if (n < 1) throw DimensionError("costs: need at least one agent");
    if (controls_.blocks() != n) {
      throw DimensionError("costs: state/control layouts disagree on N");
    }
    if (horizon_ < 1) throw DimensionError("costs: horizon must be >= 1");
    own_.resize(n);
    kernels_.assign(n, std::vector<std::shared_ptr<const PairKernel>>(n));
    coef_.assign(static_cast<size_t>(n) * n * (horizon_ + 1), 1.0);
    stage_time_.resize(horizon_);
    for (int k = 0; k < horizon_; ++k) stage_time_[k] = k;
  }

  int agents() const { return states_.blocks(); }
  int horizon() const { return horizon_; }
  const BlockLayout& state_layout() const { return states_; }
  const BlockLayout& control_layout() const { return controls_; }

  void set_own(int i, std::shared_ptr<const OwnCost> c) { own_.at(i) = std::move(c); }
  const OwnCost* own(int i) const { return own_.at(i).get(); }
  std::shared_ptr<const OwnCost> own_ptr(int i) const { return own_.at(i); }

  void set_kernel(int i, int j, std::shared_ptr<const PairKernel> kernel) {
    if (i == j) throw DimensionError("costs: kernel on the diagonal");
    kernels_.at(i).at(j) = std::move(kernel);
  }
  /// Registers `kernel` for (i, j) and its swap for (j, i).
  void set_symmetric_kernel(int i, int j, std::shared_ptr<const PairKernel> kernel) {
    set_kernel(j, i, std::make_shared<SwappedKernel>(kernel));
    set_kernel(i, j, std::move(kernel));
  }
  const PairKernel* kernel(int i, int j) const { return kernels_.at(i).at(j).get(); }
  std::shared_ptr<const PairKernel> kernel_ptr(int i, int j) const {
    return kernels_.at(i).at(j);
  }

  /// c^{ij}_k for k in [0, T]; index T is the terminal coefficient.
  double coefficient(int i, int j, int k) const { return coef_.at(index(i, j, k)); }
  void set_coefficient(int i, int j, int k, double c) {
    if (!(c > 0.0) || !std::isfinite(c)) {
      throw StructureError("costs: coefficient c^{" + std::to_string(i) + "," +
                           std::to_string(j) + "}_" + std::to_string(k) +
                           " must be positive");
    }
    coef_.at(index(i, j, k)) = c;
  }
  void set_coefficient_all_k(int i, int j, double c) {
    for (int k = 0; k <= horizon_; ++k) set_coefficient(i, j, k, c);
  }

  /// Time argument handed to stage-level callables for stage index k.
  int stage_time(int k) const { return stage_time_.at(k); }

  double agent_stage(int i, int k, const VecRef& x, const VecRef& u) const {
    const int t = stage_time(k);
    double v = 0.0;
    if (own_[i]) v += own_[i]->stage(t, states_.block(x, i), controls_.block(u, i));
    for (int j = 0; j < agents(); ++j) {
      if (j == i || !kernels_[i][j]) continue;
      v += coefficient(i, j, k) *
           kernels_[i][j]->stage(t, states_.block(x, i), states_.block(x, j));
    }
    return v;
  }

  double agent_terminal(int i, const VecRef& x) const {
    double v = 0.0;
    if (own_[i]) v += own_[i]->terminal(states_.block(x, i));
    for (int j = 0; j < agents(); ++j) {
      if (j == i || !kernels_[i][j]) continue;
      v += coefficient(i, j, horizon_) *
           kernels_[i][j]->terminal(states_.block(x, i), states_.block(x, j));
    }
    return v;
  }

  /// Analytic (or component-provided) gradient of L^i_k w.r.t. (x, u), both
  /// joint-sized.
  void agent_stage_gradient(int i, int k, const VecRef& x, const VecRef& u,
                            Vec& gx, Vec& gu) const {
    const int t = stage_time(k);
    gx = Vec::Zero(states_.total());
    gu = Vec::Zero(controls_.total());
    if (own_[i]) {
      const QuadraticModel q =
          own_[i]->stage_quadratic(t, states_.block(x, i), controls_.block(u, i));
      states_.block(gx, i) += q.gx;
      controls_.block(gu, i) += q.gu;
    }
    for (int j = 0; j < agents(); ++j) {
      if (j == i || !kernels_[i][j]) continue;
      const QuadraticModel q = kernels_[i][j]->stage_quadratic(
          t, states_.block(x, i), states_.block(x, j));
      const double c = coefficient(i, j, k);
      states_.block(gx, i) += c * q.gx;
      states_.block(gx, j) += c * q.gu;
    }
  }

  Vec agent_terminal_gradient(int i, const VecRef& x) const {
    Vec gx = Vec::Zero(states_.total());
    if (own_[i]) states_.block(gx, i) += own_[i]->terminal_quadratic(states_.block(x, i)).gx;
    for (int j = 0; j < agents(); ++j) {
      if (j == i || !kernels_[i][j]) continue;
      const QuadraticModel q =
          kernels_[i][j]->terminal_quadratic(states_.block(x, i), states_.block(x, j));
      const double c = coefficient(i, j, horizon_);
      states_.block(gx, i) += c * q.gx;
      states_.block(gx, j) += c * q.gu;
    }
    return gx;
  }

  /// Costs restricted to stages [k0, k0 + len), mapped to a new horizon len.
  /// Stage coefficients and time arguments past the end of this horizon are
  /// clamped to the last stage; the terminal coefficient carries over.
  StructuredCost window(int k0, int len) const {
    if (k0 < 0 || len < 1) throw DimensionError("costs: bad window");
    StructuredCost w(states_, controls_, len);
    w.own_ = own_;
    w.kernels_ = kernels_;
    const int n = agents();
    for (int k = 0; k < len; ++k) {
      const int src = std::min(k0 + k, horizon_ - 1);
      w.stage_time_[k] = stage_time_[src];
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) w.coef_[w.index(i, j, k)] = coefficient(i, j, src);
    }
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        w.coef_[w.index(i, j, len)] = coefficient(i, j, horizon_);
    return w;
  }

 private:
  size_t index(int i, int j, int k) const {
    const int n = agents();
    if (i < 0 || i >= n || j < 0 || j >= n || k < 0 || k > horizon_) {
      throw DimensionError("costs: coefficient index out of range");
    }
    return (static_cast<size_t>(k) * n + i) * n + j;
  }

  BlockLayout states_;
  BlockLayout controls_;
  int horizon_;
  std::vector<std::shared_ptr<const OwnCost>> own_;
  std::vector<std::vector<std::shared_ptr<const PairKernel>>> kernels_;
  std::vector<double> coef_;
  std::vector<int> stage_time_;
};

}  // namespace wcpdg

#endif  // WCPDG_CORE_COST_HPP_
