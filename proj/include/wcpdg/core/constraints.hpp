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

#ifndef WCPDG_CORE_CONSTRAINTS_HPP_
#define WCPDG_CORE_CONSTRAINTS_HPP_

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "wcpdg/core/finite_difference.hpp"
#include "wcpdg/core/types.hpp"

namespace wcpdg {

/// Inequality rows mean g <= 0. Equality rows mean g == 0 and are treated as
/// a pair of opposite inequalities whose multiplier is left unclamped.
enum class ConstraintKind { Inequality, Equality };

/// Time argument passed to constraint terms when evaluated at x_T.
inline constexpr int kTerminalStage = -1;

/// Constraint map of one optimal control problem: stage rows g(k, x_k, u_k)
/// and terminal rows g(x_T). Either may be empty.
class Constraints {
 public:
  virtual ~Constraints() = default;

  virtual int stage_dim() const = 0;
  virtual int terminal_dim() const = 0;
  virtual ConstraintKind stage_kind(int row) const = 0;
  virtual ConstraintKind terminal_kind(int row) const = 0;

  virtual Vec stage(int k, const VecRef& x, const VecRef& u) const = 0;
  virtual Vec terminal(const VecRef& x) const = 0;

  virtual void stage_jacobians(int k, const VecRef& x, const VecRef& u, Mat& Jx,
                               Mat& Ju) const {
    const Vec xv = x;
    const Vec uv = u;
    const int c = stage_dim();
    Jx = fd::jacobian([&](const Vec& p) { return stage(k, p, uv); }, xv, c);
    Ju = fd::jacobian([&](const Vec& p) { return stage(k, xv, p); }, uv, c);
  }
  virtual Mat terminal_jacobian(const VecRef& x) const {
    const Vec xv = x;
    return fd::jacobian([&](const Vec& p) { return terminal(p); }, xv,
                        terminal_dim());
  }
};

/// One block of constraint rows over the joint state and control.
///
/// `u` has size zero when the term is evaluated at the terminal state, and
/// `k` is kTerminalStage there.
class ConstraintTerm {
 public:
  virtual ~ConstraintTerm() = default;

  virtual std::string kind() const = 0;
  virtual int dim() const = 0;
  virtual ConstraintKind type() const { return ConstraintKind::Inequality; }
  virtual bool on_stages() const { return true; }
  virtual bool on_terminal() const { return false; }
  virtual bool involves(int agent) const = 0;

  virtual Vec eval(int k, const VecRef& x, const VecRef& u) const = 0;
  virtual void jacobians(int k, const VecRef& x, const VecRef& u, Mat& Jx,
                         Mat& Ju) const {
    const Vec xv = x;
    const Vec uv = u;
    Jx = fd::jacobian([&](const Vec& p) { return eval(k, p, uv); }, xv, dim());
    Ju = fd::jacobian([&](const Vec& p) { return eval(k, xv, p); }, uv, dim());
  }

  /// Pulls a joint control into the box this term describes, if it is one.
  virtual void project_controls(Vec& /*u*/) const {}
};

/// Concatenation of constraint terms, stage rows and terminal rows kept in
/// registration order.
class ConstraintSet final : public Constraints {
 public:
  ConstraintSet(int n, int m) : n_(n), m_(m) {}
  ConstraintSet(int n, int m, std::vector<std::shared_ptr<const ConstraintTerm>> terms)
      : n_(n), m_(m) {
    for (auto& t : terms) add(std::move(t));
  }

  void add(std::shared_ptr<const ConstraintTerm> term) {
    if (!term) throw DimensionError("constraints: null term");
    if (term->on_stages()) {
      for (int r = 0; r < term->dim(); ++r) stage_kinds_.push_back(term->type());
      stage_dim_ += term->dim();
    }
    if (term->on_terminal()) {
      for (int r = 0; r < term->dim(); ++r) terminal_kinds_.push_back(term->type());
      terminal_dim_ += term->dim();
    }
    terms_.push_back(std::move(term));
  }

  void project_controls(Vec& u) const {
    for (const auto& t : terms_) t->project_controls(u);
  }

  int state_dim() const { return n_; }
  int control_dim() const { return m_; }
  const std::vector<std::shared_ptr<const ConstraintTerm>>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }

  /// Terms that touch agent i.
  ConstraintSet involving(int agent) const {
    ConstraintSet out(n_, m_);
    for (const auto& t : terms_)
      if (t->involves(agent)) out.add(t);
    return out;
  }

  int stage_dim() const override { return stage_dim_; }
  int terminal_dim() const override { return terminal_dim_; }
  ConstraintKind stage_kind(int row) const override { return stage_kinds_.at(row); }
  ConstraintKind terminal_kind(int row) const override { return terminal_kinds_.at(row); }

  Vec stage(int k, const VecRef& x, const VecRef& u) const override {
    Vec g(stage_dim_);
    int row = 0;
    for (const auto& t : terms_) {
      if (!t->on_stages()) continue;
      g.segment(row, t->dim()) = t->eval(k, x, u);
      row += t->dim();
    }
    return g;
  }

  Vec terminal(const VecRef& x) const override {
    Vec g(terminal_dim_);
    const Vec none(0);
    int row = 0;
    for (const auto& t : terms_) {
      if (!t->on_terminal()) continue;
      g.segment(row, t->dim()) = t->eval(kTerminalStage, x, none);
      row += t->dim();
    }
    return g;
  }

  void stage_jacobians(int k, const VecRef& x, const VecRef& u, Mat& Jx,
                       Mat& Ju) const override {
    Jx = Mat::Zero(stage_dim_, n_);
    Ju = Mat::Zero(stage_dim_, m_);
    Mat tx;
    Mat tu;
    int row = 0;
    for (const auto& t : terms_) {
      if (!t->on_stages()) continue;
      t->jacobians(k, x, u, tx, tu);
      Jx.middleRows(row, t->dim()) = tx;
      Ju.middleRows(row, t->dim()) = tu;
      row += t->dim();
    }
  }

  Mat terminal_jacobian(const VecRef& x) const override {
    Mat Jx = Mat::Zero(terminal_dim_, n_);
    const Vec none(0);
    Mat tx;
    Mat tu;
    int row = 0;
    for (const auto& t : terms_) {
      if (!t->on_terminal()) continue;
      t->jacobians(kTerminalStage, x, none, tx, tu);
      Jx.middleRows(row, t->dim()) = tx;
      row += t->dim();
    }
    return Jx;
  }

 private:
  int n_;
  int m_;
  std::vector<std::shared_ptr<const ConstraintTerm>> terms_;
  std::vector<ConstraintKind> stage_kinds_;
  std::vector<ConstraintKind> terminal_kinds_;
  int stage_dim_ = 0;
  int terminal_dim_ = 0;
};

/// Violation of a row: max(g, 0) for inequalities, |g| for equalities.
inline double row_violation(double g, ConstraintKind kind) {
  return kind == ConstraintKind::Equality ? std::abs(g) : std::max(g, 0.0);
}

}  // namespace wcpdg

#endif  // WCPDG_CORE_CONSTRAINTS_HPP_
