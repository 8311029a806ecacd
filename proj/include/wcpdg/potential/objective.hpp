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

#ifndef WCPDG_POTENTIAL_OBJECTIVE_HPP_
#define WCPDG_POTENTIAL_OBJECTIVE_HPP_

#include "wcpdg/core/cost.hpp"
#include "wcpdg/core/game.hpp"
#include "wcpdg/potential/certificate.hpp"

namespace wcpdg {

/// The potential L_T + sum_k L_k assembled from a certificate, optionally
/// scaled by a positive constant. Quadratic models are assembled from the
/// component models, so they are exact wherever the components are.
class PotentialObjective final : public Objective {
 public:
  explicit PotentialObjective(PotentialCertificate cert, double scale = 1.0)
      : cert_(std::move(cert)), scale_(scale) {
    if (!(scale_ > 0.0)) throw DimensionError("potential scale must be positive");
  }

  const PotentialCertificate& certificate() const { return cert_; }
  double scale() const { return scale_; }

  double stage(int k, const VecRef& x, const VecRef& u) const override {
    const StructuredCost& c = cert_.costs();
    const BlockLayout& xl = c.state_layout();
    const BlockLayout& ul = c.control_layout();
    const int t = c.stage_time(k);
    double v = 0.0;
    for (int i = 0; i < c.agents(); ++i) {
      if (const OwnCost* own = c.own(i)) {
        v += cert_.own_scale(i, k) * own->stage(t, xl.block(x, i), ul.block(u, i));
      }
      for (int j = i + 1; j < c.agents(); ++j) {
        if (const PairKernel* ker = c.kernel(i, j)) {
          v += cert_.pair_scale(i, j, k) * ker->stage(t, xl.block(x, i), xl.block(x, j));
        }
      }
    }
    return scale_ * v;
  }

  double terminal(const VecRef& x) const override {
    const StructuredCost& c = cert_.costs();
    const BlockLayout& xl = c.state_layout();
    const int T = c.horizon();
    double v = 0.0;
    for (int i = 0; i < c.agents(); ++i) {
      if (const OwnCost* own = c.own(i)) v += cert_.own_scale(i, T) * own->terminal(xl.block(x, i));
      for (int j = i + 1; j < c.agents(); ++j) {
        if (const PairKernel* ker = c.kernel(i, j)) {
          v += cert_.pair_scale(i, j, T) * ker->terminal(xl.block(x, i), xl.block(x, j));
        }
      }
    }
    return scale_ * v;
  }

  QuadraticModel stage_quadratic(int k, const VecRef& x, const VecRef& u) const override {
    const StructuredCost& c = cert_.costs();
    const BlockLayout& xl = c.state_layout();
    const BlockLayout& ul = c.control_layout();
    const int t = c.stage_time(k);
    QuadraticModel q = QuadraticModel::zero(xl.total(), ul.total());
    for (int i = 0; i < c.agents(); ++i) {
      if (const OwnCost* own = c.own(i)) {
        const double s = scale_ * cert_.own_scale(i, k);
        const QuadraticModel qi = own->stage_quadratic(t, xl.block(x, i), ul.block(u, i));
        const int xo = xl.offset(i), xn = xl.size(i);
        const int uo = ul.offset(i), un = ul.size(i);
        q.value += s * qi.value;
        q.gx.segment(xo, xn) += s * qi.gx;
        q.gu.segment(uo, un) += s * qi.gu;
        q.Hxx.block(xo, xo, xn, xn) += s * qi.Hxx;
        q.Huu.block(uo, uo, un, un) += s * qi.Huu;
        q.Hux.block(uo, xo, un, xn) += s * qi.Hux;
      }
      for (int j = i + 1; j < c.agents(); ++j) {
        if (const PairKernel* ker = c.kernel(i, j)) {
          add_pair(q, scale_ * cert_.pair_scale(i, j, k),
                   ker->stage_quadratic(t, xl.block(x, i), xl.block(x, j)), xl, i, j);
        }
      }
    }
    return q;
  }

  QuadraticModel terminal_quadratic(const VecRef& x) const override {
    const StructuredCost& c = cert_.costs();
    const BlockLayout& xl = c.state_layout();
    const int T = c.horizon();
    QuadraticModel q = QuadraticModel::zero(xl.total(), 0);
    for (int i = 0; i < c.agents(); ++i) {
      if (const OwnCost* own = c.own(i)) {
        const double s = scale_ * cert_.own_scale(i, T);
        const QuadraticModel qi = own->terminal_quadratic(xl.block(x, i));
        const int xo = xl.offset(i), xn = xl.size(i);
        q.value += s * qi.value;
        q.gx.segment(xo, xn) += s * qi.gx;
        q.Hxx.block(xo, xo, xn, xn) += s * qi.Hxx;
      }
      for (int j = i + 1; j < c.agents(); ++j) {
        if (const PairKernel* ker = c.kernel(i, j)) {
          add_pair(q, scale_ * cert_.pair_scale(i, j, T),
                   ker->terminal_quadratic(xl.block(x, i), xl.block(x, j)), xl, i, j);
        }
      }
    }
    return q;
  }

 private:
  static void add_pair(QuadraticModel& q, double s, const QuadraticModel& p,
                       const BlockLayout& xl, int i, int j) {
    const int io = xl.offset(i), in = xl.size(i);
    const int jo = xl.offset(j), jn = xl.size(j);
    q.value += s * p.value;
    q.gx.segment(io, in) += s * p.gx;
    q.gx.segment(jo, jn) += s * p.gu;
    q.Hxx.block(io, io, in, in) += s * p.Hxx;
    q.Hxx.block(jo, jo, jn, jn) += s * p.Huu;
    q.Hxx.block(jo, io, jn, in) += s * p.Hux;
    q.Hxx.block(io, jo, in, jn) += s * p.Hux.transpose();
  }

  PotentialCertificate cert_;
  double scale_;
};

/// P(x, u) along a trajectory.
inline double potential_value(const Objective& objective, const Trajectory& traj) {
  double v = objective.terminal(traj.states.back());
  for (int k = 0; k < traj.horizon(); ++k) {
    v += objective.stage(k, traj.states[k], traj.controls[k]);
  }
  return v;
}

}  // namespace wcpdg

#endif  // WCPDG_POTENTIAL_OBJECTIVE_HPP_
