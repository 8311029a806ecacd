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

#ifndef WCPDG_OCP_DERIVATIVE_CHECK_HPP_
#define WCPDG_OCP_DERIVATIVE_CHECK_HPP_

#include <algorithm>
#include <cstdint>
#include <random>
#include <string>

#include "wcpdg/core/constraints.hpp"
#include "wcpdg/core/cost.hpp"
#include "wcpdg/core/dynamics.hpp"
#include "wcpdg/core/finite_difference.hpp"
#include "wcpdg/core/random.hpp"

namespace wcpdg {

struct DerivativeCheckResult {
  int samples = 0;
  double max_relative_error = 0.0;
  std::string where;

  void record(const Mat& analytic, const Mat& numeric, const std::string& what) {
    if (analytic.size() == 0 && numeric.size() == 0) return;
    if (analytic.rows() != numeric.rows() || analytic.cols() != numeric.cols()) {
      throw DimensionError("derivative check: shape mismatch in " + what);
    }
    const double scale = std::max(1.0, numeric.cwiseAbs().maxCoeff());
    const double err = (analytic - numeric).cwiseAbs().maxCoeff() / scale;
    if (err > max_relative_error || where.empty()) {
      max_relative_error = std::max(max_relative_error, err);
      where = what;
    }
  }
  void merge(const DerivativeCheckResult& o) {
    samples += o.samples;
    if (o.max_relative_error > max_relative_error || where.empty()) {
      max_relative_error = std::max(max_relative_error, o.max_relative_error);
      where = o.where;
    }
  }
};

/// Sampling box for derivative checks: states and controls are Gaussian with
/// the given scales.
struct DerivativeSampling {
  int samples = 20;
  std::uint64_t seed = 1;
  double state_scale = 1.5;
  double control_scale = 1.0;
  int horizon = 1;  // stage indices are drawn from [0, horizon)
};

/// Analytic dynamics Jacobians against central differences of step().
inline DerivativeCheckResult derivative_check(const Dynamics& dyn, const DerivativeSampling& s) {
  DerivativeCheckResult res;
  for (int i = 0; i < s.samples; ++i) {
    Rng rng(derive_seed(s.seed, static_cast<std::uint64_t>(i)));
    const int k = std::uniform_int_distribution<int>(0, std::max(0, s.horizon - 1))(rng);
    const Vec x = normal_vector(rng, dyn.state_dim(), s.state_scale);
    const Vec u = normal_vector(rng, dyn.control_dim(), s.control_scale);
    Mat A, B;
    dyn.jacobians(k, x, u, A, B);
    res.record(A, fd::jacobian([&](const Vec& p) { return dyn.step(k, p, u); }, x, dyn.state_dim()),
               "df/dx sample " + std::to_string(i));
    res.record(B, fd::jacobian([&](const Vec& p) { return dyn.step(k, x, p); }, u, dyn.state_dim()),
               "df/du sample " + std::to_string(i));
    ++res.samples;
  }
  return res;
}

/// Gradients from stage_quadratic / terminal_quadratic against central
/// differences of stage() / terminal().
inline DerivativeCheckResult derivative_check(const Objective& obj, int n, int m,
                                              const DerivativeSampling& s) {
  DerivativeCheckResult res;
  for (int i = 0; i < s.samples; ++i) {
    Rng rng(derive_seed(s.seed, static_cast<std::uint64_t>(i)));
    const int k = std::uniform_int_distribution<int>(0, std::max(0, s.horizon - 1))(rng);
    const Vec x = normal_vector(rng, n, s.state_scale);
    const Vec u = normal_vector(rng, m, s.control_scale);
    const QuadraticModel q = obj.stage_quadratic(k, x, u);
    res.record(q.gx, fd::gradient([&](const Vec& p) { return obj.stage(k, p, u); }, x),
               "stage dL/dx sample " + std::to_string(i));
    res.record(q.gu, fd::gradient([&](const Vec& p) { return obj.stage(k, x, p); }, u),
               "stage dL/du sample " + std::to_string(i));
    const QuadraticModel t = obj.terminal_quadratic(x);
    res.record(t.gx, fd::gradient([&](const Vec& p) { return obj.terminal(p); }, x),
               "terminal dL/dx sample " + std::to_string(i));
    ++res.samples;
  }
  return res;
}

inline DerivativeCheckResult derivative_check(const OwnCost& cost, int n, int m,
                                              const DerivativeSampling& s) {
  DerivativeCheckResult res;
  for (int i = 0; i < s.samples; ++i) {
    Rng rng(derive_seed(s.seed, static_cast<std::uint64_t>(i)));
    const int k = std::uniform_int_distribution<int>(0, std::max(0, s.horizon - 1))(rng);
    const Vec x = normal_vector(rng, n, s.state_scale);
    const Vec u = normal_vector(rng, m, s.control_scale);
    const QuadraticModel q = cost.stage_quadratic(k, x, u);
    res.record(q.gx, fd::gradient([&](const Vec& p) { return cost.stage(k, p, u); }, x),
               cost.kind() + " dL/dx sample " + std::to_string(i));
    res.record(q.gu, fd::gradient([&](const Vec& p) { return cost.stage(k, x, p); }, u),
               cost.kind() + " dL/du sample " + std::to_string(i));
    res.record(cost.terminal_quadratic(x).gx,
               fd::gradient([&](const Vec& p) { return cost.terminal(p); }, x),
               cost.kind() + " terminal sample " + std::to_string(i));
    ++res.samples;
  }
  return res;
}

inline DerivativeCheckResult derivative_check(const PairKernel& kernel, int na, int nb,
                                              const DerivativeSampling& s) {
  DerivativeCheckResult res;
  for (int i = 0; i < s.samples; ++i) {
    Rng rng(derive_seed(s.seed, static_cast<std::uint64_t>(i)));
    const int k = std::uniform_int_distribution<int>(0, std::max(0, s.horizon - 1))(rng);
    const Vec a = normal_vector(rng, na, s.state_scale);
    const Vec b = normal_vector(rng, nb, s.state_scale);
    const QuadraticModel q = kernel.stage_quadratic(k, a, b);
    res.record(q.gx, fd::gradient([&](const Vec& p) { return kernel.stage(k, p, b); }, a),
               kernel.kind() + " dL/da sample " + std::to_string(i));
    res.record(q.gu, fd::gradient([&](const Vec& p) { return kernel.stage(k, a, p); }, b),
               kernel.kind() + " dL/db sample " + std::to_string(i));
    const QuadraticModel t = kernel.terminal_quadratic(a, b);
    res.record(t.gx, fd::gradient([&](const Vec& p) { return kernel.terminal(p, b); }, a),
               kernel.kind() + " terminal dL/da sample " + std::to_string(i));
    res.record(t.gu, fd::gradient([&](const Vec& p) { return kernel.terminal(a, p); }, b),
               kernel.kind() + " terminal dL/db sample " + std::to_string(i));
    ++res.samples;
  }
  return res;
}

inline DerivativeCheckResult derivative_check(const Constraints& cons, int n, int m,
                                              const DerivativeSampling& s) {
  DerivativeCheckResult res;
  for (int i = 0; i < s.samples; ++i) {
    Rng rng(derive_seed(s.seed, static_cast<std::uint64_t>(i)));
    const int k = std::uniform_int_distribution<int>(0, std::max(0, s.horizon - 1))(rng);
    const Vec x = normal_vector(rng, n, s.state_scale);
    const Vec u = normal_vector(rng, m, s.control_scale);
    if (cons.stage_dim() > 0) {
      Mat Jx, Ju;
      cons.stage_jacobians(k, x, u, Jx, Ju);
      res.record(Jx, fd::jacobian([&](const Vec& p) { return cons.stage(k, p, u); }, x, cons.stage_dim()),
                 "dg/dx sample " + std::to_string(i));
      res.record(Ju, fd::jacobian([&](const Vec& p) { return cons.stage(k, x, p); }, u, cons.stage_dim()),
                 "dg/du sample " + std::to_string(i));
    }
    if (cons.terminal_dim() > 0) {
      res.record(cons.terminal_jacobian(x),
                 fd::jacobian([&](const Vec& p) { return cons.terminal(p); }, x, cons.terminal_dim()),
                 "dg_T/dx sample " + std::to_string(i));
    }
    ++res.samples;
  }
  return res;
}

}  // namespace wcpdg

#endif  // WCPDG_OCP_DERIVATIVE_CHECK_HPP_
