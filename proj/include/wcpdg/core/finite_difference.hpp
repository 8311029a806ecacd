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

#ifndef WCPDG_CORE_FINITE_DIFFERENCE_HPP_
#define WCPDG_CORE_FINITE_DIFFERENCE_HPP_

#include <cmath>

#include "wcpdg/core/types.hpp"

// Central finite differences. The first-order step is 1e-6 * (1 + |x_i|);
// second derivatives use a wider 1e-4 step since they divide by h^2.
namespace wcpdg::fd {

inline double step(double x) { return 1e-6 * (1.0 + std::abs(x)); }
inline double second_step(double x) { return 1e-4 * (1.0 + std::abs(x)); }

template <typename F>
Vec gradient(F&& f, const Vec& x) {
  Vec g(x.size());
  Vec xp = x;
  for (int i = 0; i < x.size(); ++i) {
    const double h = step(x[i]);
    xp[i] = x[i] + h;
    const double fp = f(xp);
    xp[i] = x[i] - h;
    const double fm = f(xp);
    xp[i] = x[i];
    g[i] = (fp - fm) / (2.0 * h);
  }
  return g;
}

/// Jacobian of a vector-valued map; columns index the input.
template <typename F>
Mat jacobian(F&& f, const Vec& x, int out_dim) {
  Mat J(out_dim, x.size());
  Vec xp = x;
  for (int i = 0; i < x.size(); ++i) {
    const double h = step(x[i]);
    xp[i] = x[i] + h;
    const Vec fp = f(xp);
    xp[i] = x[i] - h;
    const Vec fm = f(xp);
    xp[i] = x[i];
    J.col(i) = (fp - fm) / (2.0 * h);
  }
  return J;
}

template <typename F>
Mat hessian(F&& f, const Vec& x) {
  const int n = static_cast<int>(x.size());
  Mat H(n, n);
  Vec xp = x;
  const double f0 = f(x);
  for (int i = 0; i < n; ++i) {
    const double hi = second_step(x[i]);
    xp[i] = x[i] + hi;
    const double fpp = f(xp);
    xp[i] = x[i] - hi;
    const double fmm = f(xp);
    xp[i] = x[i];
    H(i, i) = (fpp - 2.0 * f0 + fmm) / (hi * hi);
    for (int j = i + 1; j < n; ++j) {
      const double hj = second_step(x[j]);
      auto eval = [&](double si, double sj) {
        xp[i] = x[i] + si * hi;
        xp[j] = x[j] + sj * hj;
        const double v = f(xp);
        xp[i] = x[i];
        xp[j] = x[j];
        return v;
      };
      H(i, j) = (eval(1, 1) - eval(1, -1) - eval(-1, 1) + eval(-1, -1)) /
                (4.0 * hi * hj);
      H(j, i) = H(i, j);
    }
  }
  return H;
}

/// Quadratic model of f(x, u) built entirely from function values.
template <typename F>
QuadraticModel quadratic_model(F&& f, const Vec& x, const Vec& u) {
  const int nx = static_cast<int>(x.size());
  const int nu = static_cast<int>(u.size());
  Vec z(nx + nu);
  z << x, u;
  auto fz = [&](const Vec& v) { return f(v.head(nx), v.tail(nu)); };
  const Vec g = gradient(fz, z);
  const Mat H = hessian(fz, z);
  QuadraticModel q;
  q.value = f(x, u);
  q.gx = g.head(nx);
  q.gu = g.tail(nu);
  q.Hxx = H.topLeftCorner(nx, nx);
  q.Huu = H.bottomRightCorner(nu, nu);
  q.Hux = H.bottomLeftCorner(nu, nx);
  return q;
}

}  // namespace wcpdg::fd

#endif  // WCPDG_CORE_FINITE_DIFFERENCE_HPP_
