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

#ifndef WCPDG_POTENTIAL_CERTIFICATE_HPP_
#define WCPDG_POTENTIAL_CERTIFICATE_HPP_

#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "wcpdg/core/cost.hpp"
#include "wcpdg/core/types.hpp"

namespace wcpdg {

/// Coefficient structures under which a structured game admits a weighted
/// potential.
///
///  - Dyadic: N = 2, any positive c^{12}_k, c^{21}_k.
///  - UniformOutgoing: c^{ij}_k = c^i_k (agent i treats all others alike).
///  - UniformIncoming: c^{ij}_k = c^j_k (agent j is treated alike by all).
///  - ExactSpecialCase: every coefficient equals 1; all weights are 1.
enum class Structure { Dyadic, UniformOutgoing, UniformIncoming, ExactSpecialCase };

inline std::string_view to_string(Structure s) {
  switch (s) {
    case Structure::Dyadic: return "dyadic";
    case Structure::UniformOutgoing: return "uniform_outgoing";
    case Structure::UniformIncoming: return "uniform_incoming";
    case Structure::ExactSpecialCase: return "exact";
  }
  return "unknown";
}

inline std::optional<Structure> parse_structure(std::string_view s) {
  if (s == "dyadic") return Structure::Dyadic;
  if (s == "uniform_outgoing") return Structure::UniformOutgoing;
  if (s == "uniform_incoming") return Structure::UniformIncoming;
  if (s == "exact") return Structure::ExactSpecialCase;
  return std::nullopt;
}

/// Proof object for a weighted constrained potential game.
///
/// The potential is
///   L_k = sum_i own_scale(i,k) L^{ii}_k + sum_{i<j} pair_scale(i,j,k) L^{ij}_k
/// (same at k = T with the terminal callables), and for every agent
///   L^i_k = weight(i,k) L_k + (terms free of agent i's state and control).
class PotentialCertificate {
 public:
  PotentialCertificate(Structure structure, std::shared_ptr<const StructuredCost> costs)
      : structure_(structure), costs_(std::move(costs)) {
    const int n = costs_->agents();
    const int t = costs_->horizon();
    weights_.assign(static_cast<size_t>(n) * (t + 1), 1.0);
    own_scale_.assign(static_cast<size_t>(n) * (t + 1), 1.0);
    pair_scale_.assign(static_cast<size_t>(n) * n * (t + 1), 1.0);
  }

  Structure structure() const { return structure_; }
  int agents() const { return costs_->agents(); }
  int horizon() const { return costs_->horizon(); }
  const StructuredCost& costs() const { return *costs_; }
  const std::shared_ptr<const StructuredCost>& costs_ptr() const { return costs_; }

  /// w^i_k for k in [0, T].
  double weight(int i, int k) const { return weights_.at(wi(i, k)); }
  double own_scale(int i, int k) const { return own_scale_.at(wi(i, k)); }
  double pair_scale(int i, int j, int k) const { return pair_scale_.at(pi(i, j, k)); }

  bool is_exact() const {
    for (double w : weights_)
      if (w != 1.0) return false;
    return true;
  }

  /// True when every agent's weight is constant over k. Only then does the
  /// potential minimizer satisfy each agent's KKT system with a single
  /// per-agent multiplier scaling.
  bool time_invariant_weights() const {
    for (int i = 0; i < agents(); ++i)
      for (int k = 1; k <= horizon(); ++k)
        if (weight(i, k) != weight(i, 0)) return false;
    return true;
  }

  void set(int i, int k, double weight, double own_scale) {
    weights_.at(wi(i, k)) = weight;
    own_scale_.at(wi(i, k)) = own_scale;
  }
  void set_pair(int i, int j, int k, double scale) {
    pair_scale_.at(pi(i, j, k)) = scale;
    pair_scale_.at(pi(j, i, k)) = scale;
  }

 private:
  size_t wi(int i, int k) const {
    if (i < 0 || i >= agents() || k < 0 || k > horizon()) {
      throw DimensionError("certificate: index out of range");
    }
    return static_cast<size_t>(k) * agents() + i;
  }
  size_t pi(int i, int j, int k) const {
    const int n = agents();
    if (i < 0 || i >= n || j < 0 || j >= n || k < 0 || k > horizon()) {
      throw DimensionError("certificate: index out of range");
    }
    return (static_cast<size_t>(k) * n + i) * n + j;
  }

  Structure structure_;
  std::shared_ptr<const StructuredCost> costs_;
  std::vector<double> weights_;
  std::vector<double> own_scale_;
  std::vector<double> pair_scale_;
};

struct SymmetryCheckOptions {
  int samples_per_bucket = 32;
  double tol = 1e-9;
  double state_scale = 1.5;
  std::uint64_t seed = 0x5eedcafeULL;
};

/// Probabilistic check that L^{ij}(a, b) == L^{ji}(b, a) on random states,
/// for stage buckets {0, T/2, T-1} and the terminal kernels.
inline void check_kernel_symmetry(const StructuredCost& costs,
                                  const SymmetryCheckOptions& opts = {}) {
  const int n = costs.agents();
  const BlockLayout& xl = costs.state_layout();
  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> normal(0.0, opts.state_scale);
  auto draw = [&](int dim) {
    Vec v(dim);
    for (int r = 0; r < dim; ++r) v[r] = normal(rng);
    return v;
  };
  const int t = costs.horizon();
  const std::vector<int> buckets = {0, t / 2, t - 1};
  double worst = 0.0;
  std::string worst_where;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const PairKernel* kij = costs.kernel(i, j);
      const PairKernel* kji = costs.kernel(j, i);
      if (!kij && !kji) continue;
      if (!kij || !kji) {
        throw AsymmetricKernelError("kernel (" + std::to_string(i) + "," +
                                        std::to_string(j) +
                                        ") is registered in one direction only",
                                    INFINITY);
      }
      auto record = [&](double a, double b, const std::string& where) {
        const double r = std::abs(a - b) / (1.0 + std::abs(a));
        if (r > worst) {
          worst = r;
          worst_where = where;
        }
      };
      for (int s = 0; s < opts.samples_per_bucket; ++s) {
        for (int k : buckets) {
          const Vec a = draw(xl.size(i));
          const Vec b = draw(xl.size(j));
          const int tk = costs.stage_time(k);
          record(kij->stage(tk, a, b), kji->stage(tk, b, a),
                 "stage k=" + std::to_string(k) + " pair (" + std::to_string(i) + "," +
                     std::to_string(j) + ")");
        }
        const Vec a = draw(xl.size(i));
        const Vec b = draw(xl.size(j));
        record(kij->terminal(a, b), kji->terminal(b, a),
               "terminal pair (" + std::to_string(i) + "," + std::to_string(j) + ")");
      }
    }
  }
  if (worst > opts.tol) {
    std::ostringstream msg;
    msg << "inter-agent kernels are not symmetric: worst relative mismatch " << worst
        << " at " << worst_where;
    throw AsymmetricKernelError(msg.str(), worst);
  }
}

namespace detail {

inline std::string coef_name(int i, int j, int k) {
  return "c^{" + std::to_string(i) + "," + std::to_string(j) + "}_" + std::to_string(k);
}

}  // namespace detail

/// Two-agent interaction: w^1 = 1/c^2, w^2 = 1/c^1, where c^1 = c^{12} and
/// c^2 = c^{21}.
inline PotentialCertificate certify_dyadic(std::shared_ptr<const StructuredCost> costs,
                                           const SymmetryCheckOptions& sym = {}) {
  if (costs->agents() != 2) {
    throw StructureError("dyadic structure needs exactly 2 agents, got " +
                         std::to_string(costs->agents()));
  }
  check_kernel_symmetry(*costs, sym);
  PotentialCertificate cert(Structure::Dyadic, costs);
  for (int k = 0; k <= costs->horizon(); ++k) {
    const double c1 = costs->coefficient(0, 1, k);
    const double c2 = costs->coefficient(1, 0, k);
    cert.set(0, k, 1.0 / c2, c2);
    cert.set(1, k, 1.0 / c1, c1);
    cert.set_pair(0, 1, k, c1 * c2);
  }
  return cert;
}

/// c^{ij}_k = c^i_k for all j != i:
///   w^i_k = 1 / prod_{j != i} c^j_k,
///   L_k = sum_i (prod_{j != i} c^j_k) L^{ii}_k + (prod_l c^l_k) sum_{i<j} L^{ij}_k.
inline PotentialCertificate certify_uniform_outgoing(
    std::shared_ptr<const StructuredCost> costs, const SymmetryCheckOptions& sym = {}) {
  const int n = costs->agents();
  for (int k = 0; k <= costs->horizon(); ++k) {
    for (int i = 0; i < n; ++i) {
      const int ref = i == 0 ? 1 : 0;
      for (int j = 0; j < n; ++j) {
        if (j == i || ref >= n) continue;
        if (costs->coefficient(i, j, k) != costs->coefficient(i, ref, k)) {
          throw StructureError("uniform_outgoing violated: " + detail::coef_name(i, j, k) +
                               " != " + detail::coef_name(i, ref, k));
        }
      }
    }
  }
  check_kernel_symmetry(*costs, sym);
  PotentialCertificate cert(Structure::UniformOutgoing, costs);
  for (int k = 0; k <= costs->horizon(); ++k) {
    std::vector<double> c(n, 1.0);
    for (int i = 0; i < n; ++i) {
      if (n > 1) c[i] = costs->coefficient(i, i == 0 ? 1 : 0, k);
    }
    double all = 1.0;
    for (double v : c) all *= v;
    for (int i = 0; i < n; ++i) {
      double others = 1.0;
      for (int j = 0; j < n; ++j)
        if (j != i) others *= c[j];
      cert.set(i, k, 1.0 / others, others);
      for (int j = i + 1; j < n; ++j) cert.set_pair(i, j, k, all);
    }
  }
  return cert;
}

/// c^{ij}_k = c^j_k for all i != j:
///   w^i_k = 1 / c^i_k,
///   L_k = sum_i c^i_k L^{ii}_k + sum_{i<j} c^i_k c^j_k L^{ij}_k.
inline PotentialCertificate certify_uniform_incoming(
    std::shared_ptr<const StructuredCost> costs, const SymmetryCheckOptions& sym = {}) {
  const int n = costs->agents();
  for (int k = 0; k <= costs->horizon(); ++k) {
    for (int j = 0; j < n; ++j) {
      const int ref = j == 0 ? 1 : 0;
      for (int i = 0; i < n; ++i) {
        if (i == j || ref >= n) continue;
        if (costs->coefficient(i, j, k) != costs->coefficient(ref, j, k)) {
          throw StructureError("uniform_incoming violated: " + detail::coef_name(i, j, k) +
                               " != " + detail::coef_name(ref, j, k));
        }
      }
    }
  }
  check_kernel_symmetry(*costs, sym);
  PotentialCertificate cert(Structure::UniformIncoming, costs);
  for (int k = 0; k <= costs->horizon(); ++k) {
    std::vector<double> c(n, 1.0);
    for (int j = 0; j < n; ++j) {
      if (n > 1) c[j] = costs->coefficient(j == 0 ? 1 : 0, j, k);
    }
    for (int i = 0; i < n; ++i) {
      cert.set(i, k, 1.0 / c[i], c[i]);
      for (int j = i + 1; j < n; ++j) cert.set_pair(i, j, k, c[i] * c[j]);
    }
  }
  return cert;
}

/// All coefficients equal to 1: the plain sum of own costs and kernels is an
/// exact potential.
inline PotentialCertificate certify_exact(std::shared_ptr<const StructuredCost> costs,
                                          const SymmetryCheckOptions& sym = {}) {
  const int n = costs->agents();
  for (int k = 0; k <= costs->horizon(); ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        if (i != j && costs->coefficient(i, j, k) != 1.0) {
          throw StructureError("exact potential needs unit coefficients: " +
                               detail::coef_name(i, j, k) + " != 1");
        }
  check_kernel_symmetry(*costs, sym);
  return PotentialCertificate(Structure::ExactSpecialCase, std::move(costs));
}

inline PotentialCertificate certify(std::shared_ptr<const StructuredCost> costs,
                                    Structure structure,
                                    const SymmetryCheckOptions& sym = {}) {
  switch (structure) {
    case Structure::Dyadic: return certify_dyadic(std::move(costs), sym);
    case Structure::UniformOutgoing: return certify_uniform_outgoing(std::move(costs), sym);
    case Structure::UniformIncoming: return certify_uniform_incoming(std::move(costs), sym);
    case Structure::ExactSpecialCase: return certify_exact(std::move(costs), sym);
  }
  throw StructureError("unknown structure");
}

}  // namespace wcpdg

#endif  // WCPDG_POTENTIAL_CERTIFICATE_HPP_
