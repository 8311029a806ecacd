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

#ifndef WCPDG_CORE_TYPES_HPP_
#define WCPDG_CORE_TYPES_HPP_

#include <Eigen/Dense>

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace wcpdg {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using VecRef = Eigen::Ref<const Eigen::VectorXd>;

// Error hierarchy. Every failure the library reports derives from Error so
// callers (the CLI in particular) can map families of failures to exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, int step)
      : Error(what), step_(step) {}
  int step() const { return step_; }

 private:
  int step_;
};

class StructureError : public Error {
 public:
  using Error::Error;
};

class AsymmetricKernelError : public StructureError {
 public:
  AsymmetricKernelError(const std::string& what, double worst)
      : StructureError(what), worst_(worst) {}
  double worst_residual() const { return worst_; }

 private:
  double worst_;
};

class SamplingError : public Error {
 public:
  using Error::Error;
};

class ConditioningError : public Error {
 public:
  using Error::Error;
};

class NoUniqueEquilibriumError : public Error {
 public:
  using Error::Error;
};

class CertificateMismatchError : public Error {
 public:
  using Error::Error;
};

/// Index of an agent within a game, in [0, N).
struct AgentId {
  int index = 0;

  constexpr explicit AgentId(int i) : index(i) {}
  friend constexpr bool operator==(AgentId, AgentId) = default;
};

/// Offset table mapping per-agent blocks into one contiguous joint vector.
class BlockLayout {
 public:
  BlockLayout() = default;

  explicit BlockLayout(std::vector<int> sizes) : sizes_(std::move(sizes)) {
    offsets_.reserve(sizes_.size());
    int acc = 0;
    for (int s : sizes_) {
      if (s < 0) throw DimensionError("negative block size");
      offsets_.push_back(acc);
      acc += s;
    }
    total_ = acc;
  }

  int blocks() const { return static_cast<int>(sizes_.size()); }
  int size(int i) const { return sizes_.at(i); }
  int offset(int i) const { return offsets_.at(i); }
  int total() const { return total_; }
  const std::vector<int>& sizes() const { return sizes_; }

  // Segment views; take lvalues only so the view never outlives its source.
  template <typename Derived>
  auto block(const Eigen::MatrixBase<Derived>& v, int i) const {
    return v.segment(offsets_.at(i), sizes_.at(i));
  }
  template <typename Derived>
  auto block(Eigen::MatrixBase<Derived>& v, int i) const {
    return v.segment(offsets_.at(i), sizes_.at(i));
  }

  friend bool operator==(const BlockLayout& a, const BlockLayout& b) {
    return a.sizes_ == b.sizes_;
  }

 private:
  std::vector<int> sizes_;
  std::vector<int> offsets_;
  int total_ = 0;
};

/// Joint state sequence x_0..x_T paired with joint controls u_0..u_{T-1}.
struct Trajectory {
  std::vector<Vec> states;
  std::vector<Vec> controls;
  double dt = 1.0;

  int horizon() const { return static_cast<int>(controls.size()); }

  void validate(int n, int m) const {
    if (!(dt > 0.0)) throw DimensionError("trajectory dt must be positive");
    if (states.size() != controls.size() + 1) {
      throw DimensionError("trajectory needs T+1 states for T controls");
    }
    for (const auto& x : states) {
      if (x.size() != n) throw DimensionError("trajectory state dimension");
    }
    for (const auto& u : controls) {
      if (u.size() != m) throw DimensionError("trajectory control dimension");
    }
  }
};

/// Local second-order model of a scalar function of two arguments (x, u).
///
/// Also used for pairwise kernels, where x and u stand for the two agents'
/// states. `Hux` is d^2/(du dx), shaped (dim u) x (dim x).
struct QuadraticModel {
  double value = 0.0;
  Vec gx;
  Vec gu;
  Mat Hxx;
  Mat Huu;
  Mat Hux;

  static QuadraticModel zero(int nx, int nu) {
    QuadraticModel q;
    q.gx = Vec::Zero(nx);
    q.gu = Vec::Zero(nu);
    q.Hxx = Mat::Zero(nx, nx);
    q.Huu = Mat::Zero(nu, nu);
    q.Hux = Mat::Zero(nu, nx);
    return q;
  }
};

inline bool all_finite(const Vec& v) { return v.allFinite(); }

inline double max_abs(const Vec& v) {
  return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff();
}

}  // namespace wcpdg

#endif  // WCPDG_CORE_TYPES_HPP_
