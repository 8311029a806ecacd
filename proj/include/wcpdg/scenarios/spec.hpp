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

#ifndef WCPDG_SCENARIOS_SPEC_HPP_
#define WCPDG_SCENARIOS_SPEC_HPP_

#include <cmath>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "wcpdg/core/game.hpp"
#include "wcpdg/ocp/options.hpp"
#include "wcpdg/potential/certificate.hpp"
#include "wcpdg/scenarios/components.hpp"

namespace wcpdg {

/// Thrown for scenario descriptions that violate the schema or invariants.
class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct AgentSpec {
  std::string dynamics = "unicycle";  // "unicycle" | "linear"
  Mat A;                              // linear only
  Mat B;                              // linear only
  Vec start;
  Vec goal;
  Mat Q;
  Mat C;
  Mat Qf;

  bool operator==(const AgentSpec&) const = default;
};

/// Interaction kernel between a pair of agents.
struct KernelSpec {
  std::string type = "none";  // "none" | "proximity" | "quadratic"
  double d_m = 2.0;           // proximity threshold
  Mat cross;                  // quadratic: x^i' M x^j

  bool operator==(const KernelSpec&) const = default;
};

struct PairKernelSpec {
  int i = 0;
  int j = 1;
  KernelSpec kernel;

  bool operator==(const PairKernelSpec&) const = default;
};

struct CouplingSpec {
  Structure structure = Structure::UniformOutgoing;
  /// Per-agent coefficients c^i, read through the structure tag
  /// (c^{ij} = c^i outgoing, c^j incoming; dyadic c^{12} = c[0], c^{21} = c[1]).
  std::vector<double> c;
  /// Full c^{ij} matrix (N x N, diagonal ignored). Takes precedence over `c`.
  Mat matrix;
  KernelSpec kernel;                       // default for every pair
  std::vector<PairKernelSpec> pair_kernels;  // per-pair overrides

  bool operator==(const CouplingSpec&) const = default;
};

struct EqualityLinkSpec {
  int i = 0;
  int j = 1;
  double length = 1.0;

  bool operator==(const EqualityLinkSpec&) const = default;
};

struct ConstraintSpec {
  std::optional<double> d_collision;
  Vec u_bound;  // empty means unbounded
  std::vector<EqualityLinkSpec> equality_links;

  bool operator==(const ConstraintSpec&) const = default;
};

/// Optional overrides of SolverOptions fields.
struct SolverOverrides {
  std::optional<int> max_outer_iterations;
  std::optional<int> max_ilqr_iterations;
  std::optional<double> cost_tol;
  std::optional<double> gradient_tol;
  std::optional<double> constraint_tol;
  std::optional<double> penalty_initial;
  std::optional<double> penalty_growth;
  std::optional<double> penalty_max;

  bool operator==(const SolverOverrides&) const = default;

  SolverOptions apply(SolverOptions o) const {
    if (max_outer_iterations) o.max_outer_iterations = *max_outer_iterations;
    if (max_ilqr_iterations) o.max_ilqr_iterations = *max_ilqr_iterations;
    if (cost_tol) o.cost_tol = *cost_tol;
    if (gradient_tol) o.gradient_tol = *gradient_tol;
    if (constraint_tol) o.constraint_tol = *constraint_tol;
    if (penalty_initial) o.penalty_initial = *penalty_initial;
    if (penalty_growth) o.penalty_growth = *penalty_growth;
    if (penalty_max) o.penalty_max = *penalty_max;
    return o;
  }
};

struct ScenarioSpec {
  std::string name = "scenario";
  double dt = 0.1;
  double horizon_seconds = 5.0;
  std::vector<AgentSpec> agents;
  CouplingSpec coupling;
  ConstraintSpec constraints;
  SolverOverrides solver;

  bool operator==(const ScenarioSpec&) const = default;

  int horizon_steps() const { return static_cast<int>(std::lround(horizon_seconds / dt)); }

  void validate() const;
};

namespace detail {

inline int state_dim_of(const AgentSpec& a) {
  if (a.dynamics == "unicycle") return 4;
  if (a.dynamics == "linear") return static_cast<int>(a.A.rows());
  throw ScenarioError("agent dynamics must be \"unicycle\" or \"linear\", got \"" + a.dynamics +
                      "\"");
}

inline int control_dim_of(const AgentSpec& a) {
  return a.dynamics == "unicycle" ? 2 : static_cast<int>(a.B.cols());
}

inline bool symmetric_psd(const Mat& M, double floor) {
  if (M.rows() != M.cols()) return false;
  if (M.size() == 0) return true;
  if ((M - M.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, M.cwiseAbs().maxCoeff())) {
    return false;
  }
  const Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (M + M.transpose()));
  return es.eigenvalues().minCoeff() >= floor;
}

inline void validate_kernel(const KernelSpec& k, const std::string& where) {
  if (k.type == "none") return;
  if (k.type == "proximity") {
    if (!(k.d_m > 0.0)) throw ScenarioError(where + ": d_m must be positive");
    return;
  }
  if (k.type == "quadratic") {
    if (k.cross.size() == 0) throw ScenarioError(where + ": quadratic kernel needs \"cross\"");
    return;
  }
  throw ScenarioError(where + ": kernel type must be none, proximity or quadratic");
}

}  // namespace detail

inline void ScenarioSpec::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ScenarioError("dt must be positive");
  if (!(horizon_seconds > 0.0) || horizon_steps() < 1) {
    throw ScenarioError("horizon_seconds must cover at least one step");
  }
  if (agents.empty()) throw ScenarioError("scenario needs at least one agent");
  const int N = static_cast<int>(agents.size());
  for (int i = 0; i < N; ++i) {
    const AgentSpec& a = agents[i];
    const std::string at = "agent " + std::to_string(i);
    const int n = detail::state_dim_of(a);
    if (a.dynamics == "linear") {
      if (a.A.rows() != a.A.cols() || a.A.rows() < 1 || a.B.rows() != a.A.rows() || a.B.cols() < 1) {
        throw ScenarioError(at + ": linear dynamics needs square A and B with matching rows");
      }
    }
    const int m = detail::control_dim_of(a);
    if (n < 2) throw ScenarioError(at + ": state needs at least two (position) components");
    if (a.start.size() != n || a.goal.size() != n) {
      throw ScenarioError(at + ": start and goal must have " + std::to_string(n) + " entries");
    }
    if (!a.start.allFinite() || !a.goal.allFinite()) throw ScenarioError(at + ": non-finite state");
    if (a.Q.rows() != n || a.Qf.rows() != n || a.C.rows() != m) {
      throw ScenarioError(at + ": weight dimensions do not match the dynamics");
    }
    if (!detail::symmetric_psd(a.Q, 0.0) || !detail::symmetric_psd(a.Qf, 0.0)) {
      throw ScenarioError(at + ": Q and Qf must be symmetric non-negative");
    }
    if (!detail::symmetric_psd(a.C, 1e-12)) {
      throw ScenarioError(at + ": C must be symmetric positive definite");
    }
  }

  const CouplingSpec& cp = coupling;
  if (cp.matrix.size() > 0) {
    if (cp.matrix.rows() != N || cp.matrix.cols() != N) {
      throw ScenarioError("coupling matrix must be N x N");
    }
    for (int i = 0; i < N; ++i) {
      for (int j = 0; j < N; ++j) {
        if (i != j && !(cp.matrix(i, j) > 0.0)) {
          throw ScenarioError("coupling coefficients must be positive");
        }
      }
    }
  } else if (!cp.c.empty()) {
    if (static_cast<int>(cp.c.size()) != N) throw ScenarioError("coupling c needs one entry per agent");
    for (double v : cp.c) {
      if (!(v > 0.0) || !std::isfinite(v)) throw ScenarioError("coupling coefficients must be positive");
    }
  }
  if (cp.structure == Structure::Dyadic && N != 2) {
    throw ScenarioError("dyadic structure needs exactly two agents");
  }
  detail::validate_kernel(cp.kernel, "coupling kernel");
  for (const PairKernelSpec& pk : cp.pair_kernels) {
    if (pk.i < 0 || pk.j < 0 || pk.i >= N || pk.j >= N || pk.i == pk.j) {
      throw ScenarioError("pair kernel agents out of range");
    }
    detail::validate_kernel(pk.kernel, "pair kernel");
    if (pk.kernel.type == "quadratic" &&
        (pk.kernel.cross.rows() != detail::state_dim_of(agents[pk.i]) ||
         pk.kernel.cross.cols() != detail::state_dim_of(agents[pk.j]))) {
      throw ScenarioError("pair kernel cross matrix has the wrong shape");
    }
  }
  if (cp.kernel.type == "quadratic") {
    for (int i = 0; i < N; ++i) {
      if (cp.kernel.cross.rows() != detail::state_dim_of(agents[i]) ||
          cp.kernel.cross.cols() != detail::state_dim_of(agents[i])) {
        throw ScenarioError("coupling kernel cross matrix has the wrong shape");
      }
    }
  }

  const ConstraintSpec& cs = constraints;
  if (cs.d_collision) {
    if (!(*cs.d_collision > 0.0)) throw ScenarioError("d_collision must be positive");
    auto check = [&](const KernelSpec& k) {
      if (k.type == "proximity" && !(*cs.d_collision < k.d_m)) {
        throw ScenarioError("d_collision must be smaller than d_m");
      }
    };
    check(cp.kernel);
    for (const PairKernelSpec& pk : cp.pair_kernels) check(pk.kernel);
  }
  if (cs.u_bound.size() > 0) {
    for (int i = 0; i < N; ++i) {
      if (detail::control_dim_of(agents[i]) != cs.u_bound.size()) {
        throw ScenarioError("u_bound needs one entry per control channel");
      }
    }
    if (!(cs.u_bound.array() > 0.0).all()) throw ScenarioError("u_bound must be positive");
  }
  for (const EqualityLinkSpec& l : cs.equality_links) {
    if (l.i < 0 || l.j < 0 || l.i >= N || l.j >= N || l.i == l.j) {
      throw ScenarioError("equality link agents out of range");
    }
    if (!(l.length > 0.0)) throw ScenarioError("equality link length must be positive");
  }
  solver.apply(SolverOptions{}).validate();
}

/// A built scenario: the game plus what metrics and the CLI need.
struct Scenario {
  ScenarioSpec spec;
  Game game;
  std::vector<Eigen::Vector2d> goal_positions;

  Structure structure() const { return spec.coupling.structure; }
  SolverOptions solver_options(SolverOptions base = {}) const { return spec.solver.apply(base); }
};

/// c^{ij} implied by the coupling section.
inline double coupling_coefficient(const CouplingSpec& cp, int i, int j) {
  if (cp.matrix.size() > 0) return cp.matrix(i, j);
  if (cp.c.empty()) return 1.0;
  switch (cp.structure) {
    case Structure::Dyadic:
    case Structure::UniformOutgoing:
      return cp.c[i];
    case Structure::UniformIncoming:
      return cp.c[j];
    case Structure::ExactSpecialCase:
      return 1.0;
  }
  return 1.0;
}

inline std::shared_ptr<const PairKernel> make_kernel(const KernelSpec& k) {
  if (k.type == "proximity") return std::make_shared<ProximityKernel>(k.d_m);
  if (k.type == "quadratic") return std::make_shared<QuadraticCouplingKernel>(k.cross);
  return nullptr;
}

/// Assembles dynamics, costs and constraints for a validated spec.
inline Scenario build_scenario(const ScenarioSpec& spec) {
  spec.validate();
  const int N = static_cast<int>(spec.agents.size());
  const int T = spec.horizon_steps();

  std::vector<std::shared_ptr<const AgentDynamics>> dyn;
  for (const AgentSpec& a : spec.agents) {
    if (a.dynamics == "unicycle") {
      dyn.push_back(std::make_shared<UnicycleDynamics>(spec.dt));
    } else {
      dyn.push_back(std::make_shared<LinearDynamics>(a.A, a.B));
    }
  }
  auto model = std::make_shared<DynamicsModel>(std::move(dyn));
  const BlockLayout& xl = model->state_layout();
  const BlockLayout& ul = model->control_layout();

  auto costs = std::make_shared<StructuredCost>(xl, ul, T);
  for (int i = 0; i < N; ++i) {
    const AgentSpec& a = spec.agents[i];
    costs->set_own(i, std::make_shared<QuadraticTrackingCost>(a.goal, a.Q, a.C, a.Qf));
  }
  const CouplingSpec& cp = spec.coupling;
  if (auto ker = make_kernel(cp.kernel)) {
    for (int i = 0; i < N; ++i) {
      for (int j = i + 1; j < N; ++j) costs->set_symmetric_kernel(i, j, ker);
    }
  }
  for (const PairKernelSpec& pk : cp.pair_kernels) {
    const int i = std::min(pk.i, pk.j);
    const int j = std::max(pk.i, pk.j);
    KernelSpec k = pk.kernel;
    if (pk.i > pk.j && k.type == "quadratic") k.cross.transposeInPlace();
    costs->set_symmetric_kernel(i, j, make_kernel(k));
  }
  for (int i = 0; i < N; ++i) {
    for (int j = 0; j < N; ++j) {
      if (i != j) costs->set_coefficient_all_k(i, j, coupling_coefficient(cp, i, j));
    }
  }

  auto cons = std::make_shared<ConstraintSet>(xl.total(), ul.total());
  const ConstraintSpec& cs = spec.constraints;
  if (cs.d_collision) {
    for (int i = 0; i < N; ++i) {
      for (int j = i + 1; j < N; ++j) {
        cons->add(std::make_shared<CollisionConstraint>(i, j, *cs.d_collision, xl));
      }
    }
  }
  if (cs.u_bound.size() > 0) {
    for (int i = 0; i < N; ++i) cons->add(std::make_shared<ControlBound>(i, cs.u_bound, ul));
  }
  for (const EqualityLinkSpec& l : cs.equality_links) {
    cons->add(std::make_shared<EqualityLink>(l.i, l.j, l.length, xl));
  }

  Vec x0(xl.total());
  for (int i = 0; i < N; ++i) xl.block(x0, i) = spec.agents[i].start;

  Scenario sc;
  sc.spec = spec;
  sc.game = Game{model, costs, cons, x0, T, spec.dt};
  sc.game.validate();
  for (const AgentSpec& a : spec.agents) sc.goal_positions.emplace_back(a.goal[0], a.goal[1]);
  return sc;
}

/// Certificate for the scenario's declared structure; throws StructureError
/// when the coefficients do not fit it.
inline PotentialCertificate certify_scenario(const Scenario& sc) {
  return certify(sc.game.costs, sc.structure());
}

}  // namespace wcpdg

#endif  // WCPDG_SCENARIOS_SPEC_HPP_
