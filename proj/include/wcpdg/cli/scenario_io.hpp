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

#ifndef WCPDG_CLI_SCENARIO_IO_HPP_
#define WCPDG_CLI_SCENARIO_IO_HPP_

#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "wcpdg/scenarios/spec.hpp"

namespace wcpdg {

/// Syntax error in a scenario file, with a 1-based position.
class ScenarioParseError : public ScenarioError {
 public:
  ScenarioParseError(const std::string& what, int line, int column)
      : ScenarioError("line " + std::to_string(line) + ", column " + std::to_string(column) +
                      ": " + what),
        line_(line),
        column_(column) {}
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

namespace scenario_json {

using nlohmann::json;

/// Schema errors carry the JSON pointer of the offending value.
[[noreturn]] inline void fail(const std::string& path, const std::string& what) {
  throw ScenarioError((path.empty() ? std::string("/") : path) + ": " + what);
}

inline void only_keys(const json& j, const std::string& path,
                      std::initializer_list<std::string_view> allowed) {
  if (!j.is_object()) fail(path, "expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool ok = false;
    for (std::string_view a : allowed) ok = ok || it.key() == a;
    if (!ok) fail(path + "/" + it.key(), "unknown key");
  }
}

inline const json& required(const json& j, const std::string& path, const char* key) {
  if (!j.contains(key)) fail(path + "/" + key, "missing required key");
  return j.at(key);
}

inline double number(const json& j, const std::string& path) {
  if (!j.is_number()) fail(path, "expected a number");
  return j.get<double>();
}

inline int integer(const json& j, const std::string& path) {
  if (!j.is_number_integer()) fail(path, "expected an integer");
  return j.get<int>();
}

inline std::string text(const json& j, const std::string& path) {
  if (!j.is_string()) fail(path, "expected a string");
  return j.get<std::string>();
}

inline Vec vector(const json& j, const std::string& path) {
  if (!j.is_array()) fail(path, "expected an array of numbers");
  Vec v(static_cast<Eigen::Index>(j.size()));
  for (size_t i = 0; i < j.size(); ++i) v[i] = number(j[i], path + "/" + std::to_string(i));
  return v;
}

/// A list of rows; every row must have the same length.
inline Mat matrix(const json& j, const std::string& path) {
  if (!j.is_array() || j.empty() || !j[0].is_array()) fail(path, "expected an array of rows");
  const size_t cols = j[0].size();
  Mat M(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
  for (size_t r = 0; r < j.size(); ++r) {
    const std::string rp = path + "/" + std::to_string(r);
    if (!j[r].is_array() || j[r].size() != cols) fail(rp, "rows must have equal length");
    for (size_t c = 0; c < cols; ++c) M(r, c) = number(j[r][c], rp + "/" + std::to_string(c));
  }
  return M;
}

/// Weights are either a diagonal (array of numbers) or a full matrix.
inline Mat weight(const json& j, const std::string& path) {
  if (j.is_array() && !j.empty() && j[0].is_array()) return matrix(j, path);
  return vector(j, path).asDiagonal();
}

inline json to_json(const Vec& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

inline json to_json(const Mat& M) {
  json a = json::array();
  for (Eigen::Index r = 0; r < M.rows(); ++r) {
    json row = json::array();
    for (Eigen::Index c = 0; c < M.cols(); ++c) row.push_back(M(r, c));
    a.push_back(std::move(row));
  }
  return a;
}

inline json weight_to_json(const Mat& M) {
  const bool diagonal = M.rows() == M.cols() && M.rows() > 0 &&
                        (M - Mat(M.diagonal().asDiagonal())).cwiseAbs().maxCoeff() == 0.0;
  return diagonal ? to_json(Vec(M.diagonal())) : to_json(M);
}

inline std::pair<int, int> agent_pair(const json& j, const std::string& path) {
  if (!j.is_array() || j.size() != 2) fail(path, "expected two agent indices");
  return {integer(j[0], path + "/0"), integer(j[1], path + "/1")};
}

inline KernelSpec kernel(const json& j, const std::string& path, bool with_agents) {
  if (with_agents) {
    only_keys(j, path, {"agents", "type", "d_m", "cross"});
  } else {
    only_keys(j, path, {"type", "d_m", "cross"});
  }
  KernelSpec k;
  k.type = text(required(j, path, "type"), path + "/type");
  if (j.contains("d_m")) k.d_m = number(j["d_m"], path + "/d_m");
  if (j.contains("cross")) k.cross = matrix(j["cross"], path + "/cross");
  return k;
}

inline json kernel_to_json(const KernelSpec& k) {
  json o;
  o["type"] = k.type;
  if (k.type == "proximity" || k.d_m != KernelSpec{}.d_m) o["d_m"] = k.d_m;
  if (k.cross.size() > 0) o["cross"] = to_json(k.cross);
  return o;
}

inline AgentSpec agent(const json& j, const std::string& path) {
  only_keys(j, path, {"dynamics", "A", "B", "start", "goal", "Q", "C", "Qf"});
  AgentSpec a;
  if (j.contains("dynamics")) a.dynamics = text(j["dynamics"], path + "/dynamics");
  if (a.dynamics != "unicycle" && a.dynamics != "linear") {
    fail(path + "/dynamics", "must be \"unicycle\" or \"linear\"");
  }
  if (a.dynamics == "linear") {
    a.A = matrix(required(j, path, "A"), path + "/A");
    a.B = matrix(required(j, path, "B"), path + "/B");
  } else if (j.contains("A") || j.contains("B")) {
    fail(path, "A and B only apply to linear dynamics");
  }
  a.start = vector(required(j, path, "start"), path + "/start");
  a.goal = vector(required(j, path, "goal"), path + "/goal");
  a.Q = weight(required(j, path, "Q"), path + "/Q");
  a.C = weight(required(j, path, "C"), path + "/C");
  a.Qf = weight(required(j, path, "Qf"), path + "/Qf");
  return a;
}

inline ScenarioSpec spec_from_json(const json& j) {
  only_keys(j, "", {"name", "dt", "horizon_seconds", "agents", "coupling", "constraints", "solver"});
  ScenarioSpec s;
  if (j.contains("name")) s.name = text(j["name"], "/name");
  s.dt = number(required(j, "", "dt"), "/dt");
  s.horizon_seconds = number(required(j, "", "horizon_seconds"), "/horizon_seconds");
  const json& agents = required(j, "", "agents");
  if (!agents.is_array()) fail("/agents", "expected an array");
  if (agents.empty()) fail("/agents", "at least one agent is required");
  for (size_t i = 0; i < agents.size(); ++i) {
    s.agents.push_back(agent(agents[i], "/agents/" + std::to_string(i)));
  }

  const json& cp = required(j, "", "coupling");
  only_keys(cp, "/coupling", {"structure", "c", "matrix", "kernel", "pair_kernels"});
  const std::string tag = text(required(cp, "/coupling", "structure"), "/coupling/structure");
  const auto st = parse_structure(tag);
  if (!st) fail("/coupling/structure", "unknown structure tag \"" + tag + "\"");
  s.coupling.structure = *st;
  if (cp.contains("c")) {
    const Vec c = vector(cp["c"], "/coupling/c");
    s.coupling.c.assign(c.data(), c.data() + c.size());
  }
  if (cp.contains("matrix")) s.coupling.matrix = matrix(cp["matrix"], "/coupling/matrix");
  if (cp.contains("kernel")) s.coupling.kernel = kernel(cp["kernel"], "/coupling/kernel", false);
  if (cp.contains("pair_kernels")) {
    const json& pks = cp["pair_kernels"];
    if (!pks.is_array()) fail("/coupling/pair_kernels", "expected an array");
    for (size_t i = 0; i < pks.size(); ++i) {
      const std::string p = "/coupling/pair_kernels/" + std::to_string(i);
      PairKernelSpec pk;
      pk.kernel = kernel(pks[i], p, true);
      std::tie(pk.i, pk.j) = agent_pair(required(pks[i], p, "agents"), p + "/agents");
      s.coupling.pair_kernels.push_back(std::move(pk));
    }
  }

  if (j.contains("constraints")) {
    const json& cs = j["constraints"];
    only_keys(cs, "/constraints", {"d_collision", "u_bound", "equality_links"});
    if (cs.contains("d_collision")) {
      s.constraints.d_collision = number(cs["d_collision"], "/constraints/d_collision");
    }
    if (cs.contains("u_bound")) s.constraints.u_bound = vector(cs["u_bound"], "/constraints/u_bound");
    if (cs.contains("equality_links")) {
      const json& ls = cs["equality_links"];
      if (!ls.is_array()) fail("/constraints/equality_links", "expected an array");
      for (size_t i = 0; i < ls.size(); ++i) {
        const std::string p = "/constraints/equality_links/" + std::to_string(i);
        only_keys(ls[i], p, {"agents", "length"});
        EqualityLinkSpec l;
        std::tie(l.i, l.j) = agent_pair(required(ls[i], p, "agents"), p + "/agents");
        l.length = number(required(ls[i], p, "length"), p + "/length");
        s.constraints.equality_links.push_back(l);
      }
    }
  }

  if (j.contains("solver")) {
    const json& so = j["solver"];
    only_keys(so, "/solver",
              {"max_outer_iterations", "max_ilqr_iterations", "cost_tol", "gradient_tol",
               "constraint_tol", "penalty_initial", "penalty_growth", "penalty_max"});
    SolverOverrides& o = s.solver;
    auto num = [&](const char* key, std::optional<double>& dst) {
      if (so.contains(key)) dst = number(so[key], std::string("/solver/") + key);
    };
    if (so.contains("max_outer_iterations")) {
      o.max_outer_iterations = integer(so["max_outer_iterations"], "/solver/max_outer_iterations");
    }
    if (so.contains("max_ilqr_iterations")) {
      o.max_ilqr_iterations = integer(so["max_ilqr_iterations"], "/solver/max_ilqr_iterations");
    }
    num("cost_tol", o.cost_tol);
    num("gradient_tol", o.gradient_tol);
    num("constraint_tol", o.constraint_tol);
    num("penalty_initial", o.penalty_initial);
    num("penalty_growth", o.penalty_growth);
    num("penalty_max", o.penalty_max);
  }
  return s;
}

inline json spec_to_json(const ScenarioSpec& s) {
  json j;
  j["name"] = s.name;
  j["dt"] = s.dt;
  j["horizon_seconds"] = s.horizon_seconds;
  json agents = json::array();
  for (const AgentSpec& a : s.agents) {
    json o;
    o["dynamics"] = a.dynamics;
    if (a.dynamics == "linear") {
      o["A"] = to_json(a.A);
      o["B"] = to_json(a.B);
    }
    o["start"] = to_json(a.start);
    o["goal"] = to_json(a.goal);
    o["Q"] = weight_to_json(a.Q);
    o["C"] = weight_to_json(a.C);
    o["Qf"] = weight_to_json(a.Qf);
    agents.push_back(std::move(o));
  }
  j["agents"] = std::move(agents);

  json cp;
  cp["structure"] = std::string(to_string(s.coupling.structure));
  if (!s.coupling.c.empty()) cp["c"] = s.coupling.c;
  if (s.coupling.matrix.size() > 0) cp["matrix"] = to_json(s.coupling.matrix);
  if (!(s.coupling.kernel == KernelSpec{})) cp["kernel"] = kernel_to_json(s.coupling.kernel);
  if (!s.coupling.pair_kernels.empty()) {
    json pks = json::array();
    for (const PairKernelSpec& pk : s.coupling.pair_kernels) {
      json o = kernel_to_json(pk.kernel);
      o["agents"] = {pk.i, pk.j};
      pks.push_back(std::move(o));
    }
    cp["pair_kernels"] = std::move(pks);
  }
  j["coupling"] = std::move(cp);

  json cs = json::object();
  if (s.constraints.d_collision) cs["d_collision"] = *s.constraints.d_collision;
  if (s.constraints.u_bound.size() > 0) cs["u_bound"] = to_json(s.constraints.u_bound);
  if (!s.constraints.equality_links.empty()) {
    json ls = json::array();
    for (const EqualityLinkSpec& l : s.constraints.equality_links) {
      ls.push_back({{"agents", {l.i, l.j}}, {"length", l.length}});
    }
    cs["equality_links"] = std::move(ls);
  }
  if (!cs.empty()) j["constraints"] = std::move(cs);

  json so = json::object();
  const SolverOverrides& o = s.solver;
  if (o.max_outer_iterations) so["max_outer_iterations"] = *o.max_outer_iterations;
  if (o.max_ilqr_iterations) so["max_ilqr_iterations"] = *o.max_ilqr_iterations;
  auto put = [&](const char* key, const std::optional<double>& v) {
    if (v) so[key] = *v;
  };
  put("cost_tol", o.cost_tol);
  put("gradient_tol", o.gradient_tol);
  put("constraint_tol", o.constraint_tol);
  put("penalty_initial", o.penalty_initial);
  put("penalty_growth", o.penalty_growth);
  put("penalty_max", o.penalty_max);
  if (!so.empty()) j["solver"] = std::move(so);
  return j;
}

/// 1-based line and column of a byte offset.
inline std::pair<int, int> position(std::string_view text, size_t offset) {
  int line = 1;
  int column = 1;
  for (size_t i = 0; i < offset && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return {line, column};
}

}  // namespace scenario_json

/// Parses and validates a scenario document. Syntax errors throw
/// ScenarioParseError; schema and invariant violations throw ScenarioError.
inline ScenarioSpec parse_scenario(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    // byte is one past the offending character.
    const size_t at = e.byte > 0 ? e.byte - 1 : 0;
    const auto [line, column] = scenario_json::position(text, at);
    std::string what = e.what();
    // Keep only the reason; the position is reported as line/column.
    if (const auto p = what.find(": syntax error"); p != std::string::npos) {
      what = what.substr(p + 2);
    } else if (const auto q = what.find("parse error"); q != std::string::npos) {
      what = what.substr(q);
    }
    throw ScenarioParseError(what, line, column);
  }
  ScenarioSpec s = scenario_json::spec_from_json(j);
  s.validate();
  return s;
}

inline std::string serialize_scenario(const ScenarioSpec& spec) {
  return scenario_json::spec_to_json(spec).dump(2) + "\n";
}

inline ScenarioSpec load_scenario(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ScenarioError("cannot open scenario file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

}  // namespace wcpdg

#endif  // WCPDG_CLI_SCENARIO_IO_HPP_
