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

#ifndef WCPDG_CLI_COMMANDS_HPP_
#define WCPDG_CLI_COMMANDS_HPP_

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <string>
#include <utility>

#include "wcpdg/cli/export.hpp"
#include "wcpdg/cli/scenario_io.hpp"
#include "wcpdg/ocp/al.hpp"
#include "wcpdg/ocp/derivative_check.hpp"
#include "wcpdg/potential/objective.hpp"
#include "wcpdg/potential/verify.hpp"
#include "wcpdg/sim/benchmark.hpp"
#include "wcpdg/sim/receding.hpp"

namespace wcpdg {

enum ExitCode : int {
  kExitOk = 0,
  kExitInputError = 2,
  kExitCertificationFailure = 3,
  kExitSolverFailure = 4,
};

/// Mean solve time of the reference benchmark the Monte-Carlo report is
/// printed next to (not a target).
inline constexpr double kReferenceSolveMs = 26.15;

struct CommandOptions {
  std::string output = ".";
  std::uint64_t seed = 1;
  int n = 200;
  double radius = 0.1;  // Monte-Carlo start jitter (m)
  int receding = 0;     // planning steps; 0 solves open loop
  int execute = 1;
  bool trace = false;
  int samples = 20;  // certification / derivative samples
  int workers = worker_count();
  /// Tolerance overrides: cost, gradient, constraint, verify, derivative.
  std::map<std::string, double> tol;

  double tolerance(const std::string& key, double fallback) const {
    const auto it = tol.find(key);
    return it == tol.end() ? fallback : it->second;
  }
  SolverOptions solver(const Scenario& sc) const {
    SolverOptions o = sc.solver_options();
    o.cost_tol = tolerance("cost", o.cost_tol);
    o.gradient_tol = tolerance("gradient", o.gradient_tol);
    o.constraint_tol = tolerance("constraint", o.constraint_tol);
    o.validate();
    return o;
  }
};

/// Parses "name=value" for --tol; throws ScenarioError on unknown names.
inline std::pair<std::string, double> parse_tolerance_override(const std::string& s) {
  const auto eq = s.find('=');
  if (eq == std::string::npos) throw ScenarioError("--tol expects name=value, got '" + s + "'");
  const std::string key = s.substr(0, eq);
  if (key != "cost" && key != "gradient" && key != "constraint" && key != "verify" &&
      key != "derivative") {
    throw ScenarioError("--tol: unknown tolerance '" + key +
                        "' (cost, gradient, constraint, verify, derivative)");
  }
  double v = 0.0;
  const std::string val = s.substr(eq + 1);
  const auto r = std::from_chars(val.data(), val.data() + val.size(), v);
  if (r.ec != std::errc() || r.ptr != val.data() + val.size() || !(v > 0.0)) {
    throw ScenarioError("--tol: '" + val + "' is not a positive number");
  }
  return {key, v};
}

namespace detail {

inline std::ofstream open_output(const std::string& dir, const std::string& name) {
  std::filesystem::create_directories(dir);
  const auto path = std::filesystem::path(dir) / name;
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ScenarioError("cannot write '" + path.string() + "'");
  return f;
}

/// Maps exception families onto the exit-code contract.
inline int run_guarded(std::ostream& err, const std::function<int()>& body) {
  try {
    return body();
  } catch (const ScenarioError& e) {
    err << "input error: " << e.what() << '\n';
    return kExitInputError;
  } catch (const StructureError& e) {
    err << "certification failed: " << e.what() << '\n';
    return kExitCertificationFailure;
  } catch (const CertificateMismatchError& e) {
    err << "certification failed: " << e.what() << '\n';
    return kExitCertificationFailure;
  } catch (const std::exception& e) {
    err << "solver failure: " << e.what() << '\n';
    return kExitSolverFailure;
  }
}

inline std::string weights_summary(const PotentialCertificate& cert) {
  if (!cert.time_invariant_weights()) return "time-varying weights";
  bool ones = true;
  std::string list;
  for (int i = 0; i < cert.agents(); ++i) {
    ones = ones && cert.weight(i, 0) == 1.0;
    list += (i ? ", " : "") + format_number(cert.weight(i, 0));
  }
  return ones ? "weights all 1" : "weights (" + list + ")";
}

}  // namespace detail

/// Certifies the scenario's declared structure and checks the potential
/// property and derivative conditions on random samples.
inline int cmd_certify(const std::string& path, const CommandOptions& o, std::ostream& out,
                       std::ostream& err) {
  return detail::run_guarded(err, [&] {
    const Scenario sc = build_scenario(load_scenario(path));
    const PotentialCertificate cert = certify_scenario(sc);
    out << "certificate: " << to_string(cert.structure()) << ", " << detail::weights_summary(cert)
        << '\n';
    out << "agent,weight\n";
    for (int i = 0; i < cert.agents(); ++i) {
      out << i << ',' << format_number(cert.weight(i, 0)) << '\n';
    }
    const double tol = o.tolerance("verify", 1e-8);
    const VerificationReport prop =
        verify_potential_property(sc.game, cert, o.samples, tol, o.seed);
    DerivativeConditionOptions dopt;
    dopt.source = DerivativeSource::Analytic;
    const VerificationReport deriv =
        verify_derivative_conditions(sc.game, cert, o.samples, tol, o.seed, dopt);
    out << "potential property: max residual " << format_number(prop.max_residual) << " over "
        << prop.samples << " deviations (tol " << format_number(tol) << ") "
        << (prop.passed ? "ok" : "FAILED") << '\n';
    out << "derivative conditions: max residual " << format_number(deriv.max_residual)
        << " over " << deriv.samples << " points (tol " << format_number(tol) << ") "
        << (deriv.passed ? "ok" : "FAILED") << '\n';
    if (!prop.passed || !deriv.passed) {
      err << "verification failed: " << (prop.passed ? deriv.worst_detail : prop.worst_detail)
          << '\n';
      return int(kExitCertificationFailure);
    }
    return int(kExitOk);
  });
}

/// Solves the scenario open loop (or receding horizon) and writes
/// trajectory.csv, metrics.json and, with --trace, trace.jsonl.
inline int cmd_solve(const std::string& path, const CommandOptions& o, std::ostream& out,
                     std::ostream& err) {
  return detail::run_guarded(err, [&] {
    const Scenario sc = build_scenario(load_scenario(path));
    const PotentialCertificate cert = certify_scenario(sc);
    SolverOptions opts = o.solver(sc);
    std::ofstream trace_file;
    if (o.trace) {
      trace_file = detail::open_output(o.output, "trace.jsonl");
      opts.trace = [&trace_file](const TraceRecord& r) { trace_file << trace_to_json(r).dump() << '\n'; };
    }

    nlohmann::json report;
    report["scenario"] = sc.spec.name;
    Trajectory tr;
    RunMetrics metrics;
    bool converged = false;
    if (o.receding > 0) {
      RecedingHorizonConfig cfg;
      cfg.plan = o.receding;
      cfg.execute = o.execute;
      cfg.total = sc.game.horizon;
      const RecedingHorizonResult r =
          run_receding_horizon(sc.game, cert, cfg, opts, sc.goal_positions);
      tr = r.trajectory;
      metrics = r.metrics;
      converged = r.success;
      report["mode"] = "receding_horizon";
      report["plan_steps"] = cfg.plan;
      report["execute_steps"] = cfg.execute;
      report["replans"] = r.iterations.size();
      report["failure_index"] = r.failure_index;
      report["status"] = r.success ? "converged" : std::string(to_string(r.failure_status));
      report["message"] = r.message;
    } else {
      const auto t0 = std::chrono::steady_clock::now();
      const OcpSolution sol = al_solve(sc.game, cert, opts);
      const double ms =
          std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
      tr = sol.trajectory;
      metrics = compute_metrics(sc.game, tr, sc.goal_positions);
      metrics.solve_time = TimingStats::of({ms});
      converged = sol.converged;
      report["mode"] = "open_loop";
      report["status"] = std::string(to_string(sol.status));
      report["message"] = sol.message;
      report["iterations"] = sol.iterations;
      report["outer_iterations"] = sol.outer_iterations;
      report["cost"] = json_number(sol.cost);
      report["gradient"] = json_number(sol.gradient);
      report["complementarity"] = json_number(sol.complementarity);
    }
    const bool feasible = metrics.max_violation <= opts.constraint_tol;
    const bool ok = converged && feasible;
    report["converged"] = converged;
    report["feasible"] = feasible;
    report["failed"] = !ok;
    report["metrics"] = metrics_to_json(metrics, true);

    auto traj_file = detail::open_output(o.output, "trajectory.csv");
    write_trajectory_csv(traj_file, sc.game, tr);
    auto metrics_file = detail::open_output(o.output, "metrics.json");
    metrics_file << report.dump(2) << '\n';

    out << "status: " << report["status"].get<std::string>() << (ok ? "" : " (FAILED)") << '\n';
    out << "min pairwise distance: " << format_number(metrics.min_pairwise_distance) << " m\n";
    out << "max goal error: " << format_number(metrics.max_goal_error()) << " m\n";
    out << "max constraint violation: " << format_number(metrics.max_violation) << '\n';
    if (!ok) {
      err << "solve failed: " << report["message"].get<std::string>() << '\n';
      return int(kExitSolverFailure);
    }
    return int(kExitOk);
  });
}

/// Monte-Carlo benchmark. runs.csv and summary.json depend only on
/// (scenario, n, radius, seed); timing.json, timing.csv and histogram.csv
/// hold the wall-clock data.
inline int cmd_bench(const std::string& path, const CommandOptions& o, std::ostream& out,
                     std::ostream& err) {
  return detail::run_guarded(err, [&] {
    if (o.n < 1) throw ScenarioError("--n must be >= 1");
    const ScenarioSpec spec = load_scenario(path);
    const Scenario sc = build_scenario(spec);
    certify_scenario(sc);
    const SolverOptions opts = o.solver(sc);
    const BenchmarkReport rep = monte_carlo_benchmark(spec, o.n, o.radius, o.seed, opts, o.workers);

    auto runs = detail::open_output(o.output, "runs.csv");
    write_benchmark_runs_csv(runs, rep);
    nlohmann::json summary = benchmark_summary_json(rep);
    summary["scenario"] = spec.name;
    summary["seed"] = o.seed;
    summary["radius"] = o.radius;
    auto sfile = detail::open_output(o.output, "summary.json");
    sfile << summary.dump(2) << '\n';
    auto tfile = detail::open_output(o.output, "timing.json");
    tfile << benchmark_timing_json(rep, kReferenceSolveMs).dump(2) << '\n';
    auto tcsv = detail::open_output(o.output, "timing.csv");
    write_timing_csv(tcsv, rep);
    auto hfile = detail::open_output(o.output, "histogram.csv");
    write_histogram_csv(hfile, rep.histogram);

    out << "runs: " << rep.rows.size() << ", success rate " << format_number(rep.success_rate)
        << '\n';
    out << "solve time (single open-loop solve): mean " << format_number(rep.timing.mean_ms)
        << " ms, std " << format_number(rep.timing.std_ms) << " ms, max "
        << format_number(rep.timing.max_ms) << " ms (reference mean "
        << format_number(kReferenceSolveMs) << " ms)\n";
    if (rep.successes < static_cast<int>(rep.rows.size())) {
      err << (rep.rows.size() - rep.successes) << " run(s) failed; see runs.csv\n";
      return int(kExitSolverFailure);
    }
    return int(kExitOk);
  });
}

/// Analytic against finite-difference derivatives for every component of
/// the scenario: dynamics, own costs, pair kernels, constraints and the
/// assembled potential.
inline int cmd_check_derivatives(const std::string& path, const CommandOptions& o,
                                 std::ostream& out, std::ostream& err) {
  return detail::run_guarded(err, [&] {
    const Scenario sc = build_scenario(load_scenario(path));
    const Game& g = sc.game;
    const double tol = o.tolerance("derivative", 1e-5);
    DerivativeSampling s;
    s.samples = o.samples;
    s.seed = o.seed;
    s.horizon = g.horizon;
    const BlockLayout& xl = g.state_layout();
    const BlockLayout& ul = g.control_layout();
    double worst = 0.0;
    out << "component,samples,max_relative_error,where\n";
    auto row = [&](const std::string& name, const DerivativeCheckResult& r) {
      worst = std::max(worst, r.max_relative_error);
      out << name << ',' << r.samples << ',' << format_number(r.max_relative_error) << ','
          << r.where << '\n';
    };
    for (int i = 0; i < g.agents(); ++i) {
      row("dynamics[" + std::to_string(i) + "]", derivative_check(g.dynamics->agent(i), s));
      if (const OwnCost* c = g.costs->own(i)) {
        row("cost[" + std::to_string(i) + "]", derivative_check(*c, xl.size(i), ul.size(i), s));
      }
      for (int j = i + 1; j < g.agents(); ++j) {
        if (const PairKernel* k = g.costs->kernel(i, j)) {
          row("kernel[" + std::to_string(i) + "," + std::to_string(j) + "]",
              derivative_check(*k, xl.size(i), xl.size(j), s));
        }
      }
    }
    if (!g.constraints->empty()) {
      row("constraints", derivative_check(*g.constraints, g.state_dim(), g.control_dim(), s));
    }
    const PotentialCertificate cert = certify_scenario(sc);
    row("potential", derivative_check(PotentialObjective(cert), g.state_dim(), g.control_dim(), s));
    out << "max relative error " << format_number(worst) << " (tol " << format_number(tol) << ") "
        << (worst <= tol ? "ok" : "FAILED") << '\n';
    if (worst > tol) {
      err << "derivative check failed\n";
      return int(kExitSolverFailure);
    }
    return int(kExitOk);
  });
}

}  // namespace wcpdg

#endif  // WCPDG_CLI_COMMANDS_HPP_
