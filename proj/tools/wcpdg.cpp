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

// wcpdg: certify, solve, benchmark and derivative-check scenario files.

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "wcpdg/cli/commands.hpp"

namespace {

struct Invocation {
  std::string scenario;
  std::vector<std::string> tol;
  wcpdg::CommandOptions opts;
};

CLI::App* add_command(CLI::App& app, const std::string& name, const std::string& help,
                      Invocation& inv) {
  CLI::App* sub = app.add_subcommand(name, help);
  sub->add_option("scenario", inv.scenario, "scenario JSON file")->required();
  sub->add_option("--output,-o", inv.opts.output, "output directory")->capture_default_str();
  sub->add_option("--seed", inv.opts.seed, "random seed")->capture_default_str();
  sub->add_option("--tol", inv.tol,
                  "tolerance override name=value (cost, gradient, constraint, verify, "
                  "derivative); repeatable")
      ->take_all()
      ->allow_extra_args(false);
  sub->add_option("--samples", inv.opts.samples, "verification samples")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  return sub;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Weighted constrained potential dynamic games"};
  app.require_subcommand(1);
  Invocation inv;

  add_command(app, "certify", "certify the potential structure of a scenario", inv);
  CLI::App* solve = add_command(app, "solve", "solve a scenario for its equilibrium", inv);
  solve->add_option("--receding", inv.opts.receding, "plan steps for receding horizon (0: off)")
      ->check(CLI::NonNegativeNumber);
  solve->add_option("--execute", inv.opts.execute, "steps executed per replan")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  solve->add_flag("--trace", inv.opts.trace, "write per-iteration trace.jsonl");
  CLI::App* bench = add_command(app, "bench", "Monte-Carlo benchmark over jittered starts", inv);
  bench->add_option("--n", inv.opts.n, "number of runs")->capture_default_str();
  bench->add_option("--radius", inv.opts.radius, "start jitter radius (m)")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  bench->add_option("--workers", inv.opts.workers, "worker threads")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  add_command(app, "check-derivatives", "compare analytic and numerical derivatives", inv);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : wcpdg::kExitInputError;
  }

  try {
    for (const std::string& t : inv.tol) {
      const auto [name, value] = wcpdg::parse_tolerance_override(t);
      inv.opts.tol.insert_or_assign(name, value);
    }
  } catch (const wcpdg::ScenarioError& e) {
    std::cerr << "input error: " << e.what() << '\n';
    return wcpdg::kExitInputError;
  }

  const std::string cmd = app.get_subcommands().front()->get_name();
  if (cmd == "certify") return wcpdg::cmd_certify(inv.scenario, inv.opts, std::cout, std::cerr);
  if (cmd == "solve") return wcpdg::cmd_solve(inv.scenario, inv.opts, std::cout, std::cerr);
  if (cmd == "bench") return wcpdg::cmd_bench(inv.scenario, inv.opts, std::cout, std::cerr);
  return wcpdg::cmd_check_derivatives(inv.scenario, inv.opts, std::cout, std::cerr);
}
