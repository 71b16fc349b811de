// Copyright 2026 The poolmech Authors
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

#ifndef POOLMECH_TOOLS_APP_HPP
#define POOLMECH_TOOLS_APP_HPP

// Argument parsing for the poolmech executable. Kept in a header so the
// tests can drive the exact same code path with an argv vector.

#include <cstdlib>
#include <exception>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "poolmech/cli.hpp"

namespace poolmech::cli {

inline std::optional<int> grid_from_env(const char* value) {
  if (value == nullptr || *value == '\0') return std::nullopt;
  try {
    std::size_t used = 0;
    const int g = std::stoi(value, &used);
    if (used != std::string(value).size() || g < 2) throw std::invalid_argument("grid");
    return g;
  } catch (const std::exception&) {
    throw InputError(std::string("POOLMECH_GRID must be an integer >= 2, got \"") + value + "\"");
  }
}

inline int run_app(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
                   const char* grid_env = std::getenv("POOLMECH_GRID")) {
  CLI::App app{"Electricity pooling-market mechanism: centralized optimum, outcome function, equilibria"};
  app.require_subcommand(1);
  app.fallthrough();

  CommandOptions opts;
  std::string format = "human";
  std::uint64_t seed = 0;
  app.add_option("--tol", opts.tol, "bisection tolerance for the centralized solver")->check(CLI::PositiveNumber);
  app.add_option("--epsilon", opts.epsilon, "best-response gap accepted as equilibrium")->check(CLI::NonNegativeNumber);
  app.add_option("--format", format, "report format")->check(CLI::IsMember({"human", "machine"}));
  app.add_flag("--strict", opts.strict, "exit 1 when any property check fails");
  app.add_option("--seed", seed, "seed for randomized best-response restarts");

  std::string scenario_path;
  std::string messages_path;

  auto* solve = app.add_subcommand("solve", "solve the centralized welfare problem");
  solve->add_option("scenario", scenario_path, "scenario JSON file")->required();

  auto* evaluate = app.add_subcommand("evaluate", "evaluate the outcome function on a message profile");
  evaluate->add_option("scenario", scenario_path, "scenario JSON file")->required();
  evaluate->add_option("messages", messages_path, "message profile JSON file")->required();

  auto* equilibrium = app.add_subcommand("equilibrium", "construct, verify or search for equilibria");
  equilibrium->add_option("scenario", scenario_path, "scenario JSON file")->required();
  bool construct = false;
  std::string verify_path;
  std::string dynamics_path;
  int iterations = 10;
  double damping = 0.5;
  auto* construct_flag = equilibrium->add_flag("--construct", construct, "build the profile from the centralized optimum");
  auto* verify_opt = equilibrium->add_option("--verify", verify_path, "classify the given message profile");
  auto* dynamics_opt = equilibrium->add_option("--dynamics", dynamics_path, "run damped best responses from a profile");
  equilibrium->add_option("--iters", iterations, "best-response rounds")->check(CLI::PositiveNumber);
  equilibrium->add_option("--damping", damping, "damping in (0, 1]")->check(CLI::Range(0.0, 1.0));
  construct_flag->excludes(verify_opt)->excludes(dynamics_opt);
  verify_opt->excludes(dynamics_opt);

  auto* reproduce = app.add_subcommand("reproduce-examples", "rerun the built-in reference markets");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
    if (equilibrium->parsed() && !construct && verify_path.empty() && dynamics_path.empty()) {
      throw CLI::ValidationError("equilibrium", "one of --construct, --verify or --dynamics is required");
    }
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInputError;
  }

  const Format fmt = format == "machine" ? Format::kMachine : Format::kHuman;
  opts.search.seed = seed;

  const RunReport report = guarded(app.get_subcommands().front()->get_name(), [&]() -> RunReport {
    if (const auto g = grid_from_env(grid_env)) opts.search.grid = *g;
    if (reproduce->parsed()) return cmd_reproduce_examples(opts);
    const auto scenario = parse_scenario(read_text_file(scenario_path));
    if (solve->parsed()) return cmd_solve(scenario, opts);
    if (evaluate->parsed()) return cmd_evaluate(scenario, parse_messages(read_text_file(messages_path)), opts);
    if (construct) return cmd_equilibrium(scenario, ConstructMode{}, opts);
    if (!verify_path.empty()) {
      return cmd_equilibrium(scenario, VerifyMode{parse_messages(read_text_file(verify_path))}, opts);
    }
    return cmd_equilibrium(scenario, DynamicsMode{parse_messages(read_text_file(dynamics_path)), iterations, damping},
                           opts);
  });

  out << render(report, fmt);
  if (!report.error.empty()) {
    err << "error: " << report.error << (report.error.back() == '\n' ? "" : "\n");
  }
  return report.exit_code;
}

}  // namespace poolmech::cli

#endif  // POOLMECH_TOOLS_APP_HPP
