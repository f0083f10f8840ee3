// Copyright 2026 The iris-sim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "iris/harness.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Bulk multicast scheduling simulator"};
  app.require_subcommand(1);
  std::string scenario_file;
  auto* run = app.add_subcommand("run", "simulate every scheduler and seed of a scenario");
  run->add_option("--scenario", scenario_file, "scenario JSON file")->required()->check(CLI::ExistingFile);
  auto* bound = app.add_subcommand("bound", "aggregate-topology lower bound next to realized completions");
  bound->add_option("--scenario", scenario_file, "scenario JSON file")->required()->check(CLI::ExistingFile);
  CLI11_PARSE(app, argc, argv);

  try {
    const auto scenario = iris::load_scenario(scenario_file);
    if (run->parsed()) {
      const auto res = iris::run_scenario(scenario);
      for (const auto& r : res.runs)
        std::cout << r.scheduler << " seed " << r.seed << ": mean " << r.report.mean_completion << " tail "
                  << r.report.tail_completion << " bandwidth " << r.report.bandwidth << '\n';
    } else {
      const auto res = iris::compute_lower_bound(scenario);
      const auto bad = res.violations();
      std::cout << res.rows.size() << " receivers bounded, " << bad.size() << " bound violations\n";
    }
    if (!scenario.output_dir.empty()) std::cout << "wrote " << scenario.output_dir.string() << '\n';
  } catch (const std::exception& e) {
    std::cerr << "sim: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
