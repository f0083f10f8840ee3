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
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "iris/topology.hpp"
#include "iris/workload.hpp"

// Input: {"topology": path, "workload": {...}}.
int main(int argc, char** argv) {
  CLI::App app{"Workload trace tools"};
  app.require_subcommand(1);
  std::string spec_file, out_file;
  auto* gen = app.add_subcommand("gen", "generate a seeded transfer trace");
  gen->add_option("--spec", spec_file, "trace spec JSON file")->required()->check(CLI::ExistingFile);
  gen->add_option("--out", out_file, "output CSV file")->required();
  CLI11_PARSE(app, argc, argv);

  try {
    const std::filesystem::path base = std::filesystem::path(spec_file).parent_path();
    const auto j = nlohmann::json::parse(iris::detail::read_file(spec_file));
    std::filesystem::path topo_file = j.at("topology").get<std::string>();
    if (topo_file.is_relative()) topo_file = base / topo_file;
    const auto topo = iris::load_topology(iris::detail::read_file(topo_file));
    const auto spec = iris::parse_workload(j.at("workload"), base);
    const auto trace = iris::gen_trace(spec, topo);
    std::ofstream out(out_file, std::ios::binary | std::ios::trunc);
    if (!(out << iris::write_trace_csv(trace, topo))) throw iris::Error("cannot write " + out_file);
    std::cout << trace.size() << " transfers\n";
  } catch (const std::exception& e) {
    std::cerr << "trace: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
