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
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "iris/gml.hpp"
#include "iris/topology.hpp"
#include "iris/workload.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Topology tools"};
  app.require_subcommand(1);
  std::string gml_file, out_file;
  std::optional<double> default_gbps;
  auto* convert = app.add_subcommand("convert", "convert a Topology Zoo GML file to topology JSON");
  convert->add_option("--gml", gml_file, "input GML file")->required()->check(CLI::ExistingFile);
  convert->add_option("--out", out_file, "output JSON file")->required();
  convert->add_option("--default-gbps", default_gbps, "speed for links without one");
  CLI11_PARSE(app, argc, argv);

  try {
    const auto doc = iris::gml::to_topology_json(iris::detail::read_file(gml_file), default_gbps);
    const auto text = doc.dump(2) + "\n";
    const auto topo = iris::load_topology(text);
    std::ofstream out(out_file, std::ios::binary | std::ios::trunc);
    if (!(out << text)) throw iris::Error("cannot write " + out_file);
    std::cout << topo.node_count() << " nodes, " << topo.edge_count() << " directed edges\n";
  } catch (const std::exception& e) {
    std::cerr << "topo: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
