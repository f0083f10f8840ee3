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

#ifndef IRIS_TESTS_SUPPORT_HPP
#define IRIS_TESTS_SUPPORT_HPP

#include <cstdint>
#include <filesystem>
#include <memory>
#include <random>
#include <string>
#include <tuple>
#include <vector>

#include "iris/iris.hpp"

namespace iris::testing {

inline std::filesystem::path source_dir() { return IRIS_SOURCE_DIR; }

inline std::string geant_text() { return detail::read_file(source_dir() / "data" / "geant.json"); }

/// Builds a topology from (src, dst, capacity) triples with constant user
/// traffic, so B_e(t) = B_e = (1 - fraction) * capacity.
class TopoBuilder {
 public:
  explicit TopoBuilder(std::size_t nodes, double fraction = 0.0) : fraction_(fraction) {
    for (std::size_t i = 0; i < nodes; ++i) names_.push_back("n" + std::to_string(i));
  }

  TopoBuilder& edge(std::uint32_t src, std::uint32_t dst, double cap) {
    Edge e;
    e.id = EdgeId(static_cast<std::uint32_t>(edges_.size()));
    e.src = NodeId(src);
    e.dst = NodeId(dst);
    e.capacity = cap;
    e.user_traffic = TrafficMix(UserTrafficProfile::constant(fraction_));
    edges_.push_back(e);
    return *this;
  }

  TopoBuilder& link(std::uint32_t a, std::uint32_t b, double cap) { return edge(a, b, cap).edge(b, a, cap); }

  Topology build() const { return Topology(names_, edges_); }
  std::shared_ptr<const Topology> shared() const { return std::make_shared<const Topology>(build()); }

 private:
  double fraction_;
  std::vector<std::string> names_;
  std::vector<Edge> edges_;
};

/// Hub 0 with directed spokes: source 1 reaches the hub over `uplink`,
/// receiver i+2 hangs off the hub on `downlinks[i]`.
inline Topology physical_star(double uplink, const std::vector<double>& downlinks) {
  TopoBuilder b(downlinks.size() + 2);
  b.edge(1, 0, uplink);
  for (std::size_t i = 0; i < downlinks.size(); ++i) b.edge(0, static_cast<std::uint32_t>(i + 2), downlinks[i]);
  return b.build();
}

inline TransferRequest request(TransferId id, std::uint32_t source, std::vector<std::uint32_t> receivers,
                               double volume, Timeslot arrival = 0, std::string omega = {}) {
  TransferRequest r;
  r.id = id;
  r.source = NodeId(source);
  for (auto x : receivers) r.receivers.push_back(NodeId(x));
  r.volume = volume;
  r.arrival = arrival;
  r.objective = omega.empty() ? ObjectiveVector::all_ones(receivers.size()) : ObjectiveVector::parse(omega);
  return r;
}

/// Random strongly connected topology: a ring plus extra random links.
inline Topology random_topology(std::mt19937_64& rng, std::size_t n, std::size_t extra) {
  TopoBuilder b(n);
  std::uniform_real_distribution<double> cap(0.1, 1.0);
  for (std::uint32_t i = 0; i < n; ++i) b.link(i, static_cast<std::uint32_t>((i + 1) % n), cap(rng));
  std::uniform_int_distribution<std::uint32_t> node(0, static_cast<std::uint32_t>(n - 1));
  for (std::size_t k = 0; k < extra; ++k) {
    const auto a = node(rng), c = node(rng);
    if (a != c) b.edge(a, c, cap(rng));
  }
  return b.build();
}

}  // namespace iris::testing

#endif  // IRIS_TESTS_SUPPORT_HPP
