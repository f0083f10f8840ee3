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

#include <catch_amalgamated.hpp>

#include <algorithm>
#include <limits>
#include <random>

#include "support.hpp"

using namespace iris;
using Catch::Approx;

namespace {

std::vector<EdgeId> ids(std::initializer_list<std::uint32_t> l) {
  std::vector<EdgeId> v;
  for (auto x : l) v.push_back(EdgeId(x));
  return v;
}

// True when `mask` selects an arborescence from `root` reaching every
// terminal.
bool spans(const Topology& t, std::uint32_t mask, NodeId root, const std::vector<NodeId>& terminals) {
  std::vector<int> indeg(t.node_count(), 0);
  for (std::size_t i = 0; i < t.edge_count(); ++i)
    if (mask >> i & 1) ++indeg[t.edge(EdgeId(static_cast<std::uint32_t>(i))).dst.index()];
  if (indeg[root.index()] != 0) return false;
  for (int d : indeg)
    if (d > 1) return false;
  std::vector<char> seen(t.node_count(), 0);
  seen[root.index()] = 1;
  for (bool grew = true; grew;) {
    grew = false;
    for (std::size_t i = 0; i < t.edge_count(); ++i) {
      if (!(mask >> i & 1)) continue;
      const auto& e = t.edge(EdgeId(static_cast<std::uint32_t>(i)));
      if (seen[e.src.index()] && !seen[e.dst.index()]) seen[e.dst.index()] = grew = true;
    }
  }
  for (std::size_t i = 0; i < t.edge_count(); ++i)
    if ((mask >> i & 1) && !seen[t.edge(EdgeId(static_cast<std::uint32_t>(i))).src.index()]) return false;
  for (NodeId n : terminals)
    if (!seen[n.index()]) return false;
  return true;
}

double brute_force_steiner(const Topology& t, const std::vector<double>& w, NodeId root,
                           const std::vector<NodeId>& terminals) {
  double best = std::numeric_limits<double>::infinity();
  for (std::uint32_t mask = 0; mask < (1u << t.edge_count()); ++mask) {
    double sum = 0.0;
    for (std::size_t i = 0; i < t.edge_count(); ++i)
      if (mask >> i & 1) sum += w[i];
    if (sum < best && spans(t, mask, root, terminals)) best = sum;
  }
  return best;
}

void require_arborescence(const Topology& t, const ForwardingTree& tree) {
  std::uint32_t mask = 0;
  for (EdgeId e : tree.edges) mask |= 1u << e.value;
  REQUIRE(spans(t, mask, tree.root, tree.terminals));
}

}  // namespace

TEST_CASE("Edge weight is load plus volume over mean bandwidth", "[tree-selection]") {
  const auto topo = testing::TopoBuilder(3).edge(0, 1, 5).edge(1, 2, 1).edge(0, 2, 2).build();
  EdgeLoadTable table(topo);
  CHECK(edge_weight(table, EdgeId(0), 10) == Approx(2.0));
  table.add_volume(EdgeId(0), 15);
  CHECK(table.load(EdgeId(0)) == Approx(3.0));
  CHECK(edge_weight(table, EdgeId(0), 0) == Approx(3.0));
  CHECK(edge_weight(table, EdgeId(1), 4) - edge_weight(table, EdgeId(2), 4) == Approx(2.0));
}

TEST_CASE("Steiner trees on hand-built graphs", "[tree-selection]") {
  SECTION("path") {
    const auto t = testing::TopoBuilder(3).edge(0, 1, 1).edge(1, 2, 1).build();
    const NodeId term[] = {NodeId(2)};
    const auto tree = min_weight_steiner(t, unit_weights(t), NodeId(0), term);
    CHECK(tree.edges == ids({0, 1}));
  }
  SECTION("star from the center") {
    const auto t = testing::TopoBuilder(4).link(0, 1, 1).link(0, 2, 1).link(0, 3, 1).build();
    const NodeId term[] = {NodeId(1), NodeId(2), NodeId(3)};
    const auto tree = min_weight_steiner(t, unit_weights(t), NodeId(0), term);
    CHECK(tree.edges == ids({0, 2, 4}));
  }
  SECTION("diamond picks the cheap side") {
    // s=0, a=1, b=2, t=3
    const auto t = testing::TopoBuilder(4).edge(0, 1, 1).edge(0, 2, 1).edge(1, 3, 1).edge(2, 3, 1).build();
    const std::vector<double> w{1, 1, 1, 3};
    const NodeId term[] = {NodeId(3)};
    const auto tree = min_weight_steiner(t, w, NodeId(0), term);
    CHECK(tree.edges == ids({0, 2}));
    CHECK(tree.weight(w) == Approx(2.0));
    CHECK(exact_min_steiner(t, w, NodeId(0), term).edges == ids({0, 2}));
  }
  SECTION("unreachable terminals are listed") {
    const auto t = testing::TopoBuilder(4).edge(0, 1, 1).edge(2, 3, 1).build();
    const NodeId term[] = {NodeId(1), NodeId(3)};
    CHECK_THROWS_MATCHES(min_weight_steiner(t, unit_weights(t), NodeId(0), term), UnreachableError,
                         Catch::Matchers::MessageMatches(Catch::Matchers::ContainsSubstring("n3")));
  }
  SECTION("root as terminal is ignored") {
    const auto t = testing::TopoBuilder(2).edge(0, 1, 1).build();
    const NodeId term[] = {NodeId(0)};
    CHECK(min_weight_steiner(t, unit_weights(t), NodeId(0), term).edges.empty());
  }
}

TEST_CASE("Steiner heuristic against exhaustive enumeration", "[tree-selection]") {
  std::mt19937_64 rng(2024);
  int suboptimal = 0;
  int trials = 0;
  for (int trial = 0; trial < 150; ++trial) {
    const std::size_t n = std::uniform_int_distribution<std::size_t>(4, 8)(rng);
    testing::TopoBuilder b(n);
    std::uniform_int_distribution<std::uint32_t> node(0, static_cast<std::uint32_t>(n - 1));
    // Ring for reachability, then extra directed edges up to 16 total.
    for (std::uint32_t i = 0; i < n; ++i) b.edge(i, static_cast<std::uint32_t>((i + 1) % n), 1.0);
    for (std::size_t k = n; k < 16;) {
      const auto a = node(rng), c = node(rng);
      if (a == c) continue;
      b.edge(a, c, 1.0);
      ++k;
    }
    const auto t = b.build();
    std::vector<double> w(t.edge_count());
    for (auto& x : w) x = std::uniform_int_distribution<int>(1, 9)(rng);
    std::vector<NodeId> term;
    for (std::uint32_t v = 1; v < n; ++v)
      if (std::bernoulli_distribution(0.5)(rng)) term.push_back(NodeId(v));
    if (term.empty()) term.push_back(NodeId(1));

    const double opt = brute_force_steiner(t, w, NodeId(0), term);
    const auto heur = min_weight_steiner(t, w, NodeId(0), term);
    const auto exact = exact_min_steiner(t, w, NodeId(0), term);
    require_arborescence(t, heur);
    require_arborescence(t, exact);
    REQUIRE(exact.weight(w) == Approx(opt));
    REQUIRE(heur.weight(w) >= opt - 1e-9);
    REQUIRE(heur.weight(w) <= 2.0 * opt + 1e-9);
    if (heur.weight(w) > opt + 1e-9) ++suboptimal;
    ++trials;
  }
  WARN("shortest-path heuristic was not exactly optimal in " << suboptimal << " of " << trials << " instances");
}

TEST_CASE("Steiner trees are deterministic", "[tree-selection]") {
  std::mt19937_64 rng(5);
  const auto t = testing::random_topology(rng, 20, 30);
  const auto w = unit_weights(t);
  const NodeId term[] = {NodeId(3), NodeId(7), NodeId(11), NodeId(19)};
  CHECK(min_weight_steiner(t, w, NodeId(0), term) == min_weight_steiner(t, w, NodeId(0), term));
  CHECK(exact_min_steiner(t, w, NodeId(0), term) == exact_min_steiner(t, w, NodeId(0), term));
}

TEST_CASE("Load-aware forwarding trees", "[tree-selection]") {
  SECTION("idle network follows volume over bandwidth") {
    // 0->1->3 over fast links, 0->2->3 over slow ones.
    const auto t = testing::TopoBuilder(4).edge(0, 1, 1).edge(1, 3, 1).edge(0, 2, 0.5).edge(2, 3, 0.5).edge(0, 3, 0.3).build();
    EdgeLoadTable table(t);
    const auto req = testing::request(0, 0, {3}, 10);
    const NodeId term[] = {NodeId(3)};
    const auto tree = comp_forwarding_tree(table, t, term, req);
    CHECK(tree.edges == ids({0, 1}));
    CHECK(table.load(EdgeId(0)) == 0.0);
  }
  SECTION("routes around a congested edge") {
    const auto t = testing::TopoBuilder(4).edge(0, 1, 1).edge(1, 3, 1).edge(0, 2, 1).edge(2, 3, 1).build();
    EdgeLoadTable table(t);
    table.add_volume(EdgeId(1), 1000);
    const auto req = testing::request(0, 0, {3}, 10);
    const NodeId term[] = {NodeId(3)};
    CHECK(comp_forwarding_tree(table, t, term, req).edges == ids({2, 3}));
  }
  SECTION("larger transfers prefer fewer slow edges") {
    // Route A: 2 fast edges with some load. Route B: 1 slow edge, idle.
    const auto t = testing::TopoBuilder(3).edge(0, 1, 1).edge(1, 2, 1).edge(0, 2, 0.25).build();
    EdgeLoadTable table(t);
    table.add_volume(EdgeId(0), 3);
    const auto small = testing::request(0, 0, {2}, 1);
    const auto large = testing::request(1, 0, {2}, 100);
    const NodeId term[] = {NodeId(2)};
    // small: A = 3 + 1 + 1 = 5, B = 4. large: A = 3 + 200 = 203, B = 400.
    CHECK(comp_forwarding_tree(table, t, term, small).edges == ids({2}));
    CHECK(comp_forwarding_tree(table, t, term, large).edges == ids({0, 1}));
  }
  SECTION("GEANT tree stays within the arborescence bound") {
    const auto t = load_topology(testing::geant_text(), 1);
    EdgeLoadTable table(t);
    const auto req = testing::request(0, 0, {3, 7, 12, 13, 18, 25, 26, 33}, 20);
    const auto tree = comp_forwarding_tree(table, t, req.receivers, req);
    CHECK(tree.size() <= t.node_count() - 1);
    CHECK(tree.terminals.size() == 8);
  }
}
