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

#include <numeric>
#include <random>

#include "support.hpp"

using namespace iris;
using Catch::Approx;

namespace {

std::vector<NodeId> nodes(std::initializer_list<std::uint32_t> l) {
  std::vector<NodeId> v;
  for (auto x : l) v.push_back(NodeId(x));
  return v;
}

std::vector<std::uint32_t> weights_of(std::string_view bits) {
  return weighted_vector(ObjectiveVector::parse(bits)).weights();
}

// Random GEANT request with `n` receivers.
TransferRequest geant_request(std::mt19937_64& rng, const Topology& t, TransferId id, std::size_t n,
                              std::string omega = {}) {
  std::vector<std::uint32_t> all(t.node_count());
  std::iota(all.begin(), all.end(), 0u);
  std::shuffle(all.begin(), all.end(), rng);
  std::vector<std::uint32_t> recv(all.begin() + 1, all.begin() + 1 + static_cast<std::ptrdiff_t>(n));
  std::sort(recv.begin(), recv.end());
  const double volume = std::uniform_real_distribution<double>(2, 200)(rng);
  return testing::request(id, all[0], recv, volume, 0, omega);
}

}  // namespace

TEST_CASE("Weighted objective vector", "[schedulers]") {
  CHECK(weights_of("000100") == std::vector<std::uint32_t>{0, 0, 3, 1, 0, 2});
  CHECK(weights_of("111") == std::vector<std::uint32_t>{1, 1, 1});
  CHECK(weights_of("00") == std::vector<std::uint32_t>{0, 2});
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 10000; ++trial) {
    std::vector<std::uint8_t> bits(std::uniform_int_distribution<std::size_t>(1, 20)(rng));
    for (auto& b : bits) b = static_cast<std::uint8_t>(rng() & 1);
    const auto w = weighted_vector(ObjectiveVector(bits)).weights();
    REQUIRE(std::accumulate(w.begin(), w.end(), 0u) == bits.size());
  }
}

TEST_CASE("Minimum completion time estimates", "[schedulers]") {
  SECTION("single partition on a constant bottleneck") {
    const auto t = testing::TopoBuilder(3).edge(0, 1, 5).edge(1, 2, 8).build();
    EdgeLoadTable loads(t);
    SchedulingContext ctx{t, loads, 0};
    const auto req = testing::request(0, 0, {2}, 10);
    const std::vector<ReceiverSet> parts{{NodeId(2)}};
    CHECK(min_completion_times(parts, req, ctx).completion == std::vector<Timeslot>{2});
  }
  SECTION("edge-disjoint partitions finish as if alone") {
    const auto t = testing::TopoBuilder(3).edge(0, 1, 5).edge(0, 2, 2).build();
    EdgeLoadTable loads(t);
    SchedulingContext ctx{t, loads, 0};
    const auto req = testing::request(0, 0, {1, 2}, 10);
    const std::vector<ReceiverSet> parts{{NodeId(1)}, {NodeId(2)}};
    CHECK(min_completion_times(parts, req, ctx).completion == std::vector<Timeslot>{2, 5});
  }
  SECTION("shared bottleneck splits evenly") {
    const auto t = testing::TopoBuilder(4).edge(0, 1, 4).edge(1, 2, 100).edge(1, 3, 100).build();
    EdgeLoadTable loads(t);
    SchedulingContext ctx{t, loads, 0};
    const auto req = testing::request(0, 0, {2, 3}, 10);
    const std::vector<ReceiverSet> parts{{NodeId(2)}, {NodeId(3)}};
    CHECK(min_completion_times(parts, req, ctx).completion == std::vector<Timeslot>{5, 5});
  }
  SECTION("estimates start after the current timeslot") {
    const auto t = testing::TopoBuilder(2).edge(0, 1, 5).build();
    EdgeLoadTable loads(t);
    SchedulingContext ctx{t, loads, 7};
    const auto req = testing::request(0, 0, {1}, 10, 7);
    const std::vector<ReceiverSet> parts{{NodeId(1)}};
    CHECK(min_completion_times(parts, req, ctx).completion == std::vector<Timeslot>{9});
  }
  SECTION("horizon is enforced") {
    const auto t = testing::TopoBuilder(2).edge(0, 1, 0.001).build();
    EdgeLoadTable loads(t);
    SchedulerOptions opts;
    opts.max_horizon = 100;
    SchedulingContext ctx{t, loads, 0, opts};
    const auto req = testing::request(0, 0, {1}, 10);
    const std::vector<ReceiverSet> parts{{NodeId(1)}};
    CHECK_THROWS_AS(min_completion_times(parts, req, ctx), HorizonExceededError);
  }
}

TEST_CASE("Receiver ranks", "[schedulers]") {
  SECTION("faster downlink ranks first") {
    const auto t = testing::physical_star(10, {1, 5});
    EdgeLoadTable loads(t);
    SchedulingContext ctx{t, loads, 0};
    CHECK(assign_receiver_ranks(testing::request(0, 1, {2, 3}, 10), ctx) == std::vector<std::size_t>{2, 1});
  }
  SECTION("ties follow node ids") {
    const auto t = testing::physical_star(10, {3, 3, 3});
    EdgeLoadTable loads(t);
    SchedulingContext ctx{t, loads, 0};
    CHECK(assign_receiver_ranks(testing::request(0, 1, {4, 2, 3}, 10), ctx) == std::vector<std::size_t>{3, 1, 2});
  }
  SECTION("load pushes a receiver onto a slower route") {
    // 0 -> {1,2,3} on fast links; 3 also reachable over a slow detour via 4.
    const auto t =
        testing::TopoBuilder(5).edge(0, 1, 1).edge(0, 2, 1).edge(0, 3, 1).edge(0, 4, 0.2).edge(4, 3, 0.2).build();
    EdgeLoadTable loads(t);
    const auto req = testing::request(0, 0, {1, 2, 3}, 10);
    SchedulingContext ctx{t, loads, 0};
    CHECK(assign_receiver_ranks(req, ctx) == std::vector<std::size_t>{1, 2, 3});
    loads.add_volume(EdgeId(2), 1000);
    CHECK(assign_receiver_ranks(req, ctx)[2] == 3);
    CHECK(min_completion_times(std::vector<ReceiverSet>{{NodeId(3)}}, req, ctx).completion[0] == 50);
  }
}

TEST_CASE("Base partitions follow the objective vector", "[schedulers]") {
  const auto r = nodes({11, 12, 13, 14});
  CHECK(base_partitions(r, ObjectiveVector::parse("1111")).size() == 4);
  CHECK(base_partitions(r, ObjectiveVector::parse("0000")) == std::vector<ReceiverSet>{nodes({11, 12, 13, 14})});
  CHECK(base_partitions(r, ObjectiveVector::parse("1001")) ==
        std::vector<ReceiverSet>{nodes({11}), nodes({12, 13}), nodes({14})});
  CHECK_THROWS_AS(base_partitions(r, ObjectiveVector::parse("10")), ValidationError);
}

TEST_CASE("Partitioning hierarchy", "[schedulers]") {
  SECTION("ten receivers with a mixed objective") {
    const auto t = load_topology(testing::geant_text(), 2);
    EdgeLoadTable loads(t);
    SchedulingContext ctx{t, loads, 0};
    const auto req = testing::request(0, 4, {0, 2, 7, 9, 12, 13, 18, 25, 26, 31}, 50, 0, "1000101000");
    const auto plan = iris_partition(req, ctx);
    // {r1} {r2 r3 r4} {r5} {r6} {r7} {r8 r9 r10}
    REQUIRE(plan.hierarchy.size() == 6);
    CHECK(plan.hierarchy.front().index == 6);
    CHECK(plan.hierarchy.back().index == 1);
    for (std::size_t i = 1; i < plan.hierarchy.size(); ++i)
      CHECK(plan.hierarchy[i].partitions.size() + 1 == plan.hierarchy[i - 1].partitions.size());
    std::int64_t best = plan.hierarchy.front().weighted_completion_sum;
    for (const auto& l : plan.hierarchy) best = std::min(best, l.weighted_completion_sum);
    CHECK(plan.layer(plan.selected_layer)->weighted_completion_sum == best);
    CHECK(plan.partitions.size() == plan.selected_layer);
  }
  SECTION("single receiver gets one shortest path") {
    const auto t = testing::TopoBuilder(3).edge(0, 1, 1).edge(1, 2, 1).edge(0, 2, 0.1).build();
    EdgeLoadTable loads(t);
    SchedulingContext ctx{t, loads, 0};
    const auto plan = iris_partition(testing::request(0, 0, {2}, 10), ctx);
    REQUIRE(plan.partitions.size() == 1);
    CHECK(plan.partitions[0].tree.edges == std::vector<EdgeId>{EdgeId(0), EdgeId(1)});
  }
  SECTION("physical star matches the isolate sweep") {
    const auto t = testing::physical_star(10, {10, 10, 1, 1});
    EdgeLoadTable loads(t);
    SchedulingContext ctx{t, loads, 0};
    const auto plan = iris_partition(testing::request(0, 1, {2, 3, 4, 5}, 10), ctx);
    const auto sweep = isolate_sweep(StarInstance<double>{10, {10, 10, 1, 1}, 10});
    REQUIRE(plan.partitions.size() == sweep.groups.size());
    CHECK(plan.partitions[0].receivers == nodes({2, 3}));
    CHECK(plan.partitions[1].receivers == nodes({4}));
    CHECK(plan.partitions[2].receivers == nodes({5}));
  }
  SECTION("commit adds the volume to every chosen tree edge") {
    const auto t = load_topology(testing::geant_text(), 4);
    EdgeLoadTable loads(t);
    loads.add_volume(EdgeId(3), 40);
    const auto before = std::vector<double>(loads.loads().begin(), loads.loads().end());
    SchedulingContext ctx{t, loads, 0};
    std::mt19937_64 rng(1);
    const auto req = geant_request(rng, t, 0, 8);
    const auto plan = iris_partition(req, ctx);
    std::vector<double> expected = before;
    for (const auto& p : plan.partitions)
      for (EdgeId e : p.tree.edges) expected[e.index()] += req.volume / t.mean_bandwidth(e);
    for (std::size_t i = 0; i < expected.size(); ++i) REQUIRE(loads.loads()[i] == Approx(expected[i]));
  }
}

TEST_CASE("Hierarchy dominance and bandwidth trend on GEANT", "[schedulers]") {
  const auto t = load_topology(testing::geant_text(), 9);
  std::mt19937_64 rng(10);
  EdgeLoadTable loads(t);
  std::size_t non_monotone = 0;
  for (TransferId id = 0; id < 40; ++id) {
    SchedulingContext ctx{t, loads, static_cast<Timeslot>(id)};
    const auto req = geant_request(rng, t, id, 1 + id % 12);
    const auto plan = iris_partition(req, ctx);
    const auto& chosen = *plan.layer(plan.selected_layer);
    REQUIRE(chosen.weighted_completion_sum <= plan.layer(1)->weighted_completion_sum);
    REQUIRE(chosen.weighted_completion_sum <= plan.hierarchy.front().weighted_completion_sum);
    for (std::size_t i = 1; i < plan.hierarchy.size(); ++i)
      if (plan.hierarchy[i].tree_edges > plan.hierarchy[i - 1].tree_edges) ++non_monotone;
  }
  WARN("layers whose merge increased total tree edges: " << non_monotone);
}

TEST_CASE("Baseline schedulers", "[schedulers]") {
  SECTION("unicast uses one hop-count shortest path per receiver") {
    const auto t = testing::physical_star(1, {1, 1, 1});
    EdgeLoadTable loads(t);
    SchedulingContext ctx{t, loads, 0};
    const auto plan = unicast_shortest_partition(testing::request(0, 1, {2, 3, 4}, 6), ctx);
    REQUIRE(plan.partitions.size() == 3);
    for (const auto& p : plan.partitions) CHECK(p.tree.size() == 2);
    CHECK(loads.load(EdgeId(0)) == Approx(18));
  }
  SECTION("single tree over a whole star is the star") {
    const auto t = testing::TopoBuilder(4).link(0, 1, 1).link(0, 2, 1).link(0, 3, 1).build();
    EdgeLoadTable loads(t);
    SchedulingContext ctx{t, loads, 0};
    const auto req = testing::request(0, 0, {1, 2, 3}, 5);
    CHECK(single_tree_partition(req, ctx, SingleTreeMode::Static).partitions[0].tree.size() == 3);
  }
  SECTION("static tree never has more edges than the load-aware tree") {
    const auto t = load_topology(testing::geant_text(), 12);
    std::mt19937_64 rng(12);
    EdgeLoadTable loads(t);
    for (TransferId id = 0; id < 60; ++id) {
      SchedulingContext ctx{t, loads, 0};
      const auto req = geant_request(rng, t, id, 1 + id % 10);
      EdgeLoadTable scratch = loads;
      SchedulingContext sctx{t, scratch, 0};
      const auto st = single_tree_partition(req, sctx, SingleTreeMode::Static);
      const auto la = single_tree_partition(req, ctx, SingleTreeMode::LoadAware);
      REQUIRE(st.partitions[0].tree.size() <= la.partitions[0].tree.size());
    }
  }
  SECTION("unicast bandwidth is at least the minimum Steiner tree") {
    const auto t = load_topology(testing::geant_text(), 13);
    std::mt19937_64 rng(13);
    for (TransferId id = 0; id < 30; ++id) {
      EdgeLoadTable loads(t);
      SchedulingContext ctx{t, loads, 0};
      const auto req = geant_request(rng, t, id, 1 + id % 8);
      std::size_t unicast_edges = 0;
      for (const auto& p : unicast_shortest_partition(req, ctx).partitions) unicast_edges += p.tree.size();
      const auto steiner = exact_min_steiner(t, unit_weights(t), req.source, req.receivers);
      REQUIRE(unicast_edges >= steiner.size());
    }
  }
  SECTION("fast/slow split on a star") {
    const auto t = testing::physical_star(10, {10, 10, 1, 1});
    EdgeLoadTable loads(t);
    SchedulingContext ctx{t, loads, 0};
    const auto plan = quickcast_like_partition(testing::request(0, 1, {2, 3, 4, 5}, 10), ctx);
    REQUIRE(plan.partitions.size() == 2);
    CHECK(plan.partitions[0].receivers == nodes({2, 3}));
    CHECK(plan.partitions[1].receivers == nodes({4, 5}));
  }
  SECTION("fast/slow split keeps a single receiver on one path") {
    const auto t = testing::TopoBuilder(3).edge(0, 1, 1).edge(1, 2, 1).build();
    EdgeLoadTable loads(t);
    SchedulingContext ctx{t, loads, 0};
    const auto plan = quickcast_like_partition(testing::request(0, 0, {2}, 10), ctx);
    REQUIRE(plan.partitions.size() == 1);
    CHECK(plan.partitions[0].tree.size() == 2);
  }
  SECTION("schedulers by name") {
    for (auto name : kSchedulerNames) CHECK(make_scheduler(name)->name() == name);
    CHECK_THROWS_AS(make_scheduler("bogus"), ValidationError);
  }
}
