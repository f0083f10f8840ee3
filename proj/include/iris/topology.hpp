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

#ifndef IRIS_TOPOLOGY_HPP
#define IRIS_TOPOLOGY_HPP

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "iris/types.hpp"

namespace iris {

/// Periodic background (user) traffic occupying a fraction of a link.
///
/// The fraction follows a symmetric triangular wave: it sits at
/// `floor_fraction` when `(t + phase) % period == 0`, climbs linearly to
/// `peak_fraction` at half period and falls back again.
struct UserTrafficProfile {
  static constexpr double kDefaultFloor = 0.05;
  static constexpr double kDefaultPeak = 0.30;
  static constexpr int kMinPeriod = 10;
  static constexpr int kMaxPeriod = 100;

  int period = kMinPeriod;
  int phase = 0;
  double peak_fraction = kDefaultPeak;
  double floor_fraction = kDefaultFloor;

  double fraction(Timeslot t) const {
    const auto p = static_cast<Timeslot>(period);
    Timeslot k = (t + phase) % p;
    if (k < 0) k += p;
    const double u = static_cast<double>(k) / static_cast<double>(p);
    const double tri = 1.0 - std::abs(2.0 * u - 1.0);
    return floor_fraction + (peak_fraction - floor_fraction) * tri;
  }

  // Continuous mean of the wave over one period.
  double mean_fraction() const { return 0.5 * (floor_fraction + peak_fraction); }

  static UserTrafficProfile constant(double fraction) {
    return UserTrafficProfile{kMinPeriod, 0, fraction, fraction};
  }
};

/// Capacity-weighted blend of user-traffic waves. Physical links carry a
/// single component; aggregated links carry one per merged link.
class TrafficMix {
 public:
  struct Component {
    double weight = 1.0;
    UserTrafficProfile profile;
  };

  TrafficMix() : components_{Component{}} {}
  explicit TrafficMix(UserTrafficProfile p) : components_{Component{1.0, p}} {}
  explicit TrafficMix(std::vector<Component> components)
      : components_(std::move(components)) {}

  double fraction(Timeslot t) const {
    if (components_.size() == 1) return components_.front().profile.fraction(t);
    double f = 0.0;
    for (const auto& c : components_) f += c.weight * c.profile.fraction(t);
    return f;
  }

  double mean_fraction() const {
    double f = 0.0;
    for (const auto& c : components_) f += c.weight * c.profile.mean_fraction();
    return f;
  }

  /// Least common multiple of the component periods.
  Timeslot period() const {
    Timeslot p = 1;
    for (const auto& c : components_) p = std::lcm(p, static_cast<Timeslot>(c.profile.period));
    return p;
  }

  std::span<const Component> components() const { return components_; }

 private:
  std::vector<Component> components_;
};

struct Edge {
  EdgeId id;
  NodeId src;
  NodeId dst;
  double capacity = 0.0;  // traffic units per timeslot
  TrafficMix user_traffic;
};

/// Directed capacitated graph of datacenters and WAN links.
class Topology {
 public:
  Topology() = default;

  Topology(std::vector<std::string> node_names, std::vector<Edge> edges)
      : names_(std::move(node_names)), edges_(std::move(edges)) {
    validate();
    index();
  }

  std::size_t node_count() const { return names_.size(); }
  std::size_t edge_count() const { return edges_.size(); }

  std::span<const Edge> edges() const { return edges_; }
  const Edge& edge(EdgeId e) const { return edges_[e.index()]; }
  const std::string& name(NodeId n) const { return names_[n.index()]; }
  std::span<const std::string> names() const { return names_; }

  std::optional<NodeId> find(std::string_view name) const {
    auto it = by_name_.find(std::string(name));
    if (it == by_name_.end()) return std::nullopt;
    return it->second;
  }

  NodeId node(std::string_view name) const {
    auto n = find(name);
    if (!n) throw ValidationError("unknown node '" + std::string(name) + "'");
    return *n;
  }

  std::span<const EdgeId> out_edges(NodeId n) const { return out_[n.index()]; }
  std::span<const EdgeId> in_edges(NodeId n) const { return in_[n.index()]; }

  /// B_e: mean available bandwidth of `e`, traffic units per timeslot.
  double mean_bandwidth(EdgeId e) const { return mean_bw_[e.index()]; }

  /// B_e(t): available bandwidth of `e` at timeslot `t`.
  double bandwidth(EdgeId e, Timeslot t) const {
    const Edge& ed = edges_[e.index()];
    return ed.capacity * (1.0 - ed.user_traffic.fraction(t));
  }

  double max_capacity() const {
    double m = 0.0;
    for (const auto& e : edges_) m = std::max(m, e.capacity);
    return m;
  }

  /// Copy with each edge's user traffic replaced.
  Topology with_user_traffic(std::span<const TrafficMix> mixes) const {
    std::vector<Edge> edges = edges_;
    for (std::size_t i = 0; i < edges.size(); ++i) edges[i].user_traffic = mixes[i];
    return Topology(names_, std::move(edges));
  }

 private:
  void validate() const {
    std::unordered_map<std::string, std::size_t> seen;
    for (std::size_t i = 0; i < names_.size(); ++i) {
      if (names_[i].empty()) throw ValidationError("node " + std::to_string(i) + " has an empty name");
      if (!seen.emplace(names_[i], i).second)
        throw ValidationError("duplicate node '" + names_[i] + "'");
    }
    for (std::size_t i = 0; i < edges_.size(); ++i) {
      const Edge& e = edges_[i];
      const std::string label = "edge " + std::to_string(i);
      if (e.id.index() != i) throw ValidationError(label + " has a mismatched id");
      if (e.src.index() >= names_.size() || e.dst.index() >= names_.size())
        throw ValidationError(label + " references an unknown node");
      if (e.src == e.dst) throw ValidationError(label + " is a self-loop at '" + names_[e.src.index()] + "'");
      if (!(e.capacity > 0.0) || !std::isfinite(e.capacity))
        throw ValidationError(label + " (" + names_[e.src.index()] + "->" + names_[e.dst.index()] +
                              ") has non-positive capacity");
    }
  }

  void index() {
    out_.assign(names_.size(), {});
    in_.assign(names_.size(), {});
    mean_bw_.resize(edges_.size());
    for (const auto& e : edges_) {
      out_[e.src.index()].push_back(e.id);
      in_[e.dst.index()].push_back(e.id);
      mean_bw_[e.id.index()] = e.capacity * (1.0 - e.user_traffic.mean_fraction());
    }
    for (std::size_t i = 0; i < names_.size(); ++i) by_name_.emplace(names_[i], NodeId(static_cast<std::uint32_t>(i)));
  }

  std::vector<std::string> names_;
  std::vector<Edge> edges_;
  std::vector<std::vector<EdgeId>> out_;
  std::vector<std::vector<EdgeId>> in_;
  std::vector<double> mean_bw_;
  std::unordered_map<std::string, NodeId> by_name_;
};

inline double available_bandwidth(const Topology& topo, EdgeId e, Timeslot t) { return topo.bandwidth(e, t); }

inline double mean_available_bandwidth(const Topology& topo, EdgeId e) { return topo.mean_bandwidth(e); }

/// Draws one triangular user-traffic wave per edge: period uniform in
/// [10, 100], phase uniform in [0, period).
inline Topology randomize_user_traffic(const Topology& topo, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> period_dist(UserTrafficProfile::kMinPeriod, UserTrafficProfile::kMaxPeriod);
  std::vector<TrafficMix> mixes;
  mixes.reserve(topo.edge_count());
  for (std::size_t i = 0; i < topo.edge_count(); ++i) {
    UserTrafficProfile p;
    p.period = period_dist(rng);
    p.phase = std::uniform_int_distribution<int>(0, p.period - 1)(rng);
    mixes.emplace_back(p);
  }
  return topo.with_user_traffic(mixes);
}

/// Parses the topology document
/// `{"nodes":[..], "edges":[{"src":..,"dst":..,"gbps":..}], "directed":bool}`.
///
/// Links are expanded into two directed edges unless the document or the
/// link sets `"directed": true`. Capacities are normalized so the fastest
/// edge carries 1.0 traffic unit per timeslot. User traffic is drawn with
/// `randomize_user_traffic(.., traffic_seed)`.
inline Topology load_topology(std::string_view text, std::uint64_t traffic_seed = 0) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("topology: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("nodes") || !doc.contains("edges") || !doc["nodes"].is_array() ||
      !doc["edges"].is_array())
    throw ParseError("topology: expected an object with 'nodes' and 'edges' arrays");

  std::vector<std::string> names;
  std::unordered_map<std::string, std::uint32_t> ids;
  for (const auto& n : doc["nodes"]) {
    if (!n.is_string()) throw ParseError("topology: node names must be strings");
    auto name = n.get<std::string>();
    if (!ids.emplace(name, static_cast<std::uint32_t>(names.size())).second)
      throw ValidationError("topology: duplicate node '" + name + "'");
    names.push_back(std::move(name));
  }

  const bool all_directed = doc.value("directed", false);
  struct Raw {
    std::uint32_t src, dst;
    double gbps;
  };
  std::vector<Raw> raw;
  std::size_t link_index = 0;
  for (const auto& l : doc["edges"]) {
    const std::string label = "topology: edge " + std::to_string(link_index++);
    if (!l.is_object() || !l.contains("src") || !l.contains("dst") || !l.contains("gbps"))
      throw ParseError(label + " needs 'src', 'dst' and 'gbps'");
    if (!l["src"].is_string() || !l["dst"].is_string() || !l["gbps"].is_number())
      throw ParseError(label + " has fields of the wrong type");
    const auto src = l["src"].get<std::string>();
    const auto dst = l["dst"].get<std::string>();
    const double gbps = l["gbps"].get<double>();
    auto s = ids.find(src);
    auto d = ids.find(dst);
    if (s == ids.end()) throw ValidationError(label + " references unknown node '" + src + "'");
    if (d == ids.end()) throw ValidationError(label + " references unknown node '" + dst + "'");
    if (s->second == d->second) throw ValidationError(label + " is a self-loop at '" + src + "'");
    if (!(gbps > 0.0) || !std::isfinite(gbps))
      throw ValidationError(label + " (" + src + "-" + dst + ") has non-positive capacity");
    raw.push_back({s->second, d->second, gbps});
    if (!(all_directed || l.value("directed", false))) raw.push_back({d->second, s->second, gbps});
  }

  double max_gbps = 0.0;
  for (const auto& r : raw) max_gbps = std::max(max_gbps, r.gbps);

  std::vector<Edge> edges;
  edges.reserve(raw.size());
  for (const auto& r : raw) {
    Edge e;
    e.id = EdgeId(static_cast<std::uint32_t>(edges.size()));
    e.src = NodeId(r.src);
    e.dst = NodeId(r.dst);
    // Divide, then pin the fastest links to exactly 1.0.
    e.capacity = r.gbps == max_gbps ? 1.0 : r.gbps / max_gbps;
    edges.push_back(e);
  }
  return randomize_user_traffic(Topology(std::move(names), std::move(edges)), traffic_seed);
}

/// Star relaxation of a topology.
///
/// The result keeps every original node id and appends a hub node. Each
/// node with outgoing links gets one uplink (node -> hub) whose capacity is
/// the sum of its outgoing capacities; each node with incoming links gets
/// one downlink (hub -> node) summing its incoming capacities. User traffic
/// of the merged links is blended with capacity weights, so the aggregate
/// available bandwidth equals the sum of the members' at every timeslot.
class AggregateTopology {
 public:
  explicit AggregateTopology(const Topology& physical) {
    const std::size_t n = physical.node_count();
    std::vector<std::string> names(physical.names().begin(), physical.names().end());
    std::string hub = "__hub__";
    while (physical.find(hub)) hub += "_";
    names.push_back(hub);
    hub_ = NodeId(static_cast<std::uint32_t>(n));
    uplink_.assign(n, std::nullopt);
    downlink_.assign(n, std::nullopt);

    std::vector<Edge> edges;
    auto merge = [&](std::span<const EdgeId> members, NodeId src, NodeId dst) -> std::optional<EdgeId> {
      double cap = 0.0;
      for (EdgeId e : members) cap += physical.edge(e).capacity;
      if (members.empty() || !(cap > 0.0)) return std::nullopt;
      std::vector<TrafficMix::Component> comps;
      for (EdgeId e : members) {
        const Edge& pe = physical.edge(e);
        for (const auto& c : pe.user_traffic.components())
          comps.push_back({c.weight * pe.capacity / cap, c.profile});
      }
      Edge agg;
      agg.id = EdgeId(static_cast<std::uint32_t>(edges.size()));
      agg.src = src;
      agg.dst = dst;
      agg.capacity = cap;
      agg.user_traffic = TrafficMix(std::move(comps));
      edges.push_back(std::move(agg));
      return edges.back().id;
    };
    for (std::size_t i = 0; i < n; ++i) {
      const NodeId v(static_cast<std::uint32_t>(i));
      uplink_[i] = merge(physical.out_edges(v), v, hub_);
      downlink_[i] = merge(physical.in_edges(v), hub_, v);
    }
    topology_ = Topology(std::move(names), std::move(edges));
  }

  const Topology& topology() const { return topology_; }
  NodeId hub() const { return hub_; }
  std::optional<EdgeId> uplink(NodeId n) const { return uplink_[n.index()]; }
  std::optional<EdgeId> downlink(NodeId n) const { return downlink_[n.index()]; }

 private:
  Topology topology_;
  NodeId hub_;
  std::vector<std::optional<EdgeId>> uplink_;
  std::vector<std::optional<EdgeId>> downlink_;
};

inline Topology aggregate_topology(const Topology& topo) { return AggregateTopology(topo).topology(); }

}  // namespace iris

#endif  // IRIS_TOPOLOGY_HPP
