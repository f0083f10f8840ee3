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

#ifndef IRIS_TREE_SELECTION_HPP
#define IRIS_TREE_SELECTION_HPP

#include <algorithm>
#include <bit>
#include <cstdint>
#include <functional>
#include <limits>
#include <queue>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "iris/topology.hpp"
#include "iris/transfer.hpp"
#include "iris/types.hpp"

namespace iris {

/// Outstanding load per edge, L_e = sum of residual volumes of the trees
/// crossing e divided by the edge's mean available bandwidth B_e.
class EdgeLoadTable {
 public:
  EdgeLoadTable() = default;
  explicit EdgeLoadTable(const Topology& topo) : load_(topo.edge_count(), 0.0), mean_bw_(topo.edge_count()) {
    for (std::size_t i = 0; i < mean_bw_.size(); ++i)
      mean_bw_[i] = topo.mean_bandwidth(EdgeId(static_cast<std::uint32_t>(i)));
  }

  std::size_t size() const { return load_.size(); }
  double load(EdgeId e) const { return load_[e.index()]; }
  double mean_bandwidth(EdgeId e) const { return mean_bw_[e.index()]; }
  std::span<const double> loads() const { return load_; }

  /// W_e = L_e + volume / B_e.
  double weight(EdgeId e, double volume) const { return load_[e.index()] + volume / mean_bw_[e.index()]; }

  /// Schedules `volume` more traffic units over `e`.
  void add_volume(EdgeId e, double volume) { load_[e.index()] += volume / mean_bw_[e.index()]; }

  void clear() { std::fill(load_.begin(), load_.end(), 0.0); }

 private:
  std::vector<double> load_;
  std::vector<double> mean_bw_;
};

inline double edge_weight(const EdgeLoadTable& table, EdgeId e, double volume) { return table.weight(e, volume); }

/// Directed Steiner arborescence rooted at the transfer source.
struct ForwardingTree {
  NodeId root;
  std::vector<NodeId> terminals;  // sorted
  std::vector<EdgeId> edges;      // sorted by id

  std::size_t size() const { return edges.size(); }

  double weight(std::span<const double> edge_weights) const {
    double w = 0.0;
    for (EdgeId e : edges) w += edge_weights[e.index()];
    return w;
  }

  friend bool operator==(const ForwardingTree&, const ForwardingTree&) = default;
};

namespace detail {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

inline std::vector<NodeId> unique_terminals(NodeId root, std::span<const NodeId> terminals) {
  std::vector<NodeId> t;
  for (NodeId n : terminals)
    if (n != root) t.push_back(n);
  std::sort(t.begin(), t.end());
  t.erase(std::unique(t.begin(), t.end()), t.end());
  return t;
}

inline void require_reachable(const Topology& topo, NodeId root, std::span<const NodeId> terminals) {
  std::vector<char> seen(topo.node_count(), 0);
  std::vector<NodeId> stack{root};
  seen[root.index()] = 1;
  while (!stack.empty()) {
    NodeId v = stack.back();
    stack.pop_back();
    for (EdgeId e : topo.out_edges(v)) {
      NodeId w = topo.edge(e).dst;
      if (!seen[w.index()]) {
        seen[w.index()] = 1;
        stack.push_back(w);
      }
    }
  }
  std::string missing;
  for (NodeId t : terminals)
    if (!seen[t.index()]) missing += (missing.empty() ? "" : ", ") + topo.name(t);
  if (!missing.empty()) throw UnreachableError("unreachable from " + topo.name(root) + ": " + missing);
}

/// Multi-source Dijkstra over strictly positive weights. Ties prefer the
/// lower predecessor edge id.
struct ShortestPaths {
  std::vector<double> dist;
  std::vector<std::int64_t> pred;  // edge index or -1

  template <typename Adj, typename Next>
  void run(std::size_t n, std::span<const NodeId> sources, std::span<const double> init, Adj adjacent,
           Next next, std::span<const double> weights) {
    dist.assign(n, kInf);
    pred.assign(n, -1);
    using Item = std::pair<double, std::uint32_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    for (std::size_t i = 0; i < sources.size(); ++i) {
      const auto s = sources[i].index();
      const double d0 = init.empty() ? 0.0 : init[i];
      if (d0 < dist[s]) {
        dist[s] = d0;
        pq.emplace(d0, static_cast<std::uint32_t>(s));
      }
    }
    while (!pq.empty()) {
      auto [d, v] = pq.top();
      pq.pop();
      if (d > dist[v]) continue;
      for (EdgeId e : adjacent(NodeId(v))) {
        const auto w = next(e).index();
        const double nd = d + weights[e.index()];
        const auto eid = static_cast<std::int64_t>(e.index());
        if (nd < dist[w]) {
          dist[w] = nd;
          pred[w] = eid;
          pq.emplace(nd, static_cast<std::uint32_t>(w));
        } else if (nd == dist[w] && pred[w] >= 0 && eid < pred[w]) {
          pred[w] = eid;
        }
      }
    }
  }
};

/// Keeps one parent edge per node reachable from `root` over `edges`, then
/// strips leaves that are not terminals.
inline std::vector<EdgeId> prune_to_arborescence(const Topology& topo, NodeId root, std::vector<EdgeId> edges,
                                                 std::span<const NodeId> terminals) {
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
  const std::size_t n = topo.node_count();
  std::vector<std::vector<EdgeId>> out(n);
  for (EdgeId e : edges) out[topo.edge(e).src.index()].push_back(e);
  std::vector<std::int64_t> parent(n, -1);
  std::vector<char> seen(n, 0);
  std::queue<NodeId> q;
  q.push(root);
  seen[root.index()] = 1;
  while (!q.empty()) {
    NodeId v = q.front();
    q.pop();
    for (EdgeId e : out[v.index()]) {
      NodeId w = topo.edge(e).dst;
      if (seen[w.index()]) continue;
      seen[w.index()] = 1;
      parent[w.index()] = static_cast<std::int64_t>(e.index());
      q.push(w);
    }
  }
  std::vector<char> keep(n, 0);
  for (NodeId t : terminals) {
    NodeId v = t;
    while (v != root && !keep[v.index()]) {
      keep[v.index()] = 1;
      v = topo.edge(EdgeId(static_cast<std::uint32_t>(parent[v.index()]))).src;
    }
  }
  std::vector<EdgeId> result;
  for (std::size_t v = 0; v < n; ++v)
    if (keep[v]) result.push_back(EdgeId(static_cast<std::uint32_t>(parent[v])));
  std::sort(result.begin(), result.end());
  return result;
}

}  // namespace detail

/// Minimum-weight directed Steiner tree, shortest-path heuristic.
///
/// Starting from the root, repeatedly attaches the pending terminal that is
/// closest to the current tree (multi-source Dijkstra from all tree nodes)
/// along its shortest path. Every attached path enters the tree at exactly
/// one node, so the result is an arborescence. Ties go to the lower node
/// id, then to the lower predecessor edge id.
inline ForwardingTree min_weight_steiner(const Topology& topo, std::span<const double> weights, NodeId root,
                                         std::span<const NodeId> terminals) {
  ForwardingTree tree;
  tree.root = root;
  tree.terminals = detail::unique_terminals(root, terminals);
  detail::require_reachable(topo, root, tree.terminals);

  const std::size_t n = topo.node_count();
  std::vector<char> in_tree(n, 0);
  std::vector<NodeId> tree_nodes{root};
  in_tree[root.index()] = 1;
  std::vector<NodeId> pending = tree.terminals;
  detail::ShortestPaths sp;

  while (!pending.empty()) {
    sp.run(
        n, tree_nodes, {}, [&](NodeId v) { return topo.out_edges(v); },
        [&](EdgeId e) { return topo.edge(e).dst; }, weights);
    std::size_t best = 0;
    for (std::size_t i = 1; i < pending.size(); ++i)
      if (sp.dist[pending[i].index()] < sp.dist[pending[best].index()]) best = i;
    NodeId v = pending[best];
    while (!in_tree[v.index()]) {
      const EdgeId e(static_cast<std::uint32_t>(sp.pred[v.index()]));
      tree.edges.push_back(e);
      in_tree[v.index()] = 1;
      tree_nodes.push_back(v);
      v = topo.edge(e).src;
    }
    std::erase_if(pending, [&](NodeId t) { return in_tree[t.index()] != 0; });
  }
  std::sort(tree.edges.begin(), tree.edges.end());
  return tree;
}

/// Exact minimum-weight directed Steiner tree (Dreyfus-Wagner over terminal
/// subsets). Runs in O(3^k |V| + 2^k |E| log |V|) for k terminals.
inline ForwardingTree exact_min_steiner(const Topology& topo, std::span<const double> weights, NodeId root,
                                        std::span<const NodeId> terminals, std::size_t max_terminals = 12) {
  ForwardingTree tree;
  tree.root = root;
  tree.terminals = detail::unique_terminals(root, terminals);
  detail::require_reachable(topo, root, tree.terminals);
  const std::size_t k = tree.terminals.size();
  if (k > max_terminals)
    throw InstanceTooLargeError("exact Steiner tree limited to " + std::to_string(max_terminals) + " terminals");
  if (k == 0) return tree;

  const std::size_t n = topo.node_count();
  const std::size_t full = (std::size_t{1} << k) - 1;
  // choice >= 0: edge index (v -> u, continue at u with the same mask)
  // choice == kSplit: subset split stored in split_of
  // choice == kLeaf: v is the mask's single terminal
  constexpr std::int64_t kLeaf = -1;
  constexpr std::int64_t kSplit = -2;
  std::vector<std::vector<double>> cost(full + 1, std::vector<double>(n, detail::kInf));
  std::vector<std::vector<std::int64_t>> choice(full + 1, std::vector<std::int64_t>(n, kLeaf));
  std::vector<std::vector<std::uint32_t>> split_of(full + 1, std::vector<std::uint32_t>(n, 0));

  std::vector<NodeId> all_nodes(n);
  for (std::size_t i = 0; i < n; ++i) all_nodes[i] = NodeId(static_cast<std::uint32_t>(i));
  detail::ShortestPaths sp;

  for (std::size_t mask = 1; mask <= full; ++mask) {
    auto& c = cost[mask];
    if ((mask & (mask - 1)) == 0) {
      const auto bit = static_cast<std::size_t>(std::countr_zero(mask));
      c[tree.terminals[bit].index()] = 0.0;
    } else {
      const std::size_t low = mask & (~mask + 1);
      for (std::size_t sub = (mask - 1) & mask; sub > 0; sub = (sub - 1) & mask) {
        if (!(sub & low)) continue;
        const auto& a = cost[sub];
        const auto& b = cost[mask ^ sub];
        for (std::size_t v = 0; v < n; ++v) {
          const double s = a[v] + b[v];
          if (s < c[v]) {
            c[v] = s;
            choice[mask][v] = kSplit;
            split_of[mask][v] = static_cast<std::uint32_t>(sub);
          }
        }
      }
    }
    // Relax backwards along edges: cost(v) <= w(v->u) + cost(u).
    sp.run(
        n, all_nodes, c, [&](NodeId v) { return topo.in_edges(v); }, [&](EdgeId e) { return topo.edge(e).src; },
        weights);
    for (std::size_t v = 0; v < n; ++v) {
      if (sp.dist[v] < c[v]) {
        c[v] = sp.dist[v];
        choice[mask][v] = sp.pred[v];
      }
    }
  }

  std::vector<EdgeId> edges;
  std::vector<std::pair<std::size_t, std::size_t>> stack{{full, root.index()}};
  while (!stack.empty()) {
    auto [mask, v] = stack.back();
    stack.pop_back();
    const std::int64_t ch = choice[mask][v];
    if (ch >= 0) {
      const EdgeId e(static_cast<std::uint32_t>(ch));
      edges.push_back(e);
      stack.emplace_back(mask, topo.edge(e).dst.index());
    } else if (ch == kSplit) {
      const std::size_t sub = split_of[mask][v];
      stack.emplace_back(sub, v);
      stack.emplace_back(mask ^ sub, v);
    }
  }
  tree.edges = detail::prune_to_arborescence(topo, root, std::move(edges), tree.terminals);
  return tree;
}

/// Load-aware forwarding tree: weights every edge with
/// W_e = L_e + V_R / B_e and returns the heuristic Steiner tree from the
/// request source. Does not touch the load table.
inline ForwardingTree comp_forwarding_tree(const EdgeLoadTable& loads, const Topology& topo,
                                           std::span<const NodeId> terminals, const TransferRequest& request) {
  std::vector<double> w(topo.edge_count());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = loads.weight(EdgeId(static_cast<std::uint32_t>(i)), request.volume);
  return min_weight_steiner(topo, w, request.source, terminals);
}

inline std::vector<double> unit_weights(const Topology& topo) { return std::vector<double>(topo.edge_count(), 1.0); }

}  // namespace iris

#endif  // IRIS_TREE_SELECTION_HPP
