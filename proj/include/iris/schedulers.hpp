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

#ifndef IRIS_SCHEDULERS_HPP
#define IRIS_SCHEDULERS_HPP

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "iris/rate_allocation.hpp"
#include "iris/topology.hpp"
#include "iris/transfer.hpp"
#include "iris/tree_selection.hpp"
#include "iris/types.hpp"

namespace iris {

/// Objective vector with every run of zeros collapsed onto its last
/// position: {0,0,0,1,0,0} becomes {0,0,3,1,0,2}.
class WeightedObjectiveVector {
 public:
  explicit WeightedObjectiveVector(const ObjectiveVector& omega) : weights_(omega.size(), 0) {
    std::uint32_t run = 0;
    for (std::size_t i = 0; i < omega.size(); ++i) {
      if (omega[i]) {
        weights_[i] = 1;
        run = 0;
        continue;
      }
      ++run;
      if (i + 1 == omega.size() || omega[i + 1]) weights_[i] = run;
    }
  }

  const std::vector<std::uint32_t>& weights() const { return weights_; }
  std::size_t size() const { return weights_.size(); }
  std::uint32_t operator[](std::size_t i) const { return weights_[i]; }

 private:
  std::vector<std::uint32_t> weights_;
};

inline WeightedObjectiveVector weighted_vector(const ObjectiveVector& omega) { return WeightedObjectiveVector(omega); }

using ReceiverSet = std::vector<NodeId>;

struct Partition {
  ReceiverSet receivers;  // rank order
  ForwardingTree tree;
  double residual = 0.0;
};

/// One candidate partitioning examined while building the hierarchy.
struct HierarchyLayer {
  std::size_t index = 0;  // number of partitions
  std::vector<ReceiverSet> partitions;
  std::vector<Timeslot> completion;  // estimated finishing timeslot per partition
  std::int64_t weighted_completion_sum = 0;  // sum of |P| * completion
  double mean_completion = 0.0;              // weighted_completion_sum / |D_R|
  double total_weight = 0.0;                 // sum of W_e over every tree
  std::size_t tree_edges = 0;                // sum of |T_P|
};

struct PartitionPlan {
  TransferId transfer = 0;
  std::vector<Partition> partitions;
  std::size_t selected_layer = 0;  // zero when the scheduler builds no hierarchy
  std::vector<HierarchyLayer> hierarchy;  // ordered from the base layer upward

  const HierarchyLayer* layer(std::size_t index) const {
    for (const auto& l : hierarchy)
      if (l.index == index) return &l;
    return nullptr;
  }
};

struct SchedulerOptions {
  Timeslot max_horizon = 1'000'000;
  // The static single tree is solved exactly up to this many receivers.
  std::size_t exact_static_terminals = 10;
};

/// Everything a scheduler may read, plus the load table it commits to.
struct SchedulingContext {
  const Topology& topology;
  EdgeLoadTable& loads;
  Timeslot now = 0;
  SchedulerOptions options{};
};

struct CompletionEstimate {
  std::vector<ForwardingTree> trees;
  std::vector<Timeslot> completion;
};

/// Runs the given trees forward from `now + 1` as if they were the only
/// traffic on the network, sharing B_e(t) max-min fairly every timeslot,
/// and reports the timeslot in which each tree delivers `volume`.
inline std::vector<Timeslot> estimate_completion(std::span<const ForwardingTree> trees, double volume,
                                                 const Topology& topo, Timeslot now, Timeslot horizon) {
  constexpr double kDone = 1e-9;
  const std::size_t p = trees.size();
  std::vector<Timeslot> kappa(p, 0);
  if (p == 0) return kappa;

  std::vector<double> remaining(p, volume);
  std::vector<std::size_t> active(p);
  std::iota(active.begin(), active.end(), std::size_t{0});

  std::vector<std::uint32_t> users(topo.edge_count(), 0);
  std::vector<EdgeId> used;
  std::size_t shared = 0;
  for (const auto& t : trees)
    for (EdgeId e : t.edges) {
      auto& u = users[e.index()];
      if (u == 0) used.push_back(e);
      if (++u == 2) ++shared;
    }

  std::vector<double> bw(topo.edge_count(), 0.0);
  std::vector<TreeDemand> demands;
  std::vector<double> rates;
  MaxMinSolver solver;

  for (Timeslot t = now + 1; !active.empty(); ++t) {
    if (t - now > horizon)
      throw HorizonExceededError("completion estimate did not converge within " + std::to_string(horizon) +
                                 " timeslots");
    for (EdgeId e : used)
      if (users[e.index()] > 0) bw[e.index()] = topo.bandwidth(e, t);

    rates.assign(active.size(), 0.0);
    if (shared == 0) {
      // Disjoint trees: each runs at its own bottleneck.
      for (std::size_t k = 0; k < active.size(); ++k) {
        double r = remaining[active[k]] / kTimeslotLength;
        for (EdgeId e : trees[active[k]].edges) r = std::min(r, bw[e.index()]);
        rates[k] = r;
      }
    } else {
      demands.clear();
      for (std::size_t i : active) demands.push_back({trees[i].edges, remaining[i] / kTimeslotLength});
      solver.solve(demands, bw, rates);
    }

    std::size_t kept = 0;
    for (std::size_t k = 0; k < active.size(); ++k) {
      const std::size_t i = active[k];
      remaining[i] -= kTimeslotLength * rates[k];
      if (remaining[i] <= kDone) {
        kappa[i] = t;
        for (EdgeId e : trees[i].edges)
          if (users[e.index()]-- == 2) --shared;
      } else {
        active[kept++] = i;
      }
    }
    active.resize(kept);
  }
  return kappa;
}

/// Minimum completion times: one load-aware tree per partition, then the
/// completion estimate above. Leaves the load table untouched.
inline CompletionEstimate min_completion_times(std::span<const ReceiverSet> partitions,
                                               const TransferRequest& request, const SchedulingContext& ctx) {
  CompletionEstimate est;
  for (const auto& p : partitions) est.trees.push_back(comp_forwarding_tree(ctx.loads, ctx.topology, p, request));
  est.completion =
      estimate_completion(est.trees, request.volume, ctx.topology, ctx.now, ctx.options.max_horizon);
  return est;
}

/// Receivers ordered fastest first, by the completion they would reach as
/// singleton partitions; ties by node id.
inline std::vector<NodeId> rank_receivers(const TransferRequest& request, const SchedulingContext& ctx) {
  std::vector<ReceiverSet> singles;
  for (NodeId r : request.receivers) singles.push_back({r});
  const auto est = min_completion_times(singles, request, ctx);
  std::vector<std::size_t> order(singles.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (est.completion[a] != est.completion[b]) return est.completion[a] < est.completion[b];
    return request.receivers[a] < request.receivers[b];
  });
  std::vector<NodeId> ranked;
  for (std::size_t i : order) ranked.push_back(request.receivers[i]);
  return ranked;
}

/// Rank (1 = fastest) of each receiver, aligned with `request.receivers`.
inline std::vector<std::size_t> assign_receiver_ranks(const TransferRequest& request, const SchedulingContext& ctx) {
  const auto ranked = rank_receivers(request, ctx);
  std::vector<std::size_t> rank(request.receivers.size());
  for (std::size_t i = 0; i < request.receivers.size(); ++i)
    rank[i] = static_cast<std::size_t>(std::find(ranked.begin(), ranked.end(), request.receivers[i]) - ranked.begin()) + 1;
  return rank;
}

/// Initial partitions: receivers whose rank bit is one stand alone, each
/// maximal run of zero bits forms one group. Output follows rank order.
inline std::vector<ReceiverSet> base_partitions(std::span<const NodeId> ranked, const ObjectiveVector& omega) {
  if (omega.size() != ranked.size())
    throw ValidationError("objective vector length does not match the number of receivers");
  std::vector<ReceiverSet> parts;
  bool in_run = false;
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    if (omega[i]) {
      parts.push_back({ranked[i]});
      in_run = false;
    } else {
      if (!in_run) parts.emplace_back();
      parts.back().push_back(ranked[i]);
      in_run = true;
    }
  }
  return parts;
}

namespace detail {

/// Memoizes trees per receiver set; valid while the load table is unchanged.
class TreeCache {
 public:
  TreeCache(const TransferRequest& request, const SchedulingContext& ctx) : request_(request), ctx_(ctx) {}

  const ForwardingTree& get(const ReceiverSet& p) {
    ReceiverSet key = p;
    std::sort(key.begin(), key.end());
    auto it = cache_.find(key);
    if (it == cache_.end())
      it = cache_.emplace(key, comp_forwarding_tree(ctx_.loads, ctx_.topology, p, request_)).first;
    return it->second;
  }

 private:
  const TransferRequest& request_;
  const SchedulingContext& ctx_;
  std::map<ReceiverSet, ForwardingTree> cache_;
};

inline HierarchyLayer evaluate_layer(std::vector<ReceiverSet> parts, const TransferRequest& request,
                                     const SchedulingContext& ctx, TreeCache& cache,
                                     std::span<const double> weights) {
  HierarchyLayer layer;
  layer.index = parts.size();
  std::vector<ForwardingTree> trees;
  for (const auto& p : parts) trees.push_back(cache.get(p));
  layer.completion = estimate_completion(trees, request.volume, ctx.topology, ctx.now, ctx.options.max_horizon);
  for (std::size_t i = 0; i < parts.size(); ++i) {
    layer.weighted_completion_sum += static_cast<std::int64_t>(parts[i].size()) * layer.completion[i];
    layer.total_weight += trees[i].weight(weights);
    layer.tree_edges += trees[i].size();
  }
  layer.mean_completion =
      static_cast<double>(layer.weighted_completion_sum) / static_cast<double>(request.receivers.size());
  layer.partitions = std::move(parts);
  return layer;
}

// Lowest mean completion, then lowest total tree weight, then fewer
// partitions.
inline std::size_t select_layer(std::span<const HierarchyLayer> layers) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < layers.size(); ++i) {
    const auto& a = layers[i];
    const auto& b = layers[best];
    if (a.weighted_completion_sum != b.weighted_completion_sum) {
      if (a.weighted_completion_sum < b.weighted_completion_sum) best = i;
    } else if (a.total_weight != b.total_weight) {
      if (a.total_weight < b.total_weight) best = i;
    } else if (a.index < b.index) {
      best = i;
    }
  }
  return best;
}

inline std::vector<double> current_weights(const SchedulingContext& ctx, double volume) {
  std::vector<double> w(ctx.topology.edge_count());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = ctx.loads.weight(EdgeId(static_cast<std::uint32_t>(i)), volume);
  return w;
}

inline void commit_fixed(std::vector<Partition>& parts, const TransferRequest& request, SchedulingContext& ctx) {
  for (auto& p : parts) {
    p.residual = request.volume;
    for (EdgeId e : p.tree.edges) ctx.loads.add_volume(e, request.volume);
  }
}

/// Charges the chosen layer's trees, as evaluated, with V_R / B_e.
inline std::vector<Partition> commit_layer(const std::vector<ReceiverSet>& parts, const TransferRequest& request,
                                           SchedulingContext& ctx, TreeCache& cache) {
  std::vector<Partition> out;
  for (const auto& p : parts) out.push_back({p, cache.get(p), 0.0});
  commit_fixed(out, request, ctx);
  return out;
}

}  // namespace detail

/// Receiver partitioning and tree selection for one transfer.
///
/// Ranks the receivers, forms the base partitions from the objective vector
/// and merges the two fastest partitions repeatedly until one remains. Each
/// layer is scored by the receiver-weighted mean of its estimated partition
/// completion times; the best layer wins (ties: lower total tree weight).
/// The winning layer's trees are then committed to the load table.
inline PartitionPlan iris_partition(const TransferRequest& request, SchedulingContext& ctx) {
  const auto ranked = rank_receivers(request, ctx);
  auto parts = base_partitions(ranked, request.objective);
  const auto weights = detail::current_weights(ctx, request.volume);
  detail::TreeCache cache(request, ctx);

  PartitionPlan plan;
  plan.transfer = request.id;
  while (true) {
    plan.hierarchy.push_back(detail::evaluate_layer(parts, request, ctx, cache, weights));
    if (parts.size() == 1) break;
    ReceiverSet merged = parts[0];
    merged.insert(merged.end(), parts[1].begin(), parts[1].end());
    parts.erase(parts.begin());
    parts.front() = std::move(merged);
  }
  const auto& chosen = plan.hierarchy[detail::select_layer(plan.hierarchy)];
  plan.selected_layer = chosen.index;
  plan.partitions = detail::commit_layer(chosen.partitions, request, ctx, cache);
  return plan;
}

/// Fast/slow split in the spirit of QuickCast: the single tree or any split
/// of the ranked receivers into a fast prefix and a slow suffix.
inline PartitionPlan quickcast_like_partition(const TransferRequest& request, SchedulingContext& ctx) {
  const auto ranked = rank_receivers(request, ctx);
  const auto weights = detail::current_weights(ctx, request.volume);
  detail::TreeCache cache(request, ctx);

  PartitionPlan plan;
  plan.transfer = request.id;
  plan.hierarchy.push_back(
      detail::evaluate_layer({ReceiverSet(ranked.begin(), ranked.end())}, request, ctx, cache, weights));
  for (std::size_t k = 1; k < ranked.size(); ++k) {
    std::vector<ReceiverSet> split{ReceiverSet(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(k)),
                                   ReceiverSet(ranked.begin() + static_cast<std::ptrdiff_t>(k), ranked.end())};
    plan.hierarchy.push_back(detail::evaluate_layer(std::move(split), request, ctx, cache, weights));
  }
  const auto& chosen = plan.hierarchy[detail::select_layer(plan.hierarchy)];
  plan.selected_layer = chosen.index;
  plan.partitions = detail::commit_layer(chosen.partitions, request, ctx, cache);
  return plan;
}

/// One hop-count shortest path per receiver.
inline PartitionPlan unicast_shortest_partition(const TransferRequest& request, SchedulingContext& ctx) {
  const auto unit = unit_weights(ctx.topology);
  PartitionPlan plan;
  plan.transfer = request.id;
  for (NodeId r : request.receivers) {
    const NodeId t[] = {r};
    plan.partitions.push_back({{r}, min_weight_steiner(ctx.topology, unit, request.source, t), 0.0});
  }
  detail::commit_fixed(plan.partitions, request, ctx);
  return plan;
}

enum class SingleTreeMode { Static, LoadAware };

/// All receivers on one tree. Static mode minimizes the edge count; load
/// aware mode uses the W_e weights.
inline PartitionPlan single_tree_partition(const TransferRequest& request, SchedulingContext& ctx,
                                           SingleTreeMode mode) {
  PartitionPlan plan;
  plan.transfer = request.id;
  Partition part;
  part.receivers = request.receivers;
  if (mode == SingleTreeMode::Static) {
    const auto unit = unit_weights(ctx.topology);
    part.tree = request.receivers.size() <= ctx.options.exact_static_terminals
                    ? exact_min_steiner(ctx.topology, unit, request.source, request.receivers,
                                        ctx.options.exact_static_terminals)
                    : min_weight_steiner(ctx.topology, unit, request.source, request.receivers);
  } else {
    part.tree = comp_forwarding_tree(ctx.loads, ctx.topology, request.receivers, request);
  }
  plan.partitions.push_back(std::move(part));
  detail::commit_fixed(plan.partitions, request, ctx);
  return plan;
}

/// Common interface consumed by the simulation engine.
class Scheduler {
 public:
  virtual ~Scheduler() = default;
  virtual std::string_view name() const = 0;
  virtual PartitionPlan plan(const TransferRequest& request, SchedulingContext& ctx) const = 0;
};

class IrisScheduler final : public Scheduler {
 public:
  std::string_view name() const override { return "iris"; }
  PartitionPlan plan(const TransferRequest& r, SchedulingContext& ctx) const override { return iris_partition(r, ctx); }
};

class UnicastShortestScheduler final : public Scheduler {
 public:
  std::string_view name() const override { return "unicast-sp"; }
  PartitionPlan plan(const TransferRequest& r, SchedulingContext& ctx) const override {
    return unicast_shortest_partition(r, ctx);
  }
};

class SingleTreeScheduler final : public Scheduler {
 public:
  explicit SingleTreeScheduler(SingleTreeMode mode) : mode_(mode) {}
  std::string_view name() const override {
    return mode_ == SingleTreeMode::Static ? "single-tree-static" : "single-tree-load-aware";
  }
  PartitionPlan plan(const TransferRequest& r, SchedulingContext& ctx) const override {
    return single_tree_partition(r, ctx, mode_);
  }

 private:
  SingleTreeMode mode_;
};

class QuickcastLikeScheduler final : public Scheduler {
 public:
  std::string_view name() const override { return "quickcast-like"; }
  PartitionPlan plan(const TransferRequest& r, SchedulingContext& ctx) const override {
    return quickcast_like_partition(r, ctx);
  }
};

inline constexpr std::string_view kSchedulerNames[] = {"iris", "unicast-sp", "single-tree-static",
                                                       "single-tree-load-aware", "quickcast-like"};

inline std::unique_ptr<Scheduler> make_scheduler(std::string_view name) {
  if (name == "iris") return std::make_unique<IrisScheduler>();
  if (name == "unicast-sp") return std::make_unique<UnicastShortestScheduler>();
  if (name == "single-tree-static") return std::make_unique<SingleTreeScheduler>(SingleTreeMode::Static);
  if (name == "single-tree-load-aware") return std::make_unique<SingleTreeScheduler>(SingleTreeMode::LoadAware);
  if (name == "quickcast-like") return std::make_unique<QuickcastLikeScheduler>();
  throw ValidationError("unknown scheduler '" + std::string(name) + "'");
}

}  // namespace iris

#endif  // IRIS_SCHEDULERS_HPP
