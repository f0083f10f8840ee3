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

#ifndef IRIS_LOWER_BOUND_HPP
#define IRIS_LOWER_BOUND_HPP

#include <algorithm>
#include <memory>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "iris/relaxed_partitioner.hpp"
#include "iris/schedulers.hpp"
#include "iris/sim_engine.hpp"
#include "iris/topology.hpp"
#include "iris/transfer.hpp"
#include "iris/types.hpp"

namespace iris {

/// Plans transfers on an aggregate star: the receivers, sorted by the mean
/// bandwidth of their downlinks, are grouped by the best consecutive
/// partitioning of the relaxed star instance (exhaustive up to
/// `kMaxConsecutiveSearch` receivers, the isolate sweep beyond).
class RelaxedStarScheduler final : public Scheduler {
 public:
  explicit RelaxedStarScheduler(std::shared_ptr<const AggregateTopology> aggregate)
      : aggregate_(std::move(aggregate)) {}

  std::string_view name() const override { return "relaxed-star"; }

  PartitionPlan plan(const TransferRequest& request, SchedulingContext& ctx) const override {
    const Topology& topo = aggregate_->topology();
    const auto up = aggregate_->uplink(request.source);
    if (!up) throw UnreachableError("aggregate topology: " + topo.name(request.source) + " has no uplink");

    std::vector<NodeId> order = request.receivers;
    std::vector<EdgeId> down;
    for (NodeId r : order)
      if (!aggregate_->downlink(r)) throw UnreachableError("aggregate topology: " + topo.name(r) + " has no downlink");
    std::stable_sort(order.begin(), order.end(), [&](NodeId a, NodeId b) {
      const double ba = topo.mean_bandwidth(*aggregate_->downlink(a));
      const double bb = topo.mean_bandwidth(*aggregate_->downlink(b));
      if (ba != bb) return ba > bb;
      return a < b;
    });

    StarInstance<double> inst;
    inst.uplink = topo.mean_bandwidth(*up);
    inst.volume = request.volume;
    for (NodeId r : order) inst.downlinks.push_back(topo.mean_bandwidth(*aggregate_->downlink(r)));
    const auto best = order.size() <= kMaxConsecutiveSearch
                          ? brute_force_optimal(inst, PartitionSearch::Consecutive)
                          : isolate_sweep(inst);

    PartitionPlan out;
    out.transfer = request.id;
    out.selected_layer = best.groups.size();
    for (const auto& g : best.groups) {
      Partition p;
      p.tree.root = request.source;
      p.tree.edges.push_back(*up);
      for (std::size_t i : g) {
        p.receivers.push_back(order[i]);
        p.tree.edges.push_back(*aggregate_->downlink(order[i]));
      }
      p.tree.terminals = p.receivers;
      std::sort(p.tree.terminals.begin(), p.tree.terminals.end());
      std::sort(p.tree.edges.begin(), p.tree.edges.end());
      p.residual = request.volume;
      for (EdgeId e : p.tree.edges) ctx.loads.add_volume(e, request.volume);
      out.partitions.push_back(std::move(p));
    }
    return out;
  }

 private:
  std::shared_ptr<const AggregateTopology> aggregate_;
};

/// Per-receiver completion times of `workload` simulated on the aggregate
/// star of `topology` with relaxed partitioning.
inline std::vector<CompletionRecord> lower_bound_completions(const Topology& topology,
                                                             std::span<const TransferRequest> workload) {
  if (workload.empty()) return {};
  auto aggregate = std::make_shared<const AggregateTopology>(topology);
  const std::shared_ptr<const Topology> star(aggregate, &aggregate->topology());
  RelaxedStarScheduler scheduler(aggregate);
  return run_trace(star, workload, scheduler).completions;
}

}  // namespace iris

#endif  // IRIS_LOWER_BOUND_HPP
