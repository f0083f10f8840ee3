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

#ifndef IRIS_SIM_ENGINE_HPP
#define IRIS_SIM_ENGINE_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "iris/rate_allocation.hpp"
#include "iris/schedulers.hpp"
#include "iris/topology.hpp"
#include "iris/transfer.hpp"
#include "iris/tree_selection.hpp"
#include "iris/types.hpp"

namespace iris {

/// A residual below this many traffic units counts as delivered.
inline constexpr double kResidualEpsilon = 1e-9;

struct CompletionRecord {
  TransferId transfer = 0;
  NodeId receiver;
  std::size_t rank = 0;  // 1 = first receiver of its transfer to finish
  Timeslot arrival = 0;
  Timeslot completion = 0;

  Timeslot duration() const { return completion - arrival; }
};

/// Delivered volume of one finished partition.
struct PartitionRecord {
  TransferId transfer = 0;
  std::size_t receivers = 0;
  std::size_t tree_edges = 0;
  double volume = 0.0;
  double delivered = 0.0;
  Timeslot completion = 0;
};

struct RejectionRecord {
  TransferId transfer = 0;
  Timeslot timeslot = 0;
  std::string reason;
};

/// Checks that a plan's partitions cover the receivers exactly once and
/// that every tree is an arborescence from the source reaching its
/// partition.
inline void validate_plan(const PartitionPlan& plan, const TransferRequest& request, const Topology& topo) {
  const std::string label = "plan for transfer " + std::to_string(request.id);
  std::vector<NodeId> covered;
  for (const auto& p : plan.partitions) {
    if (p.receivers.empty()) throw ValidationError(label + ": empty partition");
    covered.insert(covered.end(), p.receivers.begin(), p.receivers.end());
    if (p.tree.root != request.source) throw ValidationError(label + ": tree not rooted at the source");
    if (p.residual < 0.0 || p.residual > request.volume) throw ValidationError(label + ": residual out of range");
    std::vector<std::int64_t> parent(topo.node_count(), -1);
    for (EdgeId e : p.tree.edges) {
      const auto& ed = topo.edge(e);
      if (ed.dst == request.source || parent[ed.dst.index()] >= 0)
        throw ValidationError(label + ": tree is not an arborescence");
      parent[ed.dst.index()] = ed.src.value;
    }
    for (NodeId r : p.receivers) {
      // Walk back to the source; the edge count bounds the walk.
      NodeId v = r;
      std::size_t steps = 0;
      while (v != request.source) {
        if (parent[v.index()] < 0 || ++steps > p.tree.edges.size())
          throw ValidationError(label + ": tree does not reach " + topo.name(r));
        v = NodeId(static_cast<std::uint32_t>(parent[v.index()]));
      }
    }
  }
  std::sort(covered.begin(), covered.end());
  std::vector<NodeId> expected = request.receivers;
  std::sort(expected.begin(), expected.end());
  if (covered != expected) throw ValidationError(label + ": partitions do not cover the receivers exactly once");
}

/// Online timeslotted simulation on one topology.
///
/// Arrivals are submitted at the current clock; `tick` advances the clock
/// by one timeslot, shares B_e(t) max-min fairly among all active trees and
/// drains their residual volumes. The load table is rebuilt from residuals
/// after every tick. Single-threaded.
class Simulation {
 public:
  explicit Simulation(std::shared_ptr<const Topology> topology, SchedulerOptions options = {})
      : topo_(std::move(topology)), options_(options), loads_(*topo_), bandwidth_(topo_->edge_count(), 0.0),
        usage_(topo_->edge_count(), 0.0) {}

  Timeslot now() const { return now_; }
  const Topology& topology() const { return *topo_; }
  const EdgeLoadTable& loads() const { return loads_; }
  bool drained() const { return active_.empty(); }
  std::size_t active_partitions() const { return active_.size(); }

  const std::vector<CompletionRecord>& completions() const { return completions_; }
  const std::vector<PartitionRecord>& partition_log() const { return partition_log_; }
  const std::vector<RejectionRecord>& rejections() const { return rejections_; }
  double bandwidth_used() const { return bandwidth_used_; }

  /// Plans `request` with `scheduler` and activates the plan. A scheduler
  /// failure is logged as a rejection and rethrown.
  PartitionPlan submit(const TransferRequest& request, const Scheduler& scheduler) {
    if (request.arrival != now_)
      throw PreconditionError("transfer " + std::to_string(request.id) + " arrives at " +
                              std::to_string(request.arrival) + " but the clock is at " + std::to_string(now_));
    PartitionPlan plan;
    try {
      if (pending_.contains(request.id))
        throw ValidationError("transfer " + std::to_string(request.id) + " is already in flight");
      request.validate(*topo_);
      SchedulingContext ctx{*topo_, loads_, now_, options_};
      plan = scheduler.plan(request, ctx);
      validate_plan(plan, request, *topo_);
    } catch (const std::exception& e) {
      rejections_.push_back({request.id, now_, e.what()});
      rebuild_loads();
      throw;
    }
    auto& pending = pending_[request.id];
    pending.arrival = request.arrival;
    pending.outstanding = request.receivers.size();
    for (const auto& p : plan.partitions)
      active_.push_back({request.id, p.receivers, p.tree, request.volume, p.residual, 0.0});
    rebuild_loads();
    return plan;
  }

  /// Advances one timeslot and returns the receivers that finished in it.
  /// Ranks are filled in once every receiver of a transfer is done.
  std::vector<CompletionRecord> tick() {
    ++now_;
    std::vector<CompletionRecord> finished;
    if (active_.empty()) return finished;

    for (const auto& a : active_)
      for (EdgeId e : a.tree.edges) bandwidth_[e.index()] = topo_->bandwidth(e, now_);
    demands_.clear();
    for (const auto& a : active_) demands_.push_back({a.tree.edges, a.residual / kTimeslotLength});
    solver_.solve(demands_, bandwidth_, rates_);
    check_capacity();

    std::size_t kept = 0;
    for (std::size_t i = 0; i < active_.size(); ++i) {
      auto& a = active_[i];
      const double sent = kTimeslotLength * rates_[i];
      a.residual -= sent;
      a.delivered += sent;
      bandwidth_used_ += sent * static_cast<double>(a.tree.edges.size());
      if (a.residual <= kResidualEpsilon) {
        a.residual = 0.0;
        finish(a, finished);
      } else {
        if (kept != i) active_[kept] = std::move(a);
        ++kept;
      }
    }
    active_.resize(kept);
    rebuild_loads();
    return finished;
  }

  /// Jumps the clock forward while nothing is in flight.
  void advance_idle(Timeslot to) {
    if (!active_.empty()) throw PreconditionError("cannot skip time with active transfers");
    if (to > now_) now_ = to;
  }

 private:
  struct Active {
    TransferId transfer;
    std::vector<NodeId> receivers;
    ForwardingTree tree;
    double volume;
    double residual;
    double delivered;
  };

  struct Pending {
    Timeslot arrival = 0;
    std::size_t outstanding = 0;
    std::vector<CompletionRecord> done;
  };

  void finish(const Active& a, std::vector<CompletionRecord>& finished) {
    partition_log_.push_back({a.transfer, a.receivers.size(), a.tree.edges.size(), a.volume, a.delivered, now_});
    auto it = pending_.find(a.transfer);
    auto& p = it->second;
    for (NodeId r : a.receivers) {
      CompletionRecord rec{a.transfer, r, 0, p.arrival, now_};
      finished.push_back(rec);
      p.done.push_back(rec);
    }
    p.outstanding -= a.receivers.size();
    if (p.outstanding > 0) return;
    std::stable_sort(p.done.begin(), p.done.end(), [](const CompletionRecord& x, const CompletionRecord& y) {
      if (x.completion != y.completion) return x.completion < y.completion;
      return x.receiver < y.receiver;
    });
    for (std::size_t k = 0; k < p.done.size(); ++k) {
      p.done[k].rank = k + 1;
      completions_.push_back(p.done[k]);
    }
    pending_.erase(it);
  }

  void rebuild_loads() {
    loads_.clear();
    for (const auto& a : active_)
      for (EdgeId e : a.tree.edges) loads_.add_volume(e, a.residual);
  }

  void check_capacity() {
    for (std::size_t i = 0; i < active_.size(); ++i)
      for (EdgeId e : active_[i].tree.edges) usage_[e.index()] += rates_[i];
    for (const auto& a : active_)
      for (EdgeId e : a.tree.edges) {
        const double over = usage_[e.index()] - bandwidth_[e.index()];
        if (over > kRateTolerance * std::max(1.0, bandwidth_[e.index()]))
          throw Error("rate allocation exceeds the available bandwidth of edge " + std::to_string(e.value));
      }
    for (const auto& a : active_)
      for (EdgeId e : a.tree.edges) usage_[e.index()] = 0.0;
  }

  std::shared_ptr<const Topology> topo_;
  SchedulerOptions options_;
  EdgeLoadTable loads_;
  Timeslot now_ = 0;
  std::vector<Active> active_;
  std::map<TransferId, Pending> pending_;
  std::vector<CompletionRecord> completions_;
  std::vector<PartitionRecord> partition_log_;
  std::vector<RejectionRecord> rejections_;
  double bandwidth_used_ = 0.0;

  MaxMinSolver solver_;
  std::vector<TreeDemand> demands_;
  std::vector<double> rates_;
  std::vector<double> bandwidth_;
  std::vector<double> usage_;
};

/// Result of simulating one trace to completion.
struct RunResult {
  std::vector<CompletionRecord> completions;
  std::vector<PartitionRecord> partitions;
  std::vector<PartitionPlan> plans;
  double bandwidth_used = 0.0;
  Timeslot end = 0;
  bool drained = false;
};

/// Submits every request at its arrival (trace order within a timeslot)
/// and ticks until all transfers finish.
inline RunResult run_trace(std::shared_ptr<const Topology> topology, std::span<const TransferRequest> trace,
                           const Scheduler& scheduler, SchedulerOptions options = {}) {
  for (std::size_t i = 1; i < trace.size(); ++i)
    if (trace[i].arrival < trace[i - 1].arrival)
      throw ValidationError("trace is not sorted by arrival (transfer " + std::to_string(trace[i].id) + ")");
  Simulation sim(std::move(topology), options);
  RunResult out;
  std::size_t next = 0;
  while (next < trace.size() || !sim.drained()) {
    if (sim.drained() && next < trace.size()) sim.advance_idle(trace[next].arrival);
    while (next < trace.size() && trace[next].arrival == sim.now())
      out.plans.push_back(sim.submit(trace[next++], scheduler));
    sim.tick();
  }
  out.completions = sim.completions();
  out.partitions = sim.partition_log();
  out.bandwidth_used = sim.bandwidth_used();
  out.end = sim.now();
  out.drained = sim.drained();
  return out;
}

/// Per-rank aggregate of completion times.
struct RankRow {
  std::size_t rank = 0;
  std::size_t count = 0;
  double mean_completion = 0.0;
};

struct Report {
  std::size_t receivers = 0;
  double mean_completion = 0.0;
  double tail_completion = 0.0;  // 99.9th percentile, nearest rank
  double bandwidth = 0.0;
  std::vector<RankRow> ranks;
  std::vector<std::pair<double, double>> cdf;  // (quantile, completion time)
};

/// Nearest-rank percentile of an ascending sample.
inline double nearest_rank(std::span<const double> sorted, double pct) {
  if (sorted.empty()) return 0.0;
  // The slack absorbs roundoff such as 0.999 * 1000 = 999.0000000000001.
  auto k = static_cast<std::size_t>(std::ceil(pct / 100.0 * static_cast<double>(sorted.size()) - 1e-9));
  k = std::clamp<std::size_t>(k, 1, sorted.size());
  return sorted[k - 1];
}

/// Summary statistics over completion durations (completion - arrival).
inline Report make_report(std::span<const CompletionRecord> completions, double bandwidth,
                          std::size_t cdf_points = 100) {
  Report r;
  r.bandwidth = bandwidth;
  r.receivers = completions.size();
  std::vector<double> d;
  d.reserve(completions.size());
  std::map<std::size_t, std::pair<std::size_t, double>> by_rank;
  for (const auto& c : completions) {
    d.push_back(static_cast<double>(c.duration()));
    auto& slot = by_rank[c.rank];
    ++slot.first;
    slot.second += static_cast<double>(c.duration());
  }
  std::sort(d.begin(), d.end());
  if (!d.empty()) {
    double sum = 0.0;
    for (double x : d) sum += x;
    r.mean_completion = sum / static_cast<double>(d.size());
    r.tail_completion = nearest_rank(d, 99.9);
    for (std::size_t i = 1; i <= cdf_points; ++i) {
      const double q = static_cast<double>(i) / static_cast<double>(cdf_points);
      r.cdf.emplace_back(q, nearest_rank(d, 100.0 * q));
    }
  }
  for (const auto& [rank, slot] : by_rank)
    r.ranks.push_back({rank, slot.first, slot.second / static_cast<double>(slot.first)});
  return r;
}

inline Report metrics(const Simulation& sim) {
  if (!sim.drained())
    throw NotDrainedError("metrics requested with " + std::to_string(sim.active_partitions()) +
                          " partitions still active");
  return make_report(sim.completions(), sim.bandwidth_used());
}

inline Report metrics(const RunResult& run) {
  if (!run.drained) throw NotDrainedError("metrics requested before the run drained");
  return make_report(run.completions, run.bandwidth_used);
}

}  // namespace iris

#endif  // IRIS_SIM_ENGINE_HPP
