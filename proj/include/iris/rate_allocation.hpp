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

#ifndef IRIS_RATE_ALLOCATION_HPP
#define IRIS_RATE_ALLOCATION_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numeric>
#include <queue>
#include <span>
#include <tuple>
#include <vector>

#include "iris/types.hpp"

namespace iris {

inline constexpr double kRateTolerance = 1e-9;

/// One forwarding tree competing for bandwidth. `demand_cap` bounds the
/// rate (residual volume / timeslot length); infinity means uncapped.
struct TreeDemand {
  std::span<const EdgeId> edges;
  double demand_cap = std::numeric_limits<double>::infinity();
};

struct RateSnapshot {
  Timeslot timeslot = 0;
  std::vector<double> rates;  // indexed like the input trees
};

/// Progressive-filling max-min fair allocation across trees.
///
/// All unfrozen trees rise at a common level. A tree freezes when it reaches
/// its demand cap or when one of its edges saturates. Edges are processed in
/// ascending order of their saturation level, ties by edge id, so the result
/// is deterministic. Scratch buffers are reused across calls; an instance is
/// not thread-safe.
class MaxMinSolver {
 public:
  /// `bandwidth` is indexed by edge id and must cover every edge used.
  void solve(std::span<const TreeDemand> trees, std::span<const double> bandwidth, std::vector<double>& rates) {
    const std::size_t n_trees = trees.size();
    rates.assign(n_trees, 0.0);
    if (n_trees == 0) return;
    if (count_.size() < bandwidth.size()) {
      count_.resize(bandwidth.size(), 0);
      degree_.resize(bandwidth.size(), 0);
      frozen_.resize(bandwidth.size(), 0.0);
      version_.resize(bandwidth.size(), 0);
      offset_.resize(bandwidth.size(), 0);
    }

    touched_.clear();
    for (const auto& t : trees)
      for (EdgeId e : t.edges) {
        if (count_[e.index()]++ == 0) touched_.push_back(e.value);
      }
    // CSR: edge -> trees crossing it.
    std::uint32_t total = 0;
    for (auto e : touched_) {
      offset_[e] = total;
      degree_[e] = 0;
      total += count_[e];
    }
    users_.resize(total);
    for (std::size_t i = 0; i < n_trees; ++i)
      for (EdgeId e : trees[i].edges) users_[offset_[e.value] + degree_[e.value]++] = static_cast<std::uint32_t>(i);

    frozen_tree_.assign(n_trees, 0);
    heap_ = {};
    for (auto e : touched_) {
      frozen_[e] = 0.0;
      version_[e] = 0;
      heap_.emplace(std::max(0.0, bandwidth[e]) / count_[e], e, 0u);
    }
    by_cap_.resize(n_trees);
    std::iota(by_cap_.begin(), by_cap_.end(), 0u);
    std::stable_sort(by_cap_.begin(), by_cap_.end(),
                     [&](std::uint32_t a, std::uint32_t b) { return trees[a].demand_cap < trees[b].demand_cap; });

    std::size_t remaining = n_trees;
    std::size_t next_cap = 0;
    double level = 0.0;

    auto freeze = [&](std::uint32_t ti, double at) {
      frozen_tree_[ti] = 1;
      rates[ti] = at;
      --remaining;
      for (EdgeId f : trees[ti].edges) {
        const auto fe = f.value;
        frozen_[fe] += at;
        --count_[fe];
        ++version_[fe];
        if (count_[fe] > 0) {
          const double s = std::max(level, (bandwidth[fe] - frozen_[fe]) / count_[fe]);
          heap_.emplace(s, fe, version_[fe]);
        }
      }
    };

    // Trees without edges are limited by their demand only.
    for (std::size_t i = 0; i < n_trees; ++i)
      if (trees[i].edges.empty()) {
        frozen_tree_[i] = 1;
        --remaining;
        rates[i] = std::isfinite(trees[i].demand_cap) ? trees[i].demand_cap : 0.0;
      }

    while (remaining > 0) {
      while (!heap_.empty() && std::get<2>(heap_.top()) != version_[std::get<1>(heap_.top())]) heap_.pop();
      while (next_cap < n_trees && frozen_tree_[by_cap_[next_cap]]) ++next_cap;
      const double edge_level = heap_.empty() ? std::numeric_limits<double>::infinity() : std::get<0>(heap_.top());
      const double cap_level =
          next_cap < n_trees ? trees[by_cap_[next_cap]].demand_cap : std::numeric_limits<double>::infinity();
      if (cap_level <= edge_level) {
        level = std::max(level, cap_level);
        freeze(by_cap_[next_cap], cap_level);
        continue;
      }
      auto [s, e, ver] = heap_.top();
      heap_.pop();
      level = std::max(level, s);
      ++version_[e];
      for (std::uint32_t k = offset_[e]; k < offset_[e] + degree_[e]; ++k) {
        const auto ti = users_[k];
        if (!frozen_tree_[ti]) freeze(ti, level);
      }
    }

    for (auto e : touched_) count_[e] = 0;
  }

 private:
  using HeapItem = std::tuple<double, std::uint32_t, std::uint32_t>;
  std::vector<std::uint32_t> count_;
  std::vector<double> frozen_;
  std::vector<std::uint32_t> version_;
  std::vector<std::uint32_t> offset_;
  std::vector<std::uint32_t> users_;
  std::vector<std::uint32_t> degree_;
  std::vector<std::uint32_t> touched_;
  std::vector<char> frozen_tree_;
  std::vector<std::uint32_t> by_cap_;
  std::priority_queue<HeapItem, std::vector<HeapItem>, std::greater<>> heap_;
};

inline RateSnapshot maxmin_rates(std::span<const TreeDemand> trees, std::span<const double> bandwidth,
                                 Timeslot t = 0) {
  RateSnapshot snap;
  snap.timeslot = t;
  MaxMinSolver solver;
  solver.solve(trees, bandwidth, snap.rates);
  return snap;
}

}  // namespace iris

#endif  // IRIS_RATE_ALLOCATION_HPP
