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

#ifndef IRIS_RELAXED_PARTITIONER_HPP
#define IRIS_RELAXED_PARTITIONER_HPP

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <string>
#include <vector>

#include "iris/types.hpp"

namespace iris {

/// Sender behind one uplink, receivers behind their own downlinks, and an
/// uncongested core. `Number` is `double` in the library and an exact
/// rational in tests.
template <typename Number = double>
struct StarInstance {
  Number uplink{};
  std::vector<Number> downlinks;  // descending
  Number volume = Number(1);

  std::size_t size() const { return downlinks.size(); }

  void validate() const {
    if (!(Number(0) < uplink)) throw ValidationError("star instance: uplink rate must be positive");
    for (std::size_t i = 0; i < downlinks.size(); ++i) {
      if (!(Number(0) < downlinks[i])) throw ValidationError("star instance: downlink rates must be positive");
      if (i > 0 && downlinks[i - 1] < downlinks[i])
        throw ValidationError("star instance: downlinks must be sorted in descending order");
    }
  }
};

/// Receiver groups (indices into the sorted downlinks) with their rates.
template <typename Number = double>
struct StarPartitioning {
  std::vector<std::vector<std::size_t>> groups;
  std::vector<Number> rates;
  Number mean_completion{};
};

using Groups = std::vector<std::vector<std::size_t>>;

/// Max-min rates of the groups on the shared uplink. A group never runs
/// faster than its slowest member's downlink.
template <typename Number>
std::vector<Number> star_maxmin_rates(const StarInstance<Number>& inst, const Groups& groups) {
  const std::size_t g = groups.size();
  std::vector<Number> cap(g);
  for (std::size_t i = 0; i < g; ++i) {
    cap[i] = inst.downlinks[groups[i].front()];
    for (std::size_t r : groups[i]) cap[i] = std::min(cap[i], inst.downlinks[r]);
  }
  std::vector<std::size_t> order(g);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return cap[a] < cap[b]; });

  std::vector<Number> rate(g);
  Number left = inst.uplink;
  std::size_t open = g;
  for (std::size_t k = 0; k < g; ++k) {
    const std::size_t i = order[k];
    const Number share = left / Number(static_cast<long long>(open));
    if (cap[i] <= share) {
      rate[i] = cap[i];
      left -= cap[i];
      --open;
    } else {
      for (std::size_t j = k; j < g; ++j) rate[order[j]] = share;
      break;
    }
  }
  return rate;
}

/// Mean receiver completion time, volume / rate averaged over receivers.
template <typename Number>
Number star_mean_completion(const StarInstance<Number>& inst, const Groups& groups, const std::vector<Number>& rates) {
  Number total(0);
  std::size_t n = 0;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    total += Number(static_cast<long long>(groups[i].size())) * inst.volume / rates[i];
    n += groups[i].size();
  }
  return total / Number(static_cast<long long>(n));
}

namespace detail {

template <typename Number>
StarPartitioning<Number> evaluate_star(const StarInstance<Number>& inst, Groups groups) {
  StarPartitioning<Number> p;
  p.rates = star_maxmin_rates(inst, groups);
  p.mean_completion = star_mean_completion(inst, groups, p.rates);
  p.groups = std::move(groups);
  return p;
}

// Lower mean completion wins, then fewer groups, then the lexicographically
// smaller grouping.
template <typename Number>
bool star_better(const StarPartitioning<Number>& a, const StarPartitioning<Number>& b) {
  if (a.mean_completion != b.mean_completion) return a.mean_completion < b.mean_completion;
  if (a.groups.size() != b.groups.size()) return a.groups.size() < b.groups.size();
  return a.groups < b.groups;
}

inline Groups isolate_groups(std::size_t n, std::size_t m) {
  Groups g;
  std::vector<std::size_t> fast(n - m + 1);
  std::iota(fast.begin(), fast.end(), std::size_t{0});
  g.push_back(std::move(fast));
  for (std::size_t r = n - m + 1; r < n; ++r) g.push_back({r});
  return g;
}

}  // namespace detail

/// Groups the n-M+1 fastest receivers and isolates the remaining M-1 as
/// singletons, for every M in 1..n, and keeps the M with the lowest mean
/// completion time (smaller M on ties).
template <typename Number>
StarPartitioning<Number> isolate_sweep(const StarInstance<Number>& inst) {
  inst.validate();
  const std::size_t n = inst.size();
  if (n == 0) throw ValidationError("star instance: no receivers");
  StarPartitioning<Number> best = detail::evaluate_star(inst, detail::isolate_groups(n, 1));
  for (std::size_t m = 2; m <= n; ++m) {
    auto cand = detail::evaluate_star(inst, detail::isolate_groups(n, m));
    if (cand.mean_completion < best.mean_completion) best = std::move(cand);
  }
  return best;
}

enum class PartitionSearch { Consecutive, AllSetPartitions };

inline constexpr std::size_t kMaxConsecutiveSearch = 12;
inline constexpr std::size_t kMaxSetPartitionSearch = 8;

/// Exhaustive search for the partitioning with the lowest mean completion.
/// Consecutive mode walks all 2^(n-1) compositions of the sorted receivers;
/// the other mode walks every set partition (restricted growth strings).
template <typename Number>
StarPartitioning<Number> brute_force_optimal(const StarInstance<Number>& inst, PartitionSearch mode) {
  inst.validate();
  const std::size_t n = inst.size();
  if (n == 0) throw ValidationError("star instance: no receivers");
  const std::size_t limit = mode == PartitionSearch::Consecutive ? kMaxConsecutiveSearch : kMaxSetPartitionSearch;
  if (n > limit)
    throw InstanceTooLargeError("exhaustive partition search limited to " + std::to_string(limit) +
                                " receivers, got " + std::to_string(n));

  bool have = false;
  StarPartitioning<Number> best;
  auto consider = [&](Groups g) {
    auto cand = detail::evaluate_star(inst, std::move(g));
    if (!have || detail::star_better(cand, best)) {
      best = std::move(cand);
      have = true;
    }
  };

  if (mode == PartitionSearch::Consecutive) {
    // Bit i set: cut between receiver i and i+1.
    for (std::size_t cuts = 0; cuts < (std::size_t{1} << (n - 1)); ++cuts) {
      Groups g(1);
      for (std::size_t r = 0; r < n; ++r) {
        g.back().push_back(r);
        if (r + 1 < n && (cuts >> r & 1)) g.emplace_back();
      }
      consider(std::move(g));
    }
  } else {
    std::vector<std::size_t> label(n, 0);
    std::vector<std::size_t> prefix_max(n, 0);
    while (true) {
      std::size_t blocks = 0;
      for (auto l : label) blocks = std::max(blocks, l + 1);
      Groups g(blocks);
      for (std::size_t r = 0; r < n; ++r) g[label[r]].push_back(r);
      consider(std::move(g));
      // Next restricted growth string: label[i] <= 1 + max(label[0..i)).
      std::size_t i = n;
      while (i-- > 1) {
        if (label[i] <= prefix_max[i - 1]) break;
      }
      if (i == 0) break;
      ++label[i];
      prefix_max[i] = std::max(prefix_max[i - 1], label[i]);
      for (std::size_t j = i + 1; j < n; ++j) {
        label[j] = 0;
        prefix_max[j] = prefix_max[j - 1];
      }
    }
  }
  return best;
}

}  // namespace iris

#endif  // IRIS_RELAXED_PARTITIONER_HPP
