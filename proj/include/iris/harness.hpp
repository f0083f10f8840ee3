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

#ifndef IRIS_HARNESS_HPP
#define IRIS_HARNESS_HPP

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <string>
#include <span>
#include <string_view>
#include <thread>
#include <tuple>
#include <vector>

#include <nlohmann/json.hpp>

#include "iris/lower_bound.hpp"
#include "iris/schedulers.hpp"
#include "iris/sim_engine.hpp"
#include "iris/topology.hpp"
#include "iris/workload.hpp"

namespace iris {

inline constexpr std::string_view kBaselineScheduler = "single-tree-load-aware";

/// One experiment: a topology, a workload template, the schedulers to
/// compare and the seeds to run. Each seed drives both the trace and the
/// user-traffic waves of the topology.
struct Scenario {
  std::string name;
  std::filesystem::path topology_file;
  std::string topology_text;
  WorkloadSpec workload;
  std::vector<std::string> schedulers;
  std::vector<std::uint64_t> seeds;
  std::filesystem::path output_dir;  // empty: nothing is written
  SchedulerOptions options{};

  void validate() const {
    if (schedulers.empty()) throw ValidationError("scenario: at least one scheduler is required");
    if (seeds.empty()) throw ValidationError("scenario: at least one seed is required");
    for (const auto& s : schedulers) make_scheduler(s);
    auto sorted = schedulers;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw ValidationError("scenario: scheduler listed twice");
  }
};

/// Parses a scenario document:
/// `{"name", "topology": path, "workload": {..}, "schedulers": [..],
/// "seeds": [..], "options": {"max_horizon", "exact_static_terminals"},
/// "output": dir}`. Paths are relative to `base`.
inline Scenario parse_scenario(const nlohmann::json& j, const std::filesystem::path& base = {}) {
  Scenario s;
  try {
    s.name = j.value("name", std::string("scenario"));
    s.topology_file = j.at("topology").get<std::string>();
    if (s.topology_file.is_relative()) s.topology_file = base / s.topology_file;
    if (!std::filesystem::exists(s.topology_file))
      throw ValidationError("scenario: topology file " + s.topology_file.string() + " does not exist");
    s.topology_text = detail::read_file(s.topology_file);
    s.workload = parse_workload(j.at("workload"), base);
    s.schedulers = j.at("schedulers").get<std::vector<std::string>>();
    s.seeds = j.at("seeds").get<std::vector<std::uint64_t>>();
    if (j.contains("options")) {
      const auto& o = j.at("options");
      s.options.max_horizon = o.value("max_horizon", s.options.max_horizon);
      s.options.exact_static_terminals = o.value("exact_static_terminals", s.options.exact_static_terminals);
      if (s.options.max_horizon <= 0) throw ValidationError("scenario: max_horizon must be positive");
    }
    if (j.contains("output")) {
      s.output_dir = j.at("output").get<std::string>();
      if (s.output_dir.is_relative()) s.output_dir = base / s.output_dir;
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("scenario: ") + e.what());
  }
  s.validate();
  return s;
}

inline Scenario load_scenario(const std::filesystem::path& file) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(detail::read_file(file));
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(file.string() + ": " + e.what());
  }
  Scenario s = parse_scenario(j, file.parent_path());
  if (!j.contains("name")) s.name = file.stem().string();
  return s;
}

/// Topology and trace for one seed of a scenario.
struct SeedInstance {
  std::uint64_t seed = 0;
  std::shared_ptr<const Topology> topology;
  std::vector<TransferRequest> trace;
};

inline std::uint64_t traffic_seed(std::uint64_t seed) { return seed ^ 0x9e3779b97f4a7c15ULL; }

inline SeedInstance make_instance(const Scenario& s, std::uint64_t seed) {
  SeedInstance inst;
  inst.seed = seed;
  inst.topology = std::make_shared<const Topology>(load_topology(s.topology_text, traffic_seed(seed)));
  WorkloadSpec w = s.workload;
  w.seed = seed;
  inst.trace = gen_trace(w, *inst.topology);
  return inst;
}

/// Number of worker threads: SIM_WORKERS if set, else the hardware count.
inline std::size_t worker_count() {
  if (const char* env = std::getenv("SIM_WORKERS")) {
    try {
      const long v = std::stol(env);
      if (v > 0) return static_cast<std::size_t>(v);
    } catch (const std::exception&) {
    }
    throw ValidationError(std::string("SIM_WORKERS must be a positive integer, got '") + env + "'");
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs `jobs[i]()` for every i on a pool of threads. Failures are
/// collected and the first one in job order is rethrown.
inline void run_parallel(std::vector<std::function<void()>>& jobs, std::size_t workers) {
  std::vector<std::exception_ptr> errors(jobs.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < jobs.size();) {
      try {
        jobs[i]();
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  workers = std::clamp<std::size_t>(workers, 1, std::max<std::size_t>(1, jobs.size()));
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

struct SchedulerRun {
  std::string scheduler;
  std::uint64_t seed = 0;
  RunResult result;
  Report report;
};

struct SpeedupRow {
  std::string scheduler;
  std::size_t rank = 0;
  std::size_t receivers = 0;
  double mean_completion = 0.0;
  double baseline_mean_completion = 0.0;
  double speedup = 0.0;
};

struct ScenarioResult {
  std::vector<SeedInstance> instances;  // in seed order
  std::vector<SchedulerRun> runs;       // sorted by (scheduler, seed)
  std::vector<SpeedupRow> summary;

  const SchedulerRun& run(std::string_view scheduler, std::uint64_t seed) const {
    for (const auto& r : runs)
      if (r.scheduler == scheduler && r.seed == seed) return r;
    throw ValidationError("no run for " + std::string(scheduler) + " seed " + std::to_string(seed));
  }
};

/// Per-rank mean completion of each scheduler pooled over seeds, divided
/// into the baseline's mean at the same rank.
inline std::vector<SpeedupRow> speedup_summary(const std::vector<SchedulerRun>& runs,
                                               std::span<const std::string> schedulers) {
  auto pooled = [&](std::string_view name) {
    std::map<std::size_t, std::pair<std::size_t, double>> by_rank;
    for (const auto& r : runs) {
      if (r.scheduler != name) continue;
      for (const auto& c : r.result.completions) {
        auto& slot = by_rank[c.rank];
        ++slot.first;
        slot.second += static_cast<double>(c.duration());
      }
    }
    return by_rank;
  };
  const auto base = pooled(kBaselineScheduler);
  std::vector<SpeedupRow> rows;
  for (const auto& s : schedulers) {
    for (const auto& [rank, slot] : pooled(s)) {
      SpeedupRow row;
      row.scheduler = s;
      row.rank = rank;
      row.receivers = slot.first;
      row.mean_completion = slot.second / static_cast<double>(slot.first);
      if (auto it = base.find(rank); it != base.end()) {
        row.baseline_mean_completion = it->second.second / static_cast<double>(it->second.first);
        row.speedup = row.baseline_mean_completion / row.mean_completion;
      }
      rows.push_back(row);
    }
  }
  return rows;
}

namespace detail {

inline void write_text(const std::filesystem::path& file, const std::string& text) {
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + file.string());
  out << text;
  if (!out) throw Error("failed writing " + file.string());
}

inline std::string completions_csv(const SchedulerRun& run, const Topology& topo) {
  std::string out = "transfer_id,receiver,rank,arrival,completion,scheduler,seed\n";
  auto recs = run.result.completions;
  std::sort(recs.begin(), recs.end(), [](const CompletionRecord& a, const CompletionRecord& b) {
    return std::tie(a.transfer, a.rank) < std::tie(b.transfer, b.rank);
  });
  for (const auto& c : recs)
    out += std::to_string(c.transfer) + ',' + topo.name(c.receiver) + ',' + std::to_string(c.rank) + ',' +
           std::to_string(c.arrival) + ',' + std::to_string(c.completion) + ',' + run.scheduler + ',' +
           std::to_string(run.seed) + '\n';
  return out;
}

}  // namespace detail

inline constexpr std::string_view kMetricsHeader =
    "scheduler,scenario,seed,transfers,receivers,mean_completion,tail_completion,bandwidth";

/// Runs every (scheduler, seed) pair, plus the load-aware single-tree
/// baseline when it is not listed, and writes completion logs, metrics,
/// per-rank speedups and CDF samples into the output directory.
inline ScenarioResult run_scenario(const Scenario& s, std::size_t workers = worker_count()) {
  s.validate();
  ScenarioResult res;
  res.instances.resize(s.seeds.size());
  {
    std::vector<std::function<void()>> jobs;
    for (std::size_t i = 0; i < s.seeds.size(); ++i)
      jobs.push_back([&, i] { res.instances[i] = make_instance(s, s.seeds[i]); });
    run_parallel(jobs, workers);
  }

  std::vector<std::string> to_run = s.schedulers;
  const bool implicit_baseline =
      std::find(to_run.begin(), to_run.end(), kBaselineScheduler) == to_run.end();
  if (implicit_baseline) to_run.emplace_back(kBaselineScheduler);
  std::sort(to_run.begin(), to_run.end());

  res.runs.resize(to_run.size() * s.seeds.size());
  std::vector<std::function<void()>> jobs;
  for (std::size_t k = 0; k < to_run.size(); ++k)
    for (std::size_t i = 0; i < s.seeds.size(); ++i)
      jobs.push_back([&, k, i] {
        auto& run = res.runs[k * s.seeds.size() + i];
        const auto& inst = res.instances[i];
        run.scheduler = to_run[k];
        run.seed = inst.seed;
        const auto sched = make_scheduler(to_run[k]);
        run.result = run_trace(inst.topology, inst.trace, *sched, s.options);
        run.report = metrics(run.result);
      });
  run_parallel(jobs, workers);
  std::stable_sort(res.runs.begin(), res.runs.end(), [](const SchedulerRun& a, const SchedulerRun& b) {
    return std::tie(a.scheduler, a.seed) < std::tie(b.scheduler, b.seed);
  });
  auto listed = s.schedulers;
  std::sort(listed.begin(), listed.end());
  res.summary = speedup_summary(res.runs, listed);

  if (s.output_dir.empty()) return res;
  std::filesystem::create_directories(s.output_dir);
  std::string metrics_csv(kMetricsHeader);
  metrics_csv += '\n';
  std::string cdf_csv = "scheduler,seed,quantile,completion\n";
  for (const auto& run : res.runs) {
    const bool is_listed = std::find(listed.begin(), listed.end(), run.scheduler) != listed.end();
    if (!is_listed) continue;
    const auto& inst = *std::find_if(res.instances.begin(), res.instances.end(),
                                     [&](const SeedInstance& x) { return x.seed == run.seed; });
    detail::write_text(s.output_dir / ("completions_" + run.scheduler + "_seed" + std::to_string(run.seed) + ".csv"),
                       detail::completions_csv(run, *inst.topology));
    const auto& r = run.report;
    metrics_csv += run.scheduler + ',' + s.name + ',' + std::to_string(run.seed) + ',' +
                   std::to_string(inst.trace.size()) + ',' + std::to_string(r.receivers) + ',' +
                   format_double(r.mean_completion) + ',' + format_double(r.tail_completion) + ',' +
                   format_double(r.bandwidth) + '\n';
    for (const auto& [q, v] : r.cdf)
      cdf_csv += run.scheduler + ',' + std::to_string(run.seed) + ',' + format_double(q) + ',' + format_double(v) + '\n';
  }
  std::string summary_csv = "scheduler,rank,receivers,mean_completion,baseline_mean_completion,speedup\n";
  for (const auto& row : res.summary)
    summary_csv += row.scheduler + ',' + std::to_string(row.rank) + ',' + std::to_string(row.receivers) + ',' +
                   format_double(row.mean_completion) + ',' + format_double(row.baseline_mean_completion) + ',' +
                   format_double(row.speedup) + '\n';
  detail::write_text(s.output_dir / "metrics.csv", metrics_csv);
  detail::write_text(s.output_dir / "summary.csv", summary_csv);
  detail::write_text(s.output_dir / "cdf.csv", cdf_csv);
  return res;
}

/// Lower bound and realized completion for one receiver of one transfer.
struct BoundRow {
  std::uint64_t seed = 0;
  TransferId transfer = 0;
  NodeId receiver;
  Timeslot arrival = 0;
  Timeslot lower_bound = 0;
  std::vector<Timeslot> realized;  // one per scheduler, sorted by name
};

struct BoundResult {
  std::vector<std::string> schedulers;
  std::vector<BoundRow> rows;  // by (seed, transfer, receiver id)
  ScenarioResult scenario;

  /// Rows whose bound exceeds a realized completion.
  std::vector<std::pair<const BoundRow*, std::string>> violations() const {
    std::vector<std::pair<const BoundRow*, std::string>> out;
    for (const auto& row : rows)
      for (std::size_t k = 0; k < schedulers.size(); ++k)
        if (row.lower_bound > row.realized[k]) out.emplace_back(&row, schedulers[k]);
    return out;
  }
};

/// Simulates each seed's trace on the aggregate star and lists the bound
/// next to every scheduler's realized completion; writes lower_bound.csv.
inline BoundResult compute_lower_bound(const Scenario& s, std::size_t workers = worker_count()) {
  BoundResult out;
  Scenario quiet = s;
  quiet.output_dir.clear();
  out.scenario = run_scenario(quiet, workers);
  out.schedulers = s.schedulers;
  std::sort(out.schedulers.begin(), out.schedulers.end());

  std::vector<std::vector<CompletionRecord>> bounds(out.scenario.instances.size());
  {
    std::vector<std::function<void()>> jobs;
    for (std::size_t i = 0; i < bounds.size(); ++i)
      jobs.push_back([&, i] {
        const auto& inst = out.scenario.instances[i];
        bounds[i] = lower_bound_completions(*inst.topology, inst.trace);
      });
    run_parallel(jobs, workers);
  }

  for (std::size_t i = 0; i < bounds.size(); ++i) {
    const auto seed = out.scenario.instances[i].seed;
    std::map<std::pair<TransferId, NodeId>, std::size_t> index;
    auto& b = bounds[i];
    std::sort(b.begin(), b.end(), [](const CompletionRecord& x, const CompletionRecord& y) {
      return std::tie(x.transfer, x.receiver) < std::tie(y.transfer, y.receiver);
    });
    for (const auto& c : b) {
      index[{c.transfer, c.receiver}] = out.rows.size();
      out.rows.push_back({seed, c.transfer, c.receiver, c.arrival, c.completion,
                          std::vector<Timeslot>(out.schedulers.size(), 0)});
    }
    for (std::size_t k = 0; k < out.schedulers.size(); ++k)
      for (const auto& c : out.scenario.run(out.schedulers[k], seed).result.completions)
        out.rows[index.at({c.transfer, c.receiver})].realized[k] = c.completion;
  }

  if (!s.output_dir.empty()) {
    std::filesystem::create_directories(s.output_dir);
    std::string csv = "seed,transfer_id,receiver,arrival,lower_bound";
    for (const auto& name : out.schedulers) csv += ",completion_" + name;
    csv += '\n';
    for (const auto& row : out.rows) {
      const auto& topo = *out.scenario.instances.front().topology;
      csv += std::to_string(row.seed) + ',' + std::to_string(row.transfer) + ',' + topo.name(row.receiver) + ',' +
             std::to_string(row.arrival) + ',' + std::to_string(row.lower_bound);
      for (auto t : row.realized) csv += ',' + std::to_string(t);
      csv += '\n';
    }
    detail::write_text(s.output_dir / "lower_bound.csv", csv);
  }
  return out;
}

}  // namespace iris

#endif  // IRIS_HARNESS_HPP
