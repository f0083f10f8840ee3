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

#ifndef IRIS_WORKLOAD_HPP
#define IRIS_WORKLOAD_HPP

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <optional>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "iris/topology.hpp"
#include "iris/transfer.hpp"
#include "iris/types.hpp"

namespace iris {

/// Pareto distribution restricted to [lower, upper].
class TruncatedPareto {
 public:
  TruncatedPareto(double lower, double upper, double shape) : lower_(lower), upper_(upper), shape_(shape) {
    if (!(lower > 0.0) || !(upper > lower) || !(shape > 0.0))
      throw ValidationError("truncated Pareto needs 0 < lower < upper and shape > 0");
  }

  /// Shape giving the requested mean, found by bisection; the mean falls
  /// monotonically as the shape grows.
  static TruncatedPareto with_mean(double lower, double upper, double target) {
    if (!(target > lower) || !(target < upper))
      throw ValidationError("truncated Pareto mean must lie strictly between its bounds");
    double lo = 1e-6;
    double hi = 64.0;
    for (int i = 0; i < 200; ++i) {
      const double mid = 0.5 * (lo + hi);
      if (mean_of(lower, upper, mid) > target)
        lo = mid;
      else
        hi = mid;
    }
    return TruncatedPareto(lower, upper, 0.5 * (lo + hi));
  }

  static double mean_of(double lower, double upper, double shape) {
    if (std::abs(shape - 1.0) < 1e-9) return lower * upper / (upper - lower) * std::log(upper / lower);
    const double tail = std::pow(lower / upper, shape);
    return shape / (shape - 1.0) * lower / (1.0 - tail) * (1.0 - std::pow(lower / upper, shape - 1.0));
  }

  double mean() const { return mean_of(lower_, upper_, shape_); }
  double shape() const { return shape_; }
  double lower() const { return lower_; }
  double upper() const { return upper_; }

  /// Inverse-CDF draw.
  template <typename Rng>
  double operator()(Rng& rng) const {
    const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    const double tail = std::pow(lower_ / upper_, shape_);
    const double x = lower_ / std::pow(1.0 - u * (1.0 - tail), 1.0 / shape_);
    return std::clamp(x, lower_, upper_);
  }

 private:
  double lower_, upper_, shape_;
};

enum class VolumeDistribution { LightTailed, HeavyTailed, Empirical };

inline constexpr double kMeanVolume = 20.0;
inline constexpr double kMinHeavyVolume = 2.0;
inline constexpr double kMaxHeavyVolume = 2000.0;

struct WorkloadSpec {
  double arrival_rate = 1.0;  // transfers per timeslot
  std::size_t count = 0;
  VolumeDistribution volumes = VolumeDistribution::HeavyTailed;
  std::vector<double> empirical_volumes;
  std::size_t receivers = 1;
  std::optional<ObjectiveVector> objective;  // all ones when absent
  std::uint64_t seed = 0;

  void validate(std::size_t node_count) const {
    if (!(arrival_rate > 0.0) || !std::isfinite(arrival_rate)) throw ValidationError("workload: arrival rate must be positive");
    if (count == 0) throw ValidationError("workload: count must be positive");
    if (receivers < 1) throw ValidationError("workload: at least one receiver per transfer");
    if (node_count > 0 && receivers >= node_count)
      throw ValidationError("workload: " + std::to_string(receivers) + " receivers need more than " +
                            std::to_string(node_count) + " nodes");
    if (objective && objective->size() != receivers)
      throw ValidationError("workload: objective vector length does not match the receiver count");
    if (volumes == VolumeDistribution::Empirical) {
      if (empirical_volumes.empty()) throw ValidationError("workload: empirical volume list is empty");
      for (double v : empirical_volumes)
        if (!(v > 0.0) || !std::isfinite(v)) throw ValidationError("workload: empirical volumes must be positive");
    }
  }
};

namespace detail {

inline double parse_double(std::string_view s, const std::string& what) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw ParseError(what + ": not a number '" + std::string(s) + "'");
  return v;
}

template <typename Int>
Int parse_int(std::string_view s, const std::string& what) {
  Int v{};
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw ParseError(what + ": not an integer '" + std::string(s) + "'");
  return v;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace detail

/// Shortest decimal text that reads back to the same double.
inline std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

/// One volume per line; blank lines and `#` comments are skipped.
inline std::vector<double> parse_volume_list(std::string_view text) {
  std::vector<double> out;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    auto line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    out.push_back(detail::parse_double(line, "volume file line " + std::to_string(line_no)));
  }
  return out;
}

/// Reads a workload from JSON:
/// `{"arrival_rate", "count", "receivers", "volume": "light-tailed" |
/// "heavy-tailed" | {"distribution": "empirical", "file": path},
/// "objective": "1010..", "seed"}`. Relative files resolve against `base`.
inline WorkloadSpec parse_workload(const nlohmann::json& j, const std::filesystem::path& base = {}) {
  WorkloadSpec s;
  try {
    s.arrival_rate = j.at("arrival_rate").get<double>();
    s.count = j.at("count").get<std::size_t>();
    s.receivers = j.at("receivers").get<std::size_t>();
    s.seed = j.value("seed", std::uint64_t{0});
    if (j.contains("objective")) s.objective = ObjectiveVector::parse(j.at("objective").get<std::string>());
    const auto& vol = j.contains("volume") ? j.at("volume") : nlohmann::json("heavy-tailed");
    const std::string dist = vol.is_string() ? vol.get<std::string>() : vol.at("distribution").get<std::string>();
    if (dist == "light-tailed") {
      s.volumes = VolumeDistribution::LightTailed;
    } else if (dist == "heavy-tailed") {
      s.volumes = VolumeDistribution::HeavyTailed;
    } else if (dist == "empirical") {
      s.volumes = VolumeDistribution::Empirical;
      if (!vol.is_object() || !vol.contains("file")) throw ParseError("workload: empirical volumes need a 'file'");
      std::filesystem::path file = vol.at("file").get<std::string>();
      if (file.is_relative()) file = base / file;
      s.empirical_volumes = parse_volume_list(detail::read_file(file));
    } else {
      throw ParseError("workload: unknown volume distribution '" + dist + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("workload: ") + e.what());
  }
  return s;
}

/// Seeded trace: Poisson arrivals bucketed to whole timeslots, sources in a
/// shuffled round robin over all nodes, receivers drawn uniformly without
/// replacement and listed by node id.
inline std::vector<TransferRequest> gen_trace(const WorkloadSpec& spec, const Topology& topo) {
  spec.validate(topo.node_count());
  std::mt19937_64 rng(spec.seed);
  std::exponential_distribution<double> gap(spec.arrival_rate);
  std::exponential_distribution<double> light(1.0 / kMeanVolume);
  const auto heavy = TruncatedPareto::with_mean(kMinHeavyVolume, kMaxHeavyVolume, kMeanVolume);

  const std::size_t n = topo.node_count();
  std::vector<std::uint32_t> sources(n);
  std::iota(sources.begin(), sources.end(), 0u);
  std::shuffle(sources.begin(), sources.end(), rng);

  const ObjectiveVector omega = spec.objective ? *spec.objective : ObjectiveVector::all_ones(spec.receivers);
  std::vector<TransferRequest> trace;
  trace.reserve(spec.count);
  double clock = 0.0;
  std::vector<std::uint32_t> others;
  for (std::size_t i = 0; i < spec.count; ++i) {
    TransferRequest r;
    r.id = i;
    clock += gap(rng);
    r.arrival = static_cast<Timeslot>(std::floor(clock));
    r.source = NodeId(sources[i % n]);
    switch (spec.volumes) {
      case VolumeDistribution::LightTailed:
        r.volume = light(rng);
        break;
      case VolumeDistribution::HeavyTailed:
        r.volume = heavy(rng);
        break;
      case VolumeDistribution::Empirical:
        r.volume = spec.empirical_volumes[std::uniform_int_distribution<std::size_t>(
            0, spec.empirical_volumes.size() - 1)(rng)];
        break;
    }
    // Partial Fisher-Yates over the other nodes.
    others.clear();
    for (std::uint32_t v = 0; v < n; ++v)
      if (v != r.source.value) others.push_back(v);
    for (std::size_t k = 0; k < spec.receivers; ++k) {
      const auto j = std::uniform_int_distribution<std::size_t>(k, others.size() - 1)(rng);
      std::swap(others[k], others[j]);
      r.receivers.push_back(NodeId(others[k]));
    }
    std::sort(r.receivers.begin(), r.receivers.end());
    r.objective = omega;
    trace.push_back(std::move(r));
  }
  return trace;
}

inline constexpr std::string_view kTraceHeader = "id,arrival,source,receivers,volume,omega";

inline std::string write_trace_csv(std::span<const TransferRequest> trace, const Topology& topo) {
  std::string out(kTraceHeader);
  out += '\n';
  for (const auto& r : trace) {
    out += std::to_string(r.id) + ',' + std::to_string(r.arrival) + ',' + topo.name(r.source) + ',';
    for (std::size_t k = 0; k < r.receivers.size(); ++k) {
      if (k) out += ';';
      out += topo.name(r.receivers[k]);
    }
    out += ',' + format_double(r.volume) + ',' + r.objective.str() + '\n';
  }
  return out;
}

inline std::vector<TransferRequest> read_trace_csv(std::string_view text, const Topology& topo) {
  std::vector<TransferRequest> trace;
  std::size_t line_no = 0;
  bool header = true;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    auto line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (header) {
      if (line != kTraceHeader) throw ParseError("trace: expected header '" + std::string(kTraceHeader) + "'");
      header = false;
      continue;
    }
    const std::string where = "trace line " + std::to_string(line_no);
    std::vector<std::string_view> f;
    for (std::size_t start = 0;;) {
      const auto comma = line.find(',', start);
      f.push_back(line.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (f.size() != 6) throw ParseError(where + ": expected 6 fields, got " + std::to_string(f.size()));
    TransferRequest r;
    r.id = detail::parse_int<TransferId>(f[0], where);
    r.arrival = detail::parse_int<Timeslot>(f[1], where);
    r.source = topo.node(f[2]);
    for (std::size_t start = 0;;) {
      const auto semi = f[3].find(';', start);
      r.receivers.push_back(topo.node(f[3].substr(start, semi == std::string_view::npos ? std::string_view::npos : semi - start)));
      if (semi == std::string_view::npos) break;
      start = semi + 1;
    }
    r.volume = detail::parse_double(f[4], where);
    r.objective = ObjectiveVector::parse(f[5]);
    r.validate(topo);
    trace.push_back(std::move(r));
  }
  if (header) throw ParseError("trace: missing header");
  return trace;
}

}  // namespace iris

#endif  // IRIS_WORKLOAD_HPP
