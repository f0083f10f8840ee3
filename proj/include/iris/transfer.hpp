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

#ifndef IRIS_TRANSFER_HPP
#define IRIS_TRANSFER_HPP

#include <algorithm>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "iris/topology.hpp"
#include "iris/types.hpp"

namespace iris {

/// Per-rank interest bits: position i refers to the i-th fastest receiver,
/// a one marks a receiver whose own completion time matters.
class ObjectiveVector {
 public:
  ObjectiveVector() = default;
  explicit ObjectiveVector(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
    for (auto b : bits_)
      if (b > 1) throw ValidationError("objective vector entries must be 0 or 1");
  }

  static ObjectiveVector all_ones(std::size_t n) { return ObjectiveVector(std::vector<std::uint8_t>(n, 1)); }

  /// Parses a bitstring such as "10001010".
  static ObjectiveVector parse(std::string_view s) {
    std::vector<std::uint8_t> bits;
    for (char c : s) {
      if (c != '0' && c != '1') throw ParseError("objective vector must be a bitstring, got '" + std::string(s) + "'");
      bits.push_back(static_cast<std::uint8_t>(c - '0'));
    }
    return ObjectiveVector(std::move(bits));
  }

  std::string str() const {
    std::string s;
    for (auto b : bits_) s.push_back(static_cast<char>('0' + b));
    return s;
  }

  std::size_t size() const { return bits_.size(); }
  bool empty() const { return bits_.empty(); }
  bool operator[](std::size_t i) const { return bits_[i] != 0; }
  const std::vector<std::uint8_t>& bits() const { return bits_; }

  friend bool operator==(const ObjectiveVector&, const ObjectiveVector&) = default;

 private:
  std::vector<std::uint8_t> bits_;
};

/// One bulk multicast transfer.
struct TransferRequest {
  TransferId id = 0;
  NodeId source;
  std::vector<NodeId> receivers;
  double volume = 0.0;  // traffic units
  Timeslot arrival = 0;
  ObjectiveVector objective;

  void validate(const Topology& topo) const {
    const std::string label = "transfer " + std::to_string(id);
    if (source.index() >= topo.node_count()) throw ValidationError(label + ": unknown source");
    if (receivers.empty()) throw ValidationError(label + ": no receivers");
    std::vector<NodeId> sorted = receivers;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw ValidationError(label + ": duplicate receivers");
    for (NodeId r : receivers) {
      if (r.index() >= topo.node_count()) throw ValidationError(label + ": unknown receiver");
      if (r == source) throw ValidationError(label + ": source listed as receiver");
    }
    if (objective.size() != receivers.size())
      throw ValidationError(label + ": objective vector length " + std::to_string(objective.size()) +
                            " does not match " + std::to_string(receivers.size()) + " receivers");
    if (!(volume > 0.0)) throw ValidationError(label + ": volume must be positive");
    if (arrival < 0) throw ValidationError(label + ": negative arrival");
  }
};

}  // namespace iris

#endif  // IRIS_TRANSFER_HPP
