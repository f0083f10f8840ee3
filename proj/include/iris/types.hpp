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

#ifndef IRIS_TYPES_HPP
#define IRIS_TYPES_HPP

#include <compare>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>

namespace iris {

/// Dense index wrapper. The tag keeps node and edge indices from mixing.
template <typename Tag>
struct StrongIndex {
  std::uint32_t value = 0;

  constexpr StrongIndex() = default;
  constexpr explicit StrongIndex(std::uint32_t v) : value(v) {}

  constexpr std::size_t index() const { return value; }
  friend constexpr auto operator<=>(StrongIndex, StrongIndex) = default;
};

using NodeId = StrongIndex<struct NodeTag>;
using EdgeId = StrongIndex<struct EdgeTag>;
using TransferId = std::uint64_t;

/// Discrete simulation time. Timeslot length is fixed at 1.0.
using Timeslot = std::int64_t;

inline constexpr double kTimeslotLength = 1.0;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class UnreachableError : public Error {
 public:
  using Error::Error;
};

class HorizonExceededError : public Error {
 public:
  using Error::Error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

class InstanceTooLargeError : public Error {
 public:
  using Error::Error;
};

class NotDrainedError : public Error {
 public:
  using Error::Error;
};

}  // namespace iris

template <typename Tag>
struct std::hash<iris::StrongIndex<Tag>> {
  std::size_t operator()(iris::StrongIndex<Tag> id) const noexcept {
    return std::hash<std::uint32_t>{}(id.value);
  }
};

#endif  // IRIS_TYPES_HPP
