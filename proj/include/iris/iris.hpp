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

#ifndef IRIS_IRIS_HPP
#define IRIS_IRIS_HPP

#include "iris/gml.hpp"
#include "iris/harness.hpp"
#include "iris/lower_bound.hpp"
#include "iris/rate_allocation.hpp"
#include "iris/relaxed_partitioner.hpp"
#include "iris/schedulers.hpp"
#include "iris/sim_engine.hpp"
#include "iris/topology.hpp"
#include "iris/transfer.hpp"
#include "iris/tree_selection.hpp"
#include "iris/types.hpp"
#include "iris/workload.hpp"

#endif  // IRIS_IRIS_HPP
