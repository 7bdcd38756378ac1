// Copyright 2026 The leakstack Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>

namespace leakstack {

/// Worker count from LEAKSTACK_WORKERS, else 1.
int default_workers();

/// Runs fn(i) for i in [0, n) on up to `workers` threads. Each index runs
/// exactly once; callers write results by index so the outcome does not
/// depend on the worker count. The first exception is rethrown.
void parallel_for(size_t n, int workers, const std::function<void(size_t)> &fn);

/// Counter-based seed for (seed, stream); splitmix64 finalizer.
uint64_t stream_seed(uint64_t seed, uint64_t stream);

using Rng = std::mt19937_64;

/// Independent generator for one shot, sequence or grid point.
Rng make_stream(uint64_t seed, uint64_t stream);
/// Boost.Random distributions: identical streams on every platform.
double uniform01(Rng &rng);
double normal01(Rng &rng);
/// Uniform integer in [0, n).
uint64_t uniform_index(Rng &rng, uint64_t n);

}  // namespace leakstack
