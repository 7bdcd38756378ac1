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

#include "leakstack/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_01.hpp>
#include <boost/random/uniform_int_distribution.hpp>

namespace leakstack {

int default_workers() {
    if (const char *env = std::getenv("LEAKSTACK_WORKERS")) {
        try {
            const int w = std::stoi(env);
            if (w > 0) return w;
        } catch (const std::exception &) {
        }
    }
    return 1;
}

void parallel_for(size_t n, int workers, const std::function<void(size_t)> &fn) {
    const size_t threads = std::min<size_t>(n, static_cast<size_t>(std::max(1, workers)));
    if (threads <= 1) {
        for (size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto work = [&] {
        while (true) {
            const size_t i = next.fetch_add(1);
            if (i >= n) return;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!error) error = std::current_exception();
                next.store(n);
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (size_t t = 0; t < threads; ++t) pool.emplace_back(work);
    for (auto &t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

uint64_t stream_seed(uint64_t seed, uint64_t stream) {
    uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

Rng make_stream(uint64_t seed, uint64_t stream) { return Rng(stream_seed(seed, stream)); }

double uniform01(Rng &rng) { return boost::random::uniform_01<double>()(rng); }

double normal01(Rng &rng) { return boost::random::normal_distribution<double>(0.0, 1.0)(rng); }

uint64_t uniform_index(Rng &rng, uint64_t n) {
    return boost::random::uniform_int_distribution<uint64_t>(0, n - 1)(rng);
}

}  // namespace leakstack
