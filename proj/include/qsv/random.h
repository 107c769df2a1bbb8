// Copyright 2026 The qsv Authors
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

#ifndef QSV_RANDOM_H
#define QSV_RANDOM_H

#include <cstdint>
#include <random>
#include <span>

namespace qsv {

/// Caller-owned pseudo-random stream. Wraps std::mt19937_64, whose output
/// sequence is fixed by the standard, and derives doubles and bounded integers
/// from raw 64-bit draws without going through implementation-defined
/// distributions, so a given seed yields the same draws on every toolchain.
class RandomStream {
   public:
    explicit RandomStream(std::uint64_t seed) : engine_(seed) {
    }

    std::uint64_t next_u64() {
        return engine_();
    }
    /// Uniform on [0, 1) with 53 random bits.
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }
    /// Uniform on [lo, hi).
    double uniform(double lo, double hi) {
        return lo + (hi - lo) * uniform();
    }
    /// Uniform integer on [0, bound). Rejection sampling, no modulo bias.
    std::uint64_t below(std::uint64_t bound);
    bool bernoulli(double p) {
        return uniform() < p;
    }
    /// Index drawn with probability proportional to weights[i].
    std::size_t choose(std::span<const double> weights);

   private:
    std::mt19937_64 engine_;
};

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

/// Per-round seed: mix64(mix64(master ^ mix64(experiment_id)) ^ mix64(round + 1)).
/// Every round of every experiment gets its own stream from this function, so
/// results do not depend on execution order or thread count.
std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t experiment_id, std::uint64_t round);

/// (master seed, experiment id) pair that hands out per-round streams.
struct SeedPlan {
    std::uint64_t master_seed = 0;
    std::uint64_t experiment_id = 0;

    RandomStream stream(std::uint64_t round) const {
        return RandomStream(derive_seed(master_seed, experiment_id, round));
    }
    SeedPlan child(std::uint64_t sub_id) const {
        return SeedPlan{master_seed, mix64(experiment_id ^ mix64(sub_id + 0x5bd1e995ULL))};
    }
};

}  // namespace qsv

#endif
