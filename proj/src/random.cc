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

#include "qsv/random.h"

#include "qsv/errors.h"

namespace qsv {

std::uint64_t RandomStream::below(std::uint64_t bound) {
    if (bound == 0) {
        throw ValidationError("RandomStream::below: bound must be positive");
    }
    // Largest multiple of bound that fits; reject draws at or above it.
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
    std::uint64_t x;
    do {
        x = engine_();
    } while (x >= limit);
    return x % bound;
}

std::size_t RandomStream::choose(std::span<const double> weights) {
    double total = 0.0;
    for (double w : weights) {
        total += w;
    }
    if (weights.empty() || !(total > 0.0)) {
        throw ValidationError("RandomStream::choose: weights must have positive sum");
    }
    const double u = uniform() * total;
    double acc = 0.0;
    for (std::size_t i = 0; i < weights.size(); ++i) {
        acc += weights[i];
        if (u < acc) {
            return i;
        }
    }
    // Rounding can leave u == total; fall back to the last positive weight.
    for (std::size_t i = weights.size(); i-- > 0;) {
        if (weights[i] > 0.0) {
            return i;
        }
    }
    return weights.size() - 1;
}

std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t experiment_id, std::uint64_t round) {
    return mix64(mix64(master_seed ^ mix64(experiment_id)) ^ mix64(round + 1));
}

}  // namespace qsv
