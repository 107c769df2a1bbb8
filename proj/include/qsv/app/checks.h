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

#ifndef QSV_APP_CHECKS_H
#define QSV_APP_CHECKS_H

#include <cstdint>
#include <string>

#include "json.hpp"
#include "qsv/random.h"

namespace qsv::app {

/// Outcome of one verification suite. `counterexample` is null unless a
/// check failed; it then holds the first failing case.
struct CheckReport {
    std::string suite;
    std::int64_t checks = 0;
    std::int64_t violations = 0;
    nlohmann::ordered_json details = nlohmann::ordered_json::object();
    nlohmann::ordered_json counterexample = nullptr;

    bool passed() const {
        return violations == 0;
    }
    nlohmann::ordered_json to_json() const;
};

/// Binomial-tail monotonicity in k, z and p for every z <= 200, k < z on a
/// fixed p grid; the zero-failure closed form of J; strict decrease of the
/// defensive table h_z on [k, N + 1] for N up to 200 and lambda in
/// {0.1, 1/3, 0.9}; and h_{N+1} = B_{N,k}(nu).
CheckReport check_binom();

/// Brute-force worst-case scan against the standard certificate.
CheckReport check_sqsv_scan(std::int64_t grid_size);

/// Random product-sequence adversaries against the defensive certificate.
CheckReport check_dqsv_sweep(std::int64_t n, std::int64_t k, double lambda, std::int64_t trials,
                             const SeedPlan &seeds, int threads);

/// Factorized acceptance/fidelity sums against 2^N enumeration for every
/// N <= n_max, `trials` random mixtures per N and every k < N.
CheckReport check_factorization(std::int64_t n_max, std::int64_t trials, const SeedPlan &seeds);

}  // namespace qsv::app

#endif
