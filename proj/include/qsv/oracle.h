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

#ifndef QSV_ORACLE_H
#define QSV_ORACLE_H

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "qsv/random.h"
#include "qsv/sources.h"
#include "qsv/strategy.h"

namespace qsv {

/// Exact acceptance probability p_k, fidelity numerator f_k and conditional
/// fidelity F_k = f_k / p_k (absent when p_k = 0) for the defensive protocol.
struct ExactStats {
    double p_k = 0.0;
    double f_k = 0.0;
    std::optional<double> conditional_fidelity;
};

struct OracleBudget {
    std::size_t max_systems = 16;
};

/// Acceptance probability of a product-sequence mixture when a uniformly
/// random system is kept and the other N are tested with the strategy:
///
///     p_k = sum_b w_b / (N+1) * sum_l P(at most k failures among systems != l)
///
/// which equals sum_i C(N,i) tr[(omega^(N-i) (x) (1-omega)^i (x) 1) rho_sym]
/// for the permutation-symmetrized state. Per-system pass probabilities
/// tr(omega sigma_j) are combined with a failure-count recursion, so the cost
/// is O(branches * N^2 * k). Throws BudgetError beyond budget.max_systems.
double exact_pk(const ProductSequenceMixture &m, std::int64_t k, const HomogeneousStrategy &strategy,
                OracleBudget budget = {});
/// As exact_pk with the kept system weighted by <target|sigma_l|target>.
double exact_fk(const ProductSequenceMixture &m, std::int64_t k, const HomogeneousStrategy &strategy,
                OracleBudget budget = {});
ExactStats exact_stats(const ProductSequenceMixture &m, std::int64_t k, const HomogeneousStrategy &strategy,
                       OracleBudget budget = {});

/// Same quantities by brute force over all 2^N pass/fail patterns of the
/// tested systems, with failure probabilities taken from tr((1-omega) sigma).
/// Independent of the recursion in exact_stats; at most 16 systems.
ExactStats enumerate_stats(const ProductSequenceMixture &m, std::int64_t k, const HomogeneousStrategy &strategy);

/// Largest infidelity eps on the uniform grid {i / (grid_size - 1)} whose
/// worst-case state (supported on the two top eigenspaces of omega) is
/// accepted with probability B_{n,k}(1 - tr(omega tau)) >= delta.
double sqsv_worst_case_scan(std::int64_t n, std::int64_t k, double delta, double lambda, std::int64_t grid_size);

struct SoundnessCase {
    std::string mixture;  // describe() output
    double p_k = 0.0;
    double conditional_fidelity = 0.0;
    double certificate = 0.0;
    double slack = 0.0;  // conditional_fidelity - certificate
};

struct SoundnessReport {
    std::int64_t n = 0;
    std::int64_t k = 0;
    double lambda = 0.0;
    std::int64_t trials = 0;
    std::int64_t evaluated = 0;  // trials with p_k > B_{n,k}(nu)
    std::int64_t violations = 0;
    double min_slack = 1.0;
    std::optional<SoundnessCase> tightest;
    std::vector<SoundnessCase> counterexamples;  // slack < -1e-9
};

/// Slack tolerance below which a sampled state counts as a violation.
inline constexpr double kSoundnessTolerance = 1e-9;

/// Compares F_k against the defensive certificate at delta = p_k for one
/// mixture. Returns nothing when p_k <= B_{n,k}(nu) (certificate is trivially 0).
std::optional<SoundnessCase> check_dqsv_soundness(const std::vector<BranchSpec> &branches, std::int64_t k,
                                                  const HomogeneousStrategy &strategy);

/// Random mixtures of up to 8 product branches over n + 1 systems, built from
/// singlet / mixed / Werner / phase-shifted copies, each checked with
/// check_dqsv_soundness. Trial t uses seeds.stream(t).
SoundnessReport dqsv_soundness_sweep(std::int64_t n, std::int64_t k, double lambda, std::int64_t trials,
                                     const SeedPlan &seeds, int threads = 1);

/// Random mixture used by the sweep; exposed for the factorization checks.
std::vector<BranchSpec> random_adversary(std::int64_t num_systems, RandomStream &rng);

}  // namespace qsv

#endif
