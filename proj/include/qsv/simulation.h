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

#ifndef QSV_SIMULATION_H
#define QSV_SIMULATION_H

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <vector>

#include "qsv/certbank.h"
#include "qsv/random.h"
#include "qsv/sources.h"
#include "qsv/strategy.h"

namespace qsv {

/// One simulated verification round.
struct RunOutcome {
    std::vector<std::uint8_t> settings;  // index into strategy.tests(), one per test
    std::vector<bool> passes;
    std::int64_t failures = 0;
    std::size_t branch_index = 0;
    /// Defensive rounds only: the untested system, its ground-truth fidelity,
    /// and the outcome of one extra test applied to it.
    std::optional<std::size_t> leftover_index;
    std::optional<double> leftover_truth_fidelity;
    std::optional<bool> leftover_test_passed;
    /// Ground-truth fidelity of the unconditional reduced state in this round:
    /// mean over the tested systems (standard) or over all n + 1 systems
    /// (defensive) of the sampled sequence.
    double unconditional_truth_fidelity = 0.0;

    bool accepted(std::int64_t k) const {
        return failures <= k;
    }
};

/// Tests the first n systems of a sampled sequence.
RunOutcome run_sqsv_round(const ProductSequenceMixture &m, std::int64_t n, const HomogeneousStrategy &strategy,
                          RandomStream &rng);

/// Picks the leftover uniformly from the n + 1 systems, tests the other n in
/// order, then applies one more test to the leftover (used only by the
/// measurement-based conditional estimator).
RunOutcome run_dqsv_round(const ProductSequenceMixture &m, std::int64_t n, const HomogeneousStrategy &strategy,
                          RandomStream &rng);

/// Either a fixed number of rounds, or rounds until `target_acceptances`
/// rounds have been accepted, never more than `max_rounds`.
struct StoppingRule {
    std::int64_t max_rounds = 1;
    std::optional<std::int64_t> target_acceptances;

    static StoppingRule fixed(std::int64_t rounds) {
        return StoppingRule{rounds, std::nullopt};
    }
    static StoppingRule until_accepted(std::int64_t acceptances, std::int64_t cap) {
        return StoppingRule{cap, acceptances};
    }
};

/// Runs rounds with per-round streams seeds.stream(round). Rounds may execute
/// on `threads` workers; the returned vector (and anything computed from it)
/// does not depend on the worker count.
std::vector<RunOutcome> simulate_rounds(const ProductSequenceMixture &m, std::int64_t n, std::int64_t k,
                                        const HomogeneousStrategy &strategy, Protocol protocol,
                                        const StoppingRule &rule, const SeedPlan &seeds, int threads = 1);

struct MeanEstimate {
    double mean = 0.0;
    double std_dev = 0.0;    // sample standard deviation across rounds
    double std_error = 0.0;  // std_dev / sqrt(count)
    std::int64_t count = 0;
};

MeanEstimate estimate_mean(std::span<const double> values);

struct ExperimentSummary {
    Protocol protocol = Protocol::kDqsv;
    std::int64_t n = 0;
    std::int64_t k = 0;
    std::int64_t rounds = 0;
    std::int64_t accepted = 0;
    double p_hat = 0.0;
    ProportionInterval p_ci{0.0, 1.0};  // two-sided 95% Clopper-Pearson
    /// Over accepted rounds; absent when nothing was accepted or the protocol
    /// has no leftover system. The truth estimator uses simulation-only ground
    /// truth; the measured one inverts the pass rate of the extra leftover test.
    std::optional<MeanEstimate> conditional_fidelity_truth;
    std::optional<MeanEstimate> conditional_fidelity_measured;
    /// Over all rounds.
    MeanEstimate unconditional_fidelity_truth;
    MeanEstimate unconditional_fidelity_measured;
    /// failures -> number of rounds.
    std::map<std::int64_t, std::int64_t> failure_histogram;
};

ExperimentSummary summarize(std::span<const RunOutcome> outcomes, std::int64_t n, std::int64_t k, Protocol protocol,
                            const HomogeneousStrategy &strategy);

ExperimentSummary run_experiment(const ProductSequenceMixture &m, std::int64_t n, std::int64_t k,
                                 const HomogeneousStrategy &strategy, const StoppingRule &rule, Protocol protocol,
                                 const SeedPlan &seeds, int threads = 1);

struct ScalingOptions {
    NoiseSpec noise;
    double delta = 0.05;
    std::vector<std::int64_t> n_grid;  // ascending
    std::int64_t rounds = 1;
};

struct ScalingRow {
    std::int64_t n = 0;
    /// First round only.
    std::int64_t k_single = 0;
    double eps_sqsv_single = 1.0;
    double eps_dqsv_single = 1.0;
    /// Across all rounds.
    MeanEstimate k;
    MeanEstimate eps_sqsv;
    MeanEstimate eps_dqsv;
};

/// Honest source, one growing run of tests per round. At each grid size N the
/// failures seen so far give k, and both certificates are evaluated at
/// (k, N, delta). When every test so far failed (k = N) no certificate exists
/// and the infidelity is reported as 1.
std::vector<ScalingRow> scaling_experiment(const ScalingOptions &options, const HomogeneousStrategy &strategy,
                                           const SeedPlan &seeds, int threads = 1);

/// Order-preserving parallel loop used by the simulators: fn(i) for i in
/// [0, count), spread across `threads` workers.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)> &fn);

}  // namespace qsv

#endif
