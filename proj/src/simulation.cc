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

#include "qsv/simulation.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>
#include <utility>

#include "qsv/errors.h"

namespace qsv {

namespace {

constexpr std::int64_t kBatchRounds = 1024;

void run_tests(const ProductSequence &seq, std::size_t skip, std::size_t count, const HomogeneousStrategy &strategy,
               RandomStream &rng, RunOutcome &out) {
    out.settings.reserve(count);
    out.passes.reserve(count);
    for (std::size_t i = 0; i < seq.states.size() && out.passes.size() < count; ++i) {
        if (i == skip) {
            continue;
        }
        const TestResult r = sample_test(strategy, seq.states[i], rng);
        out.settings.push_back(static_cast<std::uint8_t>(r.setting));
        out.passes.push_back(r.passed);
        if (!r.passed) {
            ++out.failures;
        }
    }
}

RunOutcome run_round(const ProductSequenceMixture &m, std::int64_t n, const HomogeneousStrategy &strategy,
                     Protocol protocol, RandomStream &rng) {
    return protocol == Protocol::kSqsv ? run_sqsv_round(m, n, strategy, rng) : run_dqsv_round(m, n, strategy, rng);
}

}  // namespace

void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)> &fn) {
    const std::size_t workers = std::min<std::size_t>(threads > 1 ? static_cast<std::size_t>(threads) : 1, count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) {
            fn(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(failure_mutex);
                    if (!failure) {
                        failure = std::current_exception();
                    }
                }
            }
        });
    }
    for (auto &t : pool) {
        t.join();
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
}

RunOutcome run_sqsv_round(const ProductSequenceMixture &m, std::int64_t n, const HomogeneousStrategy &strategy,
                          RandomStream &rng) {
    if (n < 1 || static_cast<std::size_t>(n) > m.num_systems()) {
        throw ValidationError("run_sqsv_round: source has " + std::to_string(m.num_systems()) + " systems, need " +
                              std::to_string(n));
    }
    const SampledSequence drawn = sample_sequence(m, rng);
    RunOutcome out;
    out.branch_index = drawn.branch_index;
    const auto count = static_cast<std::size_t>(n);
    run_tests(drawn.sequence, drawn.sequence.states.size(), count, strategy, rng, out);
    double fid = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
        fid += drawn.sequence.states[i].overlap(strategy.target());
    }
    out.unconditional_truth_fidelity = fid / static_cast<double>(count);
    return out;
}

RunOutcome run_dqsv_round(const ProductSequenceMixture &m, std::int64_t n, const HomogeneousStrategy &strategy,
                          RandomStream &rng) {
    if (n < 1 || m.num_systems() != static_cast<std::size_t>(n) + 1) {
        throw ValidationError("run_dqsv_round: source has " + std::to_string(m.num_systems()) + " systems, need " +
                              std::to_string(n + 1));
    }
    const SampledSequence drawn = sample_sequence(m, rng);
    RunOutcome out;
    out.branch_index = drawn.branch_index;
    const auto leftover = static_cast<std::size_t>(rng.below(static_cast<std::uint64_t>(n) + 1));
    out.leftover_index = leftover;
    run_tests(drawn.sequence, leftover, static_cast<std::size_t>(n), strategy, rng, out);

    const DensityMatrix &kept = drawn.sequence.states[leftover];
    out.leftover_truth_fidelity = kept.overlap(strategy.target());
    out.leftover_test_passed = sample_test(strategy, kept, rng).passed;
    double fid = 0.0;
    for (const auto &s : drawn.sequence.states) {
        fid += s.overlap(strategy.target());
    }
    out.unconditional_truth_fidelity = fid / static_cast<double>(drawn.sequence.states.size());
    return out;
}

std::vector<RunOutcome> simulate_rounds(const ProductSequenceMixture &m, std::int64_t n, std::int64_t k,
                                        const HomogeneousStrategy &strategy, Protocol protocol,
                                        const StoppingRule &rule, const SeedPlan &seeds, int threads) {
    if (rule.max_rounds < 1) {
        throw ValidationError("stopping rule needs at least one round");
    }
    if (rule.target_acceptances && *rule.target_acceptances < 1) {
        throw ValidationError("target acceptances must be positive");
    }
    if (k < 0) {
        throw ValidationError("k must be non-negative");
    }
    auto simulate_range = [&](std::int64_t first, std::int64_t count) {
        std::vector<RunOutcome> batch(static_cast<std::size_t>(count));
        parallel_for(batch.size(), threads, [&](std::size_t i) {
            RandomStream rng = seeds.stream(static_cast<std::uint64_t>(first) + i);
            batch[i] = run_round(m, n, strategy, protocol, rng);
        });
        return batch;
    };

    if (!rule.target_acceptances) {
        return simulate_range(0, rule.max_rounds);
    }
    std::vector<RunOutcome> out;
    std::int64_t accepted = 0;
    for (std::int64_t start = 0; start < rule.max_rounds;) {
        const std::int64_t count = std::min(kBatchRounds, rule.max_rounds - start);
        for (auto &o : simulate_range(start, count)) {
            accepted += o.accepted(k) ? 1 : 0;
            out.push_back(std::move(o));
            if (accepted >= *rule.target_acceptances) {
                return out;
            }
        }
        start += count;
    }
    return out;
}

MeanEstimate estimate_mean(std::span<const double> values) {
    MeanEstimate est;
    est.count = static_cast<std::int64_t>(values.size());
    if (values.empty()) {
        return est;
    }
    double sum = 0.0;
    for (double v : values) {
        sum += v;
    }
    est.mean = sum / static_cast<double>(values.size());
    if (values.size() > 1) {
        double sq = 0.0;
        for (double v : values) {
            sq += (v - est.mean) * (v - est.mean);
        }
        est.std_dev = std::sqrt(sq / static_cast<double>(values.size() - 1));
        est.std_error = est.std_dev / std::sqrt(static_cast<double>(values.size()));
    }
    return est;
}

ExperimentSummary summarize(std::span<const RunOutcome> outcomes, std::int64_t n, std::int64_t k, Protocol protocol,
                            const HomogeneousStrategy &strategy) {
    if (outcomes.empty()) {
        throw ValidationError("summarize: no rounds");
    }
    ExperimentSummary s;
    s.protocol = protocol;
    s.n = n;
    s.k = k;
    s.rounds = static_cast<std::int64_t>(outcomes.size());

    std::vector<double> uncond_truth;
    std::vector<double> uncond_measured;
    std::vector<double> cond_truth;
    std::vector<double> cond_measured;
    uncond_truth.reserve(outcomes.size());
    uncond_measured.reserve(outcomes.size());
    for (const auto &o : outcomes) {
        ++s.failure_histogram[o.failures];
        uncond_truth.push_back(o.unconditional_truth_fidelity);
        const double rate = static_cast<double>(o.passes.size() - static_cast<std::size_t>(o.failures)) /
                            static_cast<double>(o.passes.size());
        uncond_measured.push_back(fidelity_from_pass_rate(rate, strategy.lambda()));
        if (!o.accepted(k)) {
            continue;
        }
        ++s.accepted;
        if (o.leftover_truth_fidelity) {
            cond_truth.push_back(*o.leftover_truth_fidelity);
        }
        if (o.leftover_test_passed) {
            cond_measured.push_back(fidelity_from_pass_rate(*o.leftover_test_passed ? 1.0 : 0.0, strategy.lambda()));
        }
    }
    s.p_hat = static_cast<double>(s.accepted) / static_cast<double>(s.rounds);
    s.p_ci = clopper_pearson(s.accepted, s.rounds);
    s.unconditional_fidelity_truth = estimate_mean(uncond_truth);
    s.unconditional_fidelity_measured = estimate_mean(uncond_measured);
    if (!cond_truth.empty()) {
        s.conditional_fidelity_truth = estimate_mean(cond_truth);
    }
    if (!cond_measured.empty()) {
        s.conditional_fidelity_measured = estimate_mean(cond_measured);
    }
    return s;
}

ExperimentSummary run_experiment(const ProductSequenceMixture &m, std::int64_t n, std::int64_t k,
                                 const HomogeneousStrategy &strategy, const StoppingRule &rule, Protocol protocol,
                                 const SeedPlan &seeds, int threads) {
    const auto outcomes = simulate_rounds(m, n, k, strategy, protocol, rule, seeds, threads);
    return summarize(outcomes, n, k, protocol, strategy);
}

std::vector<ScalingRow> scaling_experiment(const ScalingOptions &options, const HomogeneousStrategy &strategy,
                                           const SeedPlan &seeds, int threads) {
    const auto &grid = options.n_grid;
    if (grid.empty() || grid.front() < 1 || !std::is_sorted(grid.begin(), grid.end())) {
        throw ValidationError("scaling grid must be non-empty, positive and ascending");
    }
    if (options.rounds < 1) {
        throw ValidationError("scaling experiment needs at least one round");
    }
    const DensityMatrix copy = werner_state(options.noise.fidelity);
    const auto rounds = static_cast<std::size_t>(options.rounds);

    // failures[r][g]: failures among the first grid[g] tests of round r.
    std::vector<std::vector<std::int64_t>> failures(rounds);
    parallel_for(rounds, threads, [&](std::size_t r) {
        RandomStream rng = seeds.stream(r);
        auto &row = failures[r];
        row.reserve(grid.size());
        std::int64_t seen = 0;
        std::int64_t tests = 0;
        for (std::int64_t target : grid) {
            for (; tests < target; ++tests) {
                seen += sample_test(strategy, copy, rng).passed ? 0 : 1;
            }
            row.push_back(seen);
        }
    });

    std::map<std::pair<std::int64_t, std::int64_t>, std::pair<double, double>> cache;
    auto infidelities = [&](std::int64_t n, std::int64_t k) {
        const auto key = std::make_pair(n, k);
        if (auto it = cache.find(key); it != cache.end()) {
            return it->second;
        }
        std::pair<double, double> eps{1.0, 1.0};
        if (k < n) {
            CertificateQuery q{Protocol::kSqsv, n, k, options.delta, strategy.lambda()};
            eps.first = sqsv_certificate(q).infidelity_bound;
            q.protocol = Protocol::kDqsv;
            eps.second = dqsv_certificate(q).infidelity_bound;
        }
        cache.emplace(key, eps);
        return eps;
    };

    std::vector<ScalingRow> rows;
    rows.reserve(grid.size());
    for (std::size_t g = 0; g < grid.size(); ++g) {
        ScalingRow row;
        row.n = grid[g];
        std::vector<double> ks;
        std::vector<double> es;
        std::vector<double> ed;
        for (std::size_t r = 0; r < rounds; ++r) {
            const std::int64_t k = failures[r][g];
            const auto [s, d] = infidelities(row.n, k);
            if (r == 0) {
                row.k_single = k;
                row.eps_sqsv_single = s;
                row.eps_dqsv_single = d;
            }
            ks.push_back(static_cast<double>(k));
            es.push_back(s);
            ed.push_back(d);
        }
        row.k = estimate_mean(ks);
        row.eps_sqsv = estimate_mean(es);
        row.eps_dqsv = estimate_mean(ed);
        rows.push_back(row);
    }
    return rows;
}

}  // namespace qsv
