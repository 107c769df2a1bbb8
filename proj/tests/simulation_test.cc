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

#include <cmath>
#include <numbers>
#include <vector>

#include "gtest/gtest.h"
#include "qsv/errors.h"
#include "qsv/oracle.h"

using namespace qsv;

namespace {

constexpr double kPi = std::numbers::pi;

double binomial_sigma(double p, double trials) {
    return std::sqrt(p * (1.0 - p) / trials);
}

}  // namespace

TEST(RandomStreamTest, DeterministicAndIndependentOfOrder) {
    const SeedPlan plan{42, 7};
    RandomStream a = plan.stream(5);
    RandomStream b = plan.stream(5);
    for (int i = 0; i < 100; ++i) {
        ASSERT_EQ(a.next_u64(), b.next_u64());
    }
    EXPECT_NE(plan.stream(5).next_u64(), plan.stream(6).next_u64());
    EXPECT_NE(plan.stream(5).next_u64(), plan.child(1).stream(5).next_u64());
    EXPECT_NE(derive_seed(1, 0, 0), derive_seed(2, 0, 0));
}

TEST(RandomStreamTest, Ranges) {
    RandomStream rng(3);
    std::vector<int> counts(7);
    const int draws = 70000;
    for (int i = 0; i < draws; ++i) {
        const double u = rng.uniform();
        ASSERT_GE(u, 0.0);
        ASSERT_LT(u, 1.0);
        const auto v = rng.below(7);
        ASSERT_LT(v, 7u);
        ++counts[v];
    }
    // Chi-square with 6 degrees of freedom; 16.81 is the 99% quantile.
    double chi2 = 0.0;
    for (int c : counts) {
        chi2 += (c - draws / 7.0) * (c - draws / 7.0) / (draws / 7.0);
    }
    EXPECT_LT(chi2, 16.81);
    EXPECT_FALSE(rng.bernoulli(0.0));
    EXPECT_TRUE(rng.bernoulli(1.0));
}

TEST(SqsvRound, IdealSourceNeverFails) {
    const auto s = build_singlet_strategy();
    const auto m = honest_iid(11, NoiseSpec{1.0});
    RandomStream rng(1);
    for (int i = 0; i < 1000; ++i) {
        const RunOutcome o = run_sqsv_round(m, 10, s, rng);
        ASSERT_EQ(o.failures, 0);
        ASSERT_EQ(o.passes.size(), 10u);
        ASSERT_EQ(o.settings.size(), 10u);
        ASSERT_FALSE(o.leftover_index.has_value());
        ASSERT_NEAR(o.unconditional_truth_fidelity, 1.0, 1e-12);
    }
}

TEST(SqsvRound, MixedSourceFailureCount) {
    const auto s = build_singlet_strategy();
    const auto m = honest_iid(21, NoiseSpec{0.25});
    RandomStream rng(2);
    const int rounds = 10000;
    const std::int64_t n = 20;
    double total = 0.0;
    for (int i = 0; i < rounds; ++i) {
        const RunOutcome o = run_sqsv_round(m, n, s, rng);
        std::int64_t fails = 0;
        for (bool p : o.passes) {
            fails += p ? 0 : 1;
        }
        ASSERT_EQ(fails, o.failures);
        total += static_cast<double>(o.failures);
    }
    // Binomial(20, 1/2): mean 10, variance 5.
    EXPECT_NEAR(total / rounds, 10.0, 4.0 * std::sqrt(5.0 / rounds));
    EXPECT_THROW(run_sqsv_round(m, 22, s, rng), ValidationError);
}

TEST(SqsvRound, Rho1IsBimodal) {
    const auto s = build_singlet_strategy();
    const auto m = rho1(100, NoiseSpec{1.0});
    RandomStream rng(3);
    const int rounds = 10000;
    int singlet_rounds = 0;
    double mixed_failures = 0.0;
    int mixed_rounds = 0;
    for (int i = 0; i < rounds; ++i) {
        const RunOutcome o = run_sqsv_round(m, 100, s, rng);
        if (o.branch_index == 0) {
            ++singlet_rounds;
            ASSERT_EQ(o.failures, 0);
        } else {
            ++mixed_rounds;
            mixed_failures += static_cast<double>(o.failures);
        }
    }
    EXPECT_NEAR(static_cast<double>(singlet_rounds) / rounds, 2.0 / 3.0, 4.0 * binomial_sigma(2.0 / 3.0, rounds));
    EXPECT_NEAR(mixed_failures / mixed_rounds, 50.0, 4.0 * std::sqrt(25.0 / mixed_rounds));
}

TEST(DqsvRound, IdealSource) {
    const auto s = build_singlet_strategy();
    const auto m = honest_iid(6, NoiseSpec{1.0});
    RandomStream rng(4);
    for (int i = 0; i < 1000; ++i) {
        const RunOutcome o = run_dqsv_round(m, 5, s, rng);
        ASSERT_EQ(o.failures, 0);
        ASSERT_EQ(o.passes.size(), 5u);
        ASSERT_TRUE(o.leftover_index.has_value());
        ASSERT_NEAR(*o.leftover_truth_fidelity, 1.0, 1e-12);
        ASSERT_TRUE(*o.leftover_test_passed);
    }
    EXPECT_THROW(run_dqsv_round(m, 4, s, rng), ValidationError);
}

TEST(DqsvRound, LeftoverIsUniform) {
    const auto s = build_singlet_strategy();
    const auto m = honest_iid(6, NoiseSpec{0.9});
    RandomStream rng(5);
    const int rounds = 100000;
    std::vector<int> counts(6);
    for (int i = 0; i < rounds; ++i) {
        ++counts[*run_dqsv_round(m, 5, s, rng).leftover_index];
    }
    double chi2 = 0.0;
    for (int c : counts) {
        chi2 += (c - rounds / 6.0) * (c - rounds / 6.0) / (rounds / 6.0);
    }
    // 99% quantile of chi-square with 5 degrees of freedom.
    EXPECT_LT(chi2, 15.09);
}

TEST(DqsvRound, OddCopySometimesEscapes) {
    const auto s = build_singlet_strategy();
    const auto m = rho2(5, kPi, NoiseSpec{1.0});
    RandomStream rng(6);
    double sum = 0.0;
    int accepted = 0;
    for (int i = 0; i < 20000; ++i) {
        const RunOutcome o = run_dqsv_round(m, 5, s, rng);
        if (o.accepted(0)) {
            sum += *o.leftover_truth_fidelity;
            ++accepted;
        }
    }
    ASSERT_GT(accepted, 0);
    const double mean = sum / accepted;
    EXPECT_LT(mean, 1.0);
    EXPECT_GT(mean, 0.0);
    const ExactStats exact = exact_stats(m, 0, s);
    EXPECT_NEAR(mean, *exact.conditional_fidelity,
                4.0 * binomial_sigma(*exact.conditional_fidelity, accepted));
}

TEST(Experiment, IdealHonest) {
    const auto s = build_singlet_strategy();
    const auto m = honest_iid(11, NoiseSpec{1.0});
    for (std::int64_t k : {0, 2}) {
        const auto sum = run_experiment(m, 10, k, s, StoppingRule::fixed(500), Protocol::kDqsv, SeedPlan{1, 2});
        EXPECT_EQ(sum.rounds, 500);
        EXPECT_EQ(sum.accepted, 500);
        EXPECT_EQ(sum.p_hat, 1.0);
        ASSERT_TRUE(sum.conditional_fidelity_truth.has_value());
        EXPECT_NEAR(sum.conditional_fidelity_truth->mean, 1.0, 1e-12);
        EXPECT_NEAR(sum.conditional_fidelity_measured->mean, 1.0, 1e-12);
        EXPECT_EQ(sum.failure_histogram.at(0), 500);
    }
}

TEST(Experiment, Rho1AcceptanceAndConditionalFidelity) {
    const auto s = build_singlet_strategy();
    const auto m = rho1(100, NoiseSpec{1.0});
    const int rounds = 10000;
    const auto sum = run_experiment(m, 100, 0, s, StoppingRule::fixed(rounds), Protocol::kDqsv, SeedPlan{9, 1}, 4);
    EXPECT_EQ(sum.rounds, rounds);
    EXPECT_EQ(sum.p_hat, static_cast<double>(sum.accepted) / rounds);
    EXPECT_NEAR(sum.p_hat, 2.0 / 3.0, 4.0 * binomial_sigma(2.0 / 3.0, rounds));
    EXPECT_LE(sum.p_ci.low, sum.p_hat);
    EXPECT_GE(sum.p_ci.high, sum.p_hat);
    EXPECT_NEAR(sum.conditional_fidelity_truth->mean, 1.0, 1e-12);
    EXPECT_NEAR(sum.unconditional_fidelity_truth.mean, 0.75, 4.0 * sum.unconditional_fidelity_truth.std_error + 1e-12);
    const auto k3 = run_experiment(m, 100, 3, s, StoppingRule::fixed(2000), Protocol::kDqsv, SeedPlan{9, 2}, 4);
    EXPECT_NEAR(k3.conditional_fidelity_truth->mean, 1.0, 1e-12);
}

TEST(Experiment, ZeroAcceptedLeavesConditionalAbsent) {
    const auto s = build_singlet_strategy();
    const auto m = honest_iid(41, NoiseSpec{0.25});
    const auto sum = run_experiment(m, 40, 0, s, StoppingRule::fixed(50), Protocol::kDqsv, SeedPlan{3, 3});
    EXPECT_EQ(sum.accepted, 0);
    EXPECT_FALSE(sum.conditional_fidelity_truth.has_value());
    EXPECT_FALSE(sum.conditional_fidelity_measured.has_value());
    const auto sq = run_experiment(m, 40, 40, s, StoppingRule::fixed(50), Protocol::kSqsv, SeedPlan{3, 3});
    EXPECT_EQ(sq.accepted, 50);
    EXPECT_FALSE(sq.conditional_fidelity_truth.has_value());
}

TEST(Experiment, AcceptanceMatchesOracle) {
    const auto s = build_singlet_strategy();
    const int rounds = 100000;
    const std::vector<ProductSequenceMixture> sources = {
        honest_iid(5, NoiseSpec{0.9}), rho1(6, NoiseSpec{0.98}), rho2(4, kPi, NoiseSpec{1.0}),
        rho2(9, kPi / 2, NoiseSpec{0.95}),
        build_mixture({{0.3, {StateSpec::mixed(), StateSpec::singlet(), StateSpec::werner(0.7), StateSpec::singlet()}, ""},
                       {0.7, {StateSpec::singlet_phi(1.0), StateSpec::singlet(), StateSpec::singlet(), StateSpec::mixed()},
                        ""}})};
    std::uint64_t id = 0;
    for (const auto &m : sources) {
        const auto n = static_cast<std::int64_t>(m.num_systems()) - 1;
        for (std::int64_t k = 0; k <= std::min<std::int64_t>(2, n - 1); ++k) {
            const auto sum = run_experiment(m, n, k, s, StoppingRule::fixed(rounds), Protocol::kDqsv,
                                            SeedPlan{77, ++id}, 4);
            const ExactStats exact = exact_stats(m, k, s);
            ASSERT_NEAR(sum.p_hat, exact.p_k, 4.0 * binomial_sigma(exact.p_k, rounds) + 1e-12) << id;
            if (exact.conditional_fidelity && sum.conditional_fidelity_truth) {
                const auto &truth = *sum.conditional_fidelity_truth;
                const auto &measured = *sum.conditional_fidelity_measured;
                ASSERT_NEAR(truth.mean, *exact.conditional_fidelity, 4.0 * truth.std_error + 1e-12) << id;
                const double combined = std::hypot(truth.std_error, measured.std_error);
                ASSERT_NEAR(truth.mean, measured.mean, 4.0 * combined + 1e-12) << id;
            }
        }
    }
}

TEST(Experiment, StopAfterAcceptances) {
    const auto s = build_singlet_strategy();
    const auto m = rho2(5, kPi, NoiseSpec{1.0});
    const auto rule = StoppingRule::until_accepted(1000, 1000000);
    const auto sum = run_experiment(m, 5, 1, s, rule, Protocol::kDqsv, SeedPlan{5, 5}, 3);
    EXPECT_EQ(sum.accepted, 1000);
    EXPECT_GE(sum.rounds, 1000);
    const auto capped = run_experiment(honest_iid(21, NoiseSpec{0.25}), 20, 0, s, StoppingRule::until_accepted(10, 300),
                                       Protocol::kDqsv, SeedPlan{5, 6});
    EXPECT_EQ(capped.rounds, 300);
    EXPECT_LT(capped.accepted, 10);
}

TEST(Experiment, DeterministicAcrossThreadCounts) {
    const auto s = build_singlet_strategy();
    const auto m = rho1(20, NoiseSpec{0.98});
    const SeedPlan plan{1234, 1};
    const auto one = simulate_rounds(m, 20, 1, s, Protocol::kDqsv, StoppingRule::fixed(3000), plan, 1);
    const auto many = simulate_rounds(m, 20, 1, s, Protocol::kDqsv, StoppingRule::fixed(3000), plan, 7);
    ASSERT_EQ(one.size(), many.size());
    for (std::size_t i = 0; i < one.size(); ++i) {
        ASSERT_EQ(one[i].settings, many[i].settings);
        ASSERT_EQ(one[i].passes, many[i].passes);
        ASSERT_EQ(one[i].branch_index, many[i].branch_index);
        ASSERT_EQ(one[i].leftover_index, many[i].leftover_index);
    }
    const auto a = run_experiment(m, 20, 1, s, StoppingRule::until_accepted(200, 5000), Protocol::kDqsv, plan, 1);
    const auto b = run_experiment(m, 20, 1, s, StoppingRule::until_accepted(200, 5000), Protocol::kDqsv, plan, 5);
    EXPECT_EQ(a.rounds, b.rounds);
    EXPECT_EQ(a.accepted, b.accepted);
    EXPECT_EQ(a.conditional_fidelity_truth->mean, b.conditional_fidelity_truth->mean);
    EXPECT_EQ(a.failure_histogram, b.failure_histogram);
}

TEST(MeanEstimateTest, Basics) {
    const std::vector<double> v = {1.0, 2.0, 3.0, 4.0};
    const MeanEstimate e = estimate_mean(v);
    EXPECT_EQ(e.count, 4);
    EXPECT_DOUBLE_EQ(e.mean, 2.5);
    EXPECT_DOUBLE_EQ(e.std_dev, std::sqrt(5.0 / 3.0));
    EXPECT_DOUBLE_EQ(e.std_error, std::sqrt(5.0 / 3.0) / 2.0);
    const std::vector<double> one = {0.7};
    EXPECT_EQ(estimate_mean(one).std_dev, 0.0);
}

TEST(Scaling, IdealSourceClosedForm) {
    const auto s = build_singlet_strategy();
    ScalingOptions opt;
    opt.noise = NoiseSpec{1.0};
    opt.delta = 0.05;
    opt.n_grid = {1, 2, 10, 50, 100, 1000};
    opt.rounds = 3;
    const auto rows = scaling_experiment(opt, s, SeedPlan{1, 1});
    ASSERT_EQ(rows.size(), opt.n_grid.size());
    for (const auto &r : rows) {
        const double closed = 1.5 * -std::expm1(std::log(0.05) / static_cast<double>(r.n));
        EXPECT_EQ(r.k_single, 0);
        EXPECT_EQ(r.k.mean, 0.0);
        EXPECT_NEAR(r.eps_sqsv_single, std::min(1.0, closed), 1e-12) << r.n;
        EXPECT_NEAR(r.eps_sqsv.mean, std::min(1.0, closed), 1e-12) << r.n;
        EXPECT_GE(r.eps_dqsv.mean, r.eps_sqsv.mean - 1e-12);
    }
}

TEST(Scaling, NoisySourceImproves) {
    const auto s = build_singlet_strategy();
    ScalingOptions opt;
    opt.noise = NoiseSpec{0.99};
    opt.delta = 0.05;
    opt.n_grid = {10, 100, 1000};
    opt.rounds = 20;
    const auto rows = scaling_experiment(opt, s, SeedPlan{2, 1}, 4);
    EXPECT_GT(rows[0].eps_dqsv.mean, rows[2].eps_dqsv.mean);
    EXPECT_LT(rows[2].eps_dqsv.mean, 0.05);
    // Expected failures at N = 1000: 1000 * nu * (1 - F) = 6.67.
    EXPECT_NEAR(rows[2].k.mean, 1000 * (2.0 / 3.0) * 0.01, 5.0 * std::sqrt(6.67 / 20.0) + 1e-9);
    EXPECT_THROW(scaling_experiment(ScalingOptions{NoiseSpec{0.99}, 0.05, {10, 5}, 1}, s, SeedPlan{}),
                 ValidationError);
}
