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

#include "qsv/strategy.h"

#include <array>
#include <cmath>
#include <numbers>
#include <random>

#include "gtest/gtest.h"
#include "qsv/errors.h"
#include "qsv/sources.h"
#include "support/random_states.h"

using namespace qsv;

TEST(SingletStrategy, SpectralParameters) {
    const auto s = build_singlet_strategy();
    EXPECT_EQ(s.lambda(), 1.0 / 3.0);
    EXPECT_EQ(s.nu(), 1.0 - 1.0 / 3.0);
    ASSERT_EQ(s.tests().size(), 3u);
    double total = 0.0;
    for (const auto &t : s.tests()) {
        total += t.weight;
    }
    EXPECT_NEAR(total, 1.0, 1e-12);
    EXPECT_EQ(s.tests()[0].label, "XX");
    EXPECT_EQ(s.tests()[2].label, "ZZ");
}

TEST(SingletStrategy, OmegaIsWeightedSumOfProjectors) {
    const auto s = build_singlet_strategy();
    ComplexMatrix sum(4);
    for (const auto &t : s.tests()) {
        sum += Complex(t.weight) * t.projector;
    }
    EXPECT_LE(sum.max_abs_diff(s.omega()), 1e-12);
}

TEST(SingletStrategy, TargetPassesWithCertainty) {
    const auto s = build_singlet_strategy();
    EXPECT_NEAR(expectation(s.omega(), projector(singlet())), 1.0, 1e-12);
    for (const auto &t : s.tests()) {
        EXPECT_NEAR(expectation(t.projector, projector(singlet())), 1.0, 1e-12) << t.label;
    }
}

TEST(SingletStrategy, MaximallyMixedPassProbability) {
    const auto s = build_singlet_strategy();
    // tr(omega) / 4 by direct summation of the diagonal.
    double diag = 0.0;
    for (std::size_t i = 0; i < 4; ++i) {
        diag += s.omega()(i, i).real();
    }
    EXPECT_NEAR(diag / 4.0, 0.5, 1e-12);
    EXPECT_NEAR(expectation(s.omega(), DensityMatrix::maximally_mixed()), 0.5, 1e-12);
    EXPECT_NEAR(pass_probability(s, DensityMatrix::maximally_mixed()), 0.5, 1e-12);
}

TEST(SingletStrategy, WernerPassProbability) {
    const auto s = build_singlet_strategy();
    EXPECT_NEAR(pass_probability(s, werner_state(0.98)), 1.0 / 3.0 + (2.0 / 3.0) * 0.98, 1e-12);
    EXPECT_NEAR(pass_probability(s, werner_state(0.98)), 0.98667, 1e-5);
    EXPECT_NEAR(pass_probability(s, projector(singlet())), 1.0, 1e-12);
}

TEST(SingletStrategy, ProjectorRanksMatchEigendecomposition) {
    const auto s = build_singlet_strategy();
    const ComplexMatrix paulis[] = {pauli_x(), pauli_y(), pauli_z()};
    for (std::size_t i = 0; i < 3; ++i) {
        const auto eig = hermitian_eigenvalues(kron(paulis[i], paulis[i]));
        int negative = 0;
        for (double e : eig) {
            negative += e < 0.0 ? 1 : 0;
        }
        const double trace = s.tests()[i].projector.trace().real();
        EXPECT_NEAR(trace, negative, 1e-12) << s.tests()[i].label;
        EXPECT_TRUE(trace == 1.0 || trace == 2.0 || trace == 3.0);
    }
}

TEST(SingletStrategy, HomogeneityOnRandomStates) {
    const auto s = build_singlet_strategy();
    std::mt19937_64 rng(2024);
    for (int i = 0; i < 10000; ++i) {
        const DensityMatrix rho = test_support::random_density(rng);
        const double fid = rho.overlap(singlet());
        const double pass = pass_probability(s, rho);
        ASSERT_NEAR(pass, s.lambda() + s.nu() * fid, 1e-10);
        ASSERT_NEAR(fidelity_from_pass_rate(pass, s.lambda()), fid, 1e-10);
    }
}

TEST(HomogeneousStrategyTest, GeneralLambda) {
    for (double lambda : {0.0, 0.1, 0.25, 0.5, 0.9}) {
        const auto s = build_homogeneous_strategy(singlet(), lambda);
        EXPECT_EQ(s.lambda(), lambda);
        EXPECT_NEAR(pass_probability(s, DensityMatrix::maximally_mixed()), 0.25 + 0.75 * lambda, 1e-12);
        const auto eig = hermitian_eigenvalues(s.omega());
        EXPECT_NEAR(eig[0], lambda, 1e-12);
        EXPECT_NEAR(eig[3], 1.0, 1e-12);
    }
}

TEST(HomogeneousStrategyTest, RejectsInconsistentConstruction) {
    const auto good = build_singlet_strategy();
    // Wrong lambda for the singlet tests.
    EXPECT_THROW(HomogeneousStrategy(good.tests(), singlet(), 0.25), ValidationError);
    // Target that does not pass the tests.
    EXPECT_THROW(HomogeneousStrategy(good.tests(), PureState::basis(0), 1.0 / 3.0), ValidationError);
    // Weights not summing to one.
    auto tests = good.tests();
    tests[0].weight = 0.5;
    EXPECT_THROW(HomogeneousStrategy(tests, singlet(), 1.0 / 3.0), ValidationError);
    EXPECT_THROW(build_homogeneous_strategy(singlet(), 1.0), ValidationError);
}

TEST(FidelityFromPassRate, Examples) {
    EXPECT_NEAR(fidelity_from_pass_rate(1.0, 1.0 / 3.0), 1.0, 1e-15);
    EXPECT_NEAR(fidelity_from_pass_rate(1.0 / 3.0, 1.0 / 3.0), 0.0, 1e-15);
    EXPECT_NEAR(fidelity_from_pass_rate(7.0 / 9.0, 1.0 / 3.0), 2.0 / 3.0, 1e-15);
    // Below lambda the estimate goes negative and is reported as is.
    EXPECT_LT(fidelity_from_pass_rate(0.1, 1.0 / 3.0), 0.0);
    EXPECT_THROW(fidelity_from_pass_rate(0.5, 1.0), ValidationError);
}

TEST(SampleTest, TargetAlwaysPasses) {
    const auto s = build_singlet_strategy();
    RandomStream rng(1);
    const DensityMatrix target = projector(singlet());
    for (int i = 0; i < 10000; ++i) {
        ASSERT_TRUE(sample_test(s, target, rng).passed);
    }
}

TEST(SampleTest, MaximallyMixedFrequency) {
    const auto s = build_singlet_strategy();
    RandomStream rng(2);
    const int draws = 100000;
    int passed = 0;
    for (int i = 0; i < draws; ++i) {
        passed += sample_test(s, DensityMatrix::maximally_mixed(), rng).passed ? 1 : 0;
    }
    const double sigma = std::sqrt(0.25 / draws);
    EXPECT_NEAR(static_cast<double>(passed) / draws, 0.5, 3.0 * sigma);
}

TEST(SampleTest, OrthogonalSupportAlwaysFails) {
    // With lambda = 0 the only test is the target projector, so a state
    // orthogonal to the target never passes.
    const auto s = build_homogeneous_strategy(singlet(), 0.0);
    RandomStream rng(3);
    const DensityMatrix perp = projector(singlet_phi(std::numbers::pi));
    for (int i = 0; i < 10000; ++i) {
        ASSERT_FALSE(sample_test(s, perp, rng).passed);
    }
    // For the Pauli strategy, |00> sits in the +1 eigenspace of ZZ: whenever
    // ZZ is drawn the test fails.
    const auto pauli = build_singlet_strategy();
    const DensityMatrix zero = projector(PureState::basis(0));
    int zz = 0;
    for (int i = 0; i < 10000; ++i) {
        const TestResult r = sample_test(pauli, zero, rng);
        if (r.setting == 2) {
            ++zz;
            ASSERT_FALSE(r.passed);
        }
    }
    EXPECT_GT(zz, 0);
}

TEST(SampleTest, FrequencyMatchesPassProbability) {
    const auto s = build_singlet_strategy();
    std::mt19937_64 gen(99);
    RandomStream rng(4);
    for (int state = 0; state < 3; ++state) {
        const DensityMatrix rho = test_support::random_density(gen);
        const double p = pass_probability(s, rho);
        const int draws = 1000000;
        int passed = 0;
        std::array<int, 3> settings{};
        for (int i = 0; i < draws; ++i) {
            const TestResult r = sample_test(s, rho, rng);
            passed += r.passed ? 1 : 0;
            ++settings[r.setting];
        }
        EXPECT_NEAR(static_cast<double>(passed) / draws, p, 4.0 * std::sqrt(p * (1 - p) / draws));
        for (int c : settings) {
            EXPECT_NEAR(static_cast<double>(c) / draws, 1.0 / 3.0, 4.0 * std::sqrt(2.0 / 9.0 / draws));
        }
    }
}
