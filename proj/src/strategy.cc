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

#include <algorithm>
#include <cmath>
#include <string>

#include "qsv/errors.h"

namespace qsv {

namespace {

ComplexMatrix weighted_sum(const std::vector<StrategyTest> &tests) {
    ComplexMatrix omega(4);
    for (const auto &t : tests) {
        omega += Complex(t.weight) * t.projector;
    }
    return omega;
}

}  // namespace

HomogeneousStrategy::HomogeneousStrategy(std::vector<StrategyTest> tests, PureState target, double lambda)
    : tests_(std::move(tests)), target_(target), lambda_(lambda), omega_(4) {
    if (tests_.empty()) {
        throw ValidationError("strategy needs at least one test");
    }
    if (!(lambda_ >= 0.0 && lambda_ < 1.0)) {
        throw ValidationError("lambda must lie in [0, 1)");
    }
    double total = 0.0;
    for (const auto &t : tests_) {
        if (t.projector.dim() != 4) {
            throw ValidationError("test '" + t.label + "' is not a two-qubit operator");
        }
        if (!(t.weight >= 0.0)) {
            throw ValidationError("test '" + t.label + "' has negative weight");
        }
        if (!t.projector.is_hermitian() || !(t.projector * t.projector).approx_equal(t.projector, kStateTolerance)) {
            throw ValidationError("test '" + t.label + "' is not a projector");
        }
        if (std::abs(expectation(t.projector, outer(target_, target_)) - 1.0) > kStateTolerance) {
            throw ValidationError("target does not pass test '" + t.label + "' with certainty");
        }
        total += t.weight;
    }
    if (std::abs(total - 1.0) > kEntryTolerance) {
        throw ValidationError("test weights sum to " + std::to_string(total) + ", expected 1");
    }
    omega_ = weighted_sum(tests_);

    const ComplexMatrix target_proj = outer(target_, target_);
    const ComplexMatrix expected =
        target_proj + Complex(lambda_) * (ComplexMatrix::identity(4) - target_proj);
    if (!omega_.approx_equal(expected, kStateTolerance)) {
        throw ValidationError("strategy is not homogeneous with lambda = " + std::to_string(lambda_));
    }
    const auto eig = hermitian_eigenvalues(omega_);
    if (std::abs(eig[3] - 1.0) > kStateTolerance || std::abs(eig[2] - lambda_) > kStateTolerance) {
        throw ValidationError("spectrum of omega does not match lambda");
    }
}

ComplexMatrix HomogeneousStrategy::fail_operator() const {
    return ComplexMatrix::identity(4) - omega_;
}

HomogeneousStrategy build_singlet_strategy() {
    const ComplexMatrix id = ComplexMatrix::identity(4);
    auto negative_projector = [&](const ComplexMatrix &pauli) {
        return Complex(0.5) * (id - kron(pauli, pauli));
    };
    std::vector<StrategyTest> tests{
        {"XX", negative_projector(pauli_x()), 1.0 / 3.0},
        {"YY", negative_projector(pauli_y()), 1.0 / 3.0},
        {"ZZ", negative_projector(pauli_z()), 1.0 / 3.0},
    };
    return HomogeneousStrategy(std::move(tests), singlet(), 1.0 / 3.0);
}

HomogeneousStrategy build_homogeneous_strategy(const PureState &target, double lambda) {
    std::vector<StrategyTest> tests{{"TARGET", outer(target, target), 1.0 - lambda}};
    if (lambda > 0.0) {
        tests.push_back({"IDENTITY", ComplexMatrix::identity(4), lambda});
    }
    return HomogeneousStrategy(std::move(tests), target, lambda);
}

double pass_probability(const HomogeneousStrategy &strategy, const DensityMatrix &s) {
    const double raw = expectation(strategy.omega(), s);
    const double clamped = std::clamp(raw, 0.0, 1.0);
    if (std::abs(raw - clamped) > kStateTolerance) {
        warn("pass probability " + std::to_string(raw) + " clamped to [0, 1]");
    }
    return clamped;
}

TestResult sample_test(const HomogeneousStrategy &strategy, const DensityMatrix &s, RandomStream &rng) {
    const auto &tests = strategy.tests();
    std::size_t setting = tests.size() - 1;
    if (tests.size() > 1) {
        const double u = rng.uniform();
        double acc = 0.0;
        for (std::size_t i = 0; i < tests.size(); ++i) {
            acc += tests[i].weight;
            if (u < acc) {
                setting = i;
                break;
            }
        }
    }
    const double p = std::clamp(expectation(tests[setting].projector, s), 0.0, 1.0);
    return TestResult{setting, rng.bernoulli(p)};
}

double fidelity_from_pass_rate(double rate, double lambda) {
    if (!(lambda >= 0.0 && lambda < 1.0)) {
        throw ValidationError("lambda must lie in [0, 1)");
    }
    if (!(rate >= 0.0 && rate <= 1.0)) {
        throw ValidationError("pass rate must lie in [0, 1]");
    }
    return (rate - lambda) / (1.0 - lambda);
}

}  // namespace qsv
