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

#ifndef QSV_STRATEGY_H
#define QSV_STRATEGY_H

#include <cstddef>
#include <string>
#include <vector>

#include "qsv/linalg.h"
#include "qsv/random.h"

namespace qsv {

/// One test of a verification strategy: the outcome "pass" corresponds to the
/// projector, and the test is chosen with probability `weight`.
struct StrategyTest {
    std::string label;
    ComplexMatrix projector;
    double weight;
};

/// A homogeneous verification operator
///
///     omega = sum_i weight_i * P_i = |t><t| + lambda * (1 - |t><t|)
///
/// for target |t>. lambda is stored exactly as given (so 1/3 stays the double
/// nearest 1/3) and the constructor checks it against the spectrum of omega.
class HomogeneousStrategy {
   public:
    /// Throws ValidationError unless weights sum to 1, each projector is a
    /// Hermitian idempotent, the target passes every test with certainty and
    /// omega has the homogeneous form with the given lambda.
    HomogeneousStrategy(std::vector<StrategyTest> tests, PureState target, double lambda);

    const std::vector<StrategyTest> &tests() const noexcept {
        return tests_;
    }
    const PureState &target() const noexcept {
        return target_;
    }
    double lambda() const noexcept {
        return lambda_;
    }
    /// Spectral gap, 1 - lambda.
    double nu() const noexcept {
        return 1.0 - lambda_;
    }
    const ComplexMatrix &omega() const noexcept {
        return omega_;
    }
    /// 1 - omega: the single-test failure operator.
    ComplexMatrix fail_operator() const;

   private:
    std::vector<StrategyTest> tests_;
    PureState target_;
    double lambda_;
    ComplexMatrix omega_;
};

/// The singlet strategy: XX, YY and ZZ measured with weight 1/3 each, passing
/// on outcome -1. Projectors are (1 - W(x)W)/2, lambda = 1/3.
HomogeneousStrategy build_singlet_strategy();

/// A homogeneous strategy for an arbitrary target and lambda in [0, 1):
/// the target projector with weight 1 - lambda plus the trivial test (always
/// passes) with weight lambda.
HomogeneousStrategy build_homogeneous_strategy(const PureState &target, double lambda);

/// tr(omega * s), clamped to [0, 1] (warns if the clamp moves it by more than 1e-10).
double pass_probability(const HomogeneousStrategy &strategy, const DensityMatrix &s);

struct TestResult {
    std::size_t setting;  // index into strategy.tests()
    bool passed;
};

/// Draws a setting by weight, then the outcome with probability tr(P_setting s).
TestResult sample_test(const HomogeneousStrategy &strategy, const DensityMatrix &s, RandomStream &rng);

/// (rate - lambda) / (1 - lambda). Not clamped: a rate below lambda gives a
/// negative value.
double fidelity_from_pass_rate(double rate, double lambda);

}  // namespace qsv

#endif
