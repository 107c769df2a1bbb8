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

#include "qsv/certbank.h"

#include <cmath>
#include <random>

#include <boost/math/distributions/binomial.hpp>

#include "gtest/gtest.h"
#include "qsv/errors.h"
#include "support/reference_certificate.h"

using namespace qsv;
using test_support::Real;

namespace {

CertificateQuery query(Protocol protocol, std::int64_t n, std::int64_t k, double delta, double lambda) {
    CertificateQuery q;
    q.protocol = protocol;
    q.n = n;
    q.k = k;
    q.delta = delta;
    q.lambda = lambda;
    return q;
}

// a < b for two tail probabilities, decided on whichever side of 1/2 keeps
// full precision: the lower tails themselves or their complements.
bool tail_less(long double log_a, long double log_upper_a, long double log_b, long double log_upper_b) {
    return log_a < log_b || log_upper_a > log_upper_b;
}

}  // namespace

TEST(BinomTail, Examples) {
    for (std::int64_t z : {0, 1, 7, 1000}) {
        for (std::int64_t k : {0, 3}) {
            EXPECT_EQ(binom_tail(z, k, 0.0), 1.0);
        }
    }
    for (std::int64_t n : {1, 5, 100}) {
        for (std::int64_t k = 0; k < std::min<std::int64_t>(n, 4); ++k) {
            EXPECT_EQ(binom_tail(n, k, 1.0), 0.0);
        }
    }
    EXPECT_NEAR(binom_tail(2, 1, 0.5), 0.75, 1e-15);
    EXPECT_EQ(binom_tail(3, 5, 0.4), 1.0);
    EXPECT_THROW(binom_tail(-1, 0, 0.5), ValidationError);
    EXPECT_THROW(binom_tail(3, -1, 0.5), ValidationError);
    EXPECT_THROW(binom_tail(3, 1, 1.5), ValidationError);
}

TEST(BinomTail, MatchesHighPrecisionReference) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 400; ++trial) {
        const std::int64_t z = std::uniform_int_distribution<std::int64_t>(1, 10000)(rng);
        const std::int64_t k = std::uniform_int_distribution<std::int64_t>(0, z)(rng);
        const double p = unit(rng);
        const double expected = static_cast<double>(test_support::reference_binom_tail(z, k, Real(p)));
        ASSERT_NEAR(binom_tail(z, k, p), expected, 1e-13) << z << " " << k << " " << p;
    }
    // Near the bulk where many terms contribute.
    for (std::int64_t z : {100, 1000, 10000}) {
        const double p = 0.3;
        const auto k = static_cast<std::int64_t>(p * static_cast<double>(z));
        const double expected = static_cast<double>(test_support::reference_binom_tail(z, k, Real(p)));
        EXPECT_NEAR(binom_tail(z, k, p), expected, 1e-13);
    }
}

TEST(BinomTail, UpperTailComplements) {
    std::mt19937_64 rng(16);
    for (int trial = 0; trial < 500; ++trial) {
        const std::int64_t z = std::uniform_int_distribution<std::int64_t>(1, 300)(rng);
        const std::int64_t k = std::uniform_int_distribution<std::int64_t>(0, z)(rng);
        const double p = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
        const long double total = std::exp(log_binom_tail(z, k, p)) + std::exp(log_binom_upper_tail(z, k, p));
        ASSERT_NEAR(static_cast<double>(total), 1.0, 1e-13);
        const Real upper = test_support::reference_binom_upper_tail(z, k, Real(p));
        if (upper > 0) {
            const double want = static_cast<double>(boost::multiprecision::log(upper));
            ASSERT_NEAR(static_cast<double>(log_binom_upper_tail(z, k, p)), want, 1e-12 * std::max(1.0, std::abs(want)));
        }
    }
}

TEST(BinomTail, StrictMonotonicity) {
    std::mt19937_64 rng(12);
    std::uniform_real_distribution<double> unit(0.001, 0.999);
    for (int trial = 0; trial < 2000; ++trial) {
        const std::int64_t z = std::uniform_int_distribution<std::int64_t>(2, 200)(rng);
        const std::int64_t k = std::uniform_int_distribution<std::int64_t>(0, z - 2)(rng);
        const double p = unit(rng);
        const double p2 = std::min(0.9999, p + 0.01);
        auto lower = [](std::int64_t zz, std::int64_t kk, double pp) { return log_binom_tail(zz, kk, pp); };
        auto upper = [](std::int64_t zz, std::int64_t kk, double pp) { return log_binom_upper_tail(zz, kk, pp); };
        ASSERT_TRUE(tail_less(lower(z, k, p), upper(z, k, p), lower(z, k + 1, p), upper(z, k + 1, p)))
            << z << " " << k << " " << p;
        ASSERT_TRUE(tail_less(lower(z + 1, k, p), upper(z + 1, k, p), lower(z, k, p), upper(z, k, p)))
            << z << " " << k << " " << p;
        ASSERT_TRUE(tail_less(lower(z, k, p2), upper(z, k, p2), lower(z, k, p), upper(z, k, p)))
            << z << " " << k << " " << p;
    }
}

TEST(SolveJ, Examples) {
    for (std::int64_t n : {1, 2, 50}) {
        EXPECT_EQ(solve_j(n, 0, 1.0), 0.0);
    }
    EXPECT_NEAR(solve_j(10, 0, 0.05), 0.258866, 1e-6);
    EXPECT_NEAR(solve_j(1000, 0, 0.05), 0.0029912, 1e-7);
    EXPECT_THROW(solve_j(3, 3, 0.5), ValidationError);
    EXPECT_THROW(solve_j(3, 0, 0.0), ValidationError);
}

TEST(SolveJ, ClosedFormForZeroFailures) {
    for (std::int64_t n : {1, 10, 100, 1000, 10000}) {
        for (double delta : {0.01, 0.05, 0.5, 0.9}) {
            const double closed = -std::expm1(std::log(delta) / static_cast<double>(n));
            EXPECT_NEAR(solve_j(n, 0, delta), closed, 1e-12) << n << " " << delta;
        }
    }
}

TEST(SolveJ, ResidualAndMonotonicity) {
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 300; ++trial) {
        const std::int64_t n = std::uniform_int_distribution<std::int64_t>(1, 3000)(rng);
        const std::int64_t k = std::uniform_int_distribution<std::int64_t>(0, n - 1)(rng);
        const double delta = std::uniform_real_distribution<double>(1e-6, 1.0)(rng);
        const double x = solve_j(n, k, delta);
        ASSERT_GE(x, 0.0);
        ASSERT_LE(x, 1.0);
        ASSERT_LE(std::abs(binom_tail(n, k, x) - delta), 1e-12);
    }
    // More allowed failures or a smaller delta move the root right.
    EXPECT_LT(solve_j(100, 2, 0.05), solve_j(100, 3, 0.05));
    EXPECT_LT(solve_j(100, 2, 0.5), solve_j(100, 2, 0.05));
}

TEST(SqsvCertificate, Examples) {
    const double third = 1.0 / 3.0;
    auto c = sqsv_certificate(query(Protocol::kSqsv, 10, 0, 0.05, third));
    EXPECT_NEAR(c.fidelity_bound, 0.611701, 2e-6);
    EXPECT_EQ(c.fidelity_bound + c.infidelity_bound, 1.0);
    for (std::int64_t n : {1, 7, 1000}) {
        EXPECT_EQ(sqsv_certificate(query(Protocol::kSqsv, n, 0, 1.0, third)).fidelity_bound, 1.0);
    }
    c = sqsv_certificate(query(Protocol::kSqsv, 1000, 0, 0.05, third));
    EXPECT_NEAR(c.infidelity_bound, 0.004487, 1e-5);
    // Root beyond nu clamps to zero.
    EXPECT_EQ(sqsv_certificate(query(Protocol::kSqsv, 2, 1, 0.01, 0.5)).fidelity_bound, 0.0);
    // lambda = 0 is allowed for the standard protocol.
    EXPECT_NEAR(sqsv_certificate(query(Protocol::kSqsv, 10, 0, 0.05, 0.0)).fidelity_bound, 1.0 - 0.258866, 1e-6);
}

TEST(CertificateQueryTest, Validation) {
    EXPECT_THROW(query(Protocol::kSqsv, 3, 3, 0.5, 0.3).validate(), ValidationError);
    EXPECT_THROW(query(Protocol::kSqsv, 3, -1, 0.5, 0.3).validate(), ValidationError);
    EXPECT_THROW(query(Protocol::kSqsv, 3, 0, 0.0, 0.3).validate(), ValidationError);
    EXPECT_THROW(query(Protocol::kSqsv, 3, 0, 1.5, 0.3).validate(), ValidationError);
    EXPECT_THROW(query(Protocol::kSqsv, 3, 0, 0.5, 1.0).validate(), ValidationError);
    EXPECT_NO_THROW(query(Protocol::kSqsv, 3, 0, 0.5, 0.0).validate());
    EXPECT_THROW(query(Protocol::kDqsv, 3, 0, 0.5, 0.0).validate(), ValidationError);
    EXPECT_THROW(dqsv_certificate(query(Protocol::kSqsv, 3, 0, 0.5, 0.3)), ValidationError);
    EXPECT_THROW(sqsv_certificate(query(Protocol::kDqsv, 3, 0, 0.5, 0.3)), ValidationError);
    EXPECT_EQ(parse_protocol("DQSV"), Protocol::kDqsv);
    EXPECT_EQ(protocol_name(Protocol::kSqsv), "sqsv");
    EXPECT_THROW(parse_protocol("iid"), ValidationError);
}

TEST(DqsvIntermediatesTest, SmallestCase) {
    const double third = 1.0 / 3.0;
    auto in = dqsv_intermediates(query(Protocol::kDqsv, 1, 0, 1.0, third));
    EXPECT_EQ(in.zhat, 0);
    EXPECT_NEAR(in.kappa, 1.0, 1e-12);
    EXPECT_NEAR(in.zeta_tilde, 1.0, 1e-12);
    EXPECT_NEAR(in.h[0], 1.0, 1e-15);
    EXPECT_NEAR(in.h[1], 2.0 / 3.0, 1e-12);
    EXPECT_NEAR(in.g[0], 1.0, 1e-15);

    in = dqsv_intermediates(query(Protocol::kDqsv, 1, 0, 2.0 / 3.0, third));
    EXPECT_EQ(in.zhat, 1);
    EXPECT_NEAR(in.kappa, 1.0, 1e-12);
    EXPECT_NEAR(in.zeta_tilde, 1.0 / 6.0, 1e-12);
    EXPECT_NEAR(in.h[2], 1.0 / 3.0, 1e-12);
}

TEST(DqsvIntermediatesTest, Invariants) {
    std::mt19937_64 rng(14);
    for (int trial = 0; trial < 300; ++trial) {
        const std::int64_t n = std::uniform_int_distribution<std::int64_t>(1, 50)(rng);
        const std::int64_t k = std::uniform_int_distribution<std::int64_t>(0, n - 1)(rng);
        const double lambda = std::uniform_real_distribution<double>(0.05, 0.95)(rng);
        const double floor = binom_tail(n, k, 1.0 - lambda);
        const double delta = floor + (1.0 - floor) * std::uniform_real_distribution<double>(0.01, 1.0)(rng);
        if (delta - floor <= 2e-14) {
            continue;  // within the tie tolerance of the floor
        }
        const auto in = dqsv_intermediates(query(Protocol::kDqsv, n, k, delta, lambda));
        ASSERT_EQ(in.h.size(), static_cast<std::size_t>(n + 2));
        ASSERT_NEAR(in.h[static_cast<std::size_t>(n + 1)], floor, 1e-12 * floor);
        for (std::size_t z = 0; z + 1 < in.h.size(); ++z) {
            ASSERT_GE(in.h[z], in.h[z + 1]);
            ASSERT_GT(in.g[z], in.g[z + 1]);
        }
        const auto zhat = static_cast<std::size_t>(in.zhat);
        ASSERT_GE(in.h[zhat] * (1.0 + 1e-14), delta);
        const DefensiveTables t(n, k, 1.0 - lambda);
        if (delta >= 0.5) {
            ASSERT_GT(t.log_one_minus_h(static_cast<std::int64_t>(zhat) + 1), std::log1p(-static_cast<long double>(delta)));
        } else {
            ASSERT_LT(in.h[zhat + 1], delta);
        }
        ASSERT_GE(in.kappa, 0.0);
        ASSERT_LE(in.kappa, 1.0);
    }
    EXPECT_THROW(dqsv_intermediates(query(Protocol::kDqsv, 10, 0, 0.999 * binom_tail(10, 0, 2.0 / 3.0), 1.0 / 3.0)),
                 ValidationError);
}

TEST(DefensiveTablesTest, StrictlyDecreasingOnGrid) {
    for (double lambda : {0.1, 1.0 / 3.0, 0.9}) {
        for (std::int64_t n : {1, 2, 5, 17, 60, 200}) {
            for (std::int64_t k = 0; k < n; k += std::max<std::int64_t>(1, n / 7)) {
                const DefensiveTables t(n, k, 1.0 - lambda);
                for (std::int64_t z = 0; z <= n; ++z) {
                    ASSERT_GT(t.log_g(z), t.log_g(z + 1)) << n << " " << k << " " << z;
                    if (z >= k) {
                        ASSERT_TRUE(tail_less(t.log_h(z + 1), t.log_one_minus_h(z + 1), t.log_h(z),
                                              t.log_one_minus_h(z)))
                            << n << " " << k << " " << z;
                    } else {
                        ASSERT_EQ(t.log_h(z), 0.0L);
                    }
                }
                const long double floor = log_binom_tail(n, k, 1.0 - lambda);
                ASSERT_NEAR(static_cast<double>(t.log_h(n + 1) - floor), 0.0, 1e-12);
            }
        }
    }
}

TEST(DqsvCertificate, Examples) {
    const double third = 1.0 / 3.0;
    EXPECT_NEAR(dqsv_certificate(query(Protocol::kDqsv, 1, 0, 1.0, third)).fidelity_bound, 1.0, 1e-12);
    EXPECT_NEAR(dqsv_certificate(query(Protocol::kDqsv, 1, 0, 2.0 / 3.0, third)).fidelity_bound, 0.25, 1e-12);
    const double half_floor = binom_tail(10, 0, 2.0 / 3.0) / 2.0;
    EXPECT_EQ(dqsv_certificate(query(Protocol::kDqsv, 10, 0, half_floor, third)).fidelity_bound, 0.0);
}

TEST(DqsvCertificate, DeltaOneIsTestedFraction) {
    // With delta = 1 only perfectly passing states count: the bound is the
    // fraction (N - k + 1) / (N + 1).
    for (std::int64_t n : {1, 4, 30, 500}) {
        for (std::int64_t k : {0, 1, 3}) {
            if (k >= n) {
                continue;
            }
            for (double lambda : {0.2, 1.0 / 3.0, 0.8}) {
                const auto c = dqsv_certificate(query(Protocol::kDqsv, n, k, 1.0, lambda));
                EXPECT_NEAR(c.fidelity_bound, static_cast<double>(n - k + 1) / static_cast<double>(n + 1), 1e-12);
            }
        }
    }
}

TEST(DqsvCertificate, MatchesHighPrecisionReference) {
    for (double lambda : {0.25, 1.0 / 3.0, 0.5}) {
        for (std::int64_t n = 1; n <= 20; ++n) {
            for (std::int64_t k = 0; k < n; ++k) {
                for (double delta : {0.01, 0.05, 0.5, 0.9, 1.0}) {
                    const auto ref = test_support::reference_defensive(n, k, delta, 1.0 - lambda);
                    const double got = dqsv_certificate(query(Protocol::kDqsv, n, k, delta, lambda)).fidelity_bound;
                    const double want = static_cast<double>(ref.fidelity);
                    if (want == 0.0) {
                        ASSERT_EQ(got, 0.0) << n << " " << k << " " << delta << " " << lambda;
                    } else {
                        ASSERT_LE(std::abs(got - want), 1e-10 * want) << n << " " << k << " " << delta << " " << lambda;
                    }
                }
            }
        }
    }
}

TEST(DqsvCertificate, LargeNStaysFinite) {
    for (std::int64_t n : {1000, 5000, 20000}) {
        const auto c = dqsv_certificate(query(Protocol::kDqsv, n, n / 100, 0.05, 1.0 / 3.0));
        EXPECT_GT(c.fidelity_bound, 0.9);
        EXPECT_LT(c.fidelity_bound, 1.0);
    }
}

TEST(DqsvCertificate, NonDecreasingInDelta) {
    for (double lambda : {0.1, 1.0 / 3.0, 0.7}) {
        for (std::int64_t n : {3, 10, 40}) {
            for (std::int64_t k : {std::int64_t{0}, n / 3}) {
                const double floor = binom_tail(n, k, 1.0 - lambda);
                double prev = 0.0;
                for (int i = 1; i <= 200; ++i) {
                    const double delta = floor + (1.0 - floor) * i / 200.0;
                    const double f = dqsv_certificate(query(Protocol::kDqsv, n, k, delta, lambda)).fidelity_bound;
                    ASSERT_GE(f, 0.0);
                    ASSERT_GE(f, prev - 1e-12) << n << " " << k << " " << delta;
                    prev = f;
                }
            }
        }
    }
}

TEST(Certificates, StandardDominatesDefensive) {
    std::mt19937_64 rng(15);
    for (int trial = 0; trial < 3000; ++trial) {
        const std::int64_t n = std::uniform_int_distribution<std::int64_t>(1, 400)(rng);
        const std::int64_t k = std::uniform_int_distribution<std::int64_t>(0, n - 1)(rng);
        const double lambda = std::uniform_real_distribution<double>(0.05, 0.95)(rng);
        const double delta = std::uniform_real_distribution<double>(1e-4, 1.0)(rng);
        const double s = sqsv_certificate(query(Protocol::kSqsv, n, k, delta, lambda)).fidelity_bound;
        const double d = dqsv_certificate(query(Protocol::kDqsv, n, k, delta, lambda)).fidelity_bound;
        ASSERT_GE(s, d - 1e-12) << n << " " << k << " " << delta << " " << lambda;
    }
}

TEST(ClopperPearson, MatchesBoostMath) {
    using boost::math::binomial_distribution;
    for (std::int64_t trials : {1, 10, 137, 10000}) {
        for (std::int64_t s : {std::int64_t{0}, std::int64_t{1}, trials / 2, trials - 1, trials}) {
            if (s < 0 || s > trials) {
                continue;
            }
            const auto ci = clopper_pearson(s, trials, 0.95);
            const double n = static_cast<double>(trials);
            const double succ = static_cast<double>(s);
            const double low = binomial_distribution<>::find_lower_bound_on_p(
                n, succ, 0.025, binomial_distribution<>::clopper_pearson_exact_interval);
            const double high = binomial_distribution<>::find_upper_bound_on_p(
                n, succ, 0.025, binomial_distribution<>::clopper_pearson_exact_interval);
            EXPECT_NEAR(ci.low, low, 1e-9) << s << "/" << trials;
            EXPECT_NEAR(ci.high, high, 1e-9) << s << "/" << trials;
        }
    }
    EXPECT_THROW(clopper_pearson(3, 2), ValidationError);
}
