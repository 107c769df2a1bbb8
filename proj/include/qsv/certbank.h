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

#ifndef QSV_CERTBANK_H
#define QSV_CERTBANK_H

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace qsv {

enum class Protocol {
    /// Standard verification: N IID copies, certifies the single-copy state.
    kSqsv,
    /// Defensive verification: arbitrary joint state of N+1 systems, N tested
    /// at random, certifies the conditional state of the untested one.
    kDqsv,
};

std::string_view protocol_name(Protocol p);
/// Accepts "sqsv" / "dqsv" (case-insensitive).
Protocol parse_protocol(std::string_view name);

struct CertificateQuery {
    Protocol protocol = Protocol::kSqsv;
    std::int64_t n = 1;   // number of tests
    std::int64_t k = 0;   // allowed failures, k <= n - 1
    double delta = 1.0;   // significance level in (0, 1]
    double lambda = 0.0;  // second-largest eigenvalue of the strategy

    double nu() const {
        return 1.0 - lambda;
    }
    /// Throws ValidationError on n < k + 1, k < 0, delta outside (0, 1], or
    /// lambda outside [0, 1) (SQSV) / (0, 1) (DQSV).
    void validate() const;
};

struct Certificate {
    CertificateQuery query;
    double fidelity_bound = 0.0;
    double infidelity_bound = 1.0;  // always 1 - fidelity_bound
};

/// Everything the defensive certificate is built from, for z = 0 .. n + 1.
/// Values of h and g below the double range are reported as 0; the
/// certificate itself is computed from their logarithms.
struct DqsvIntermediates {
    std::vector<double> h;
    std::vector<double> g;
    std::int64_t zhat = 0;
    double kappa = 0.0;
    double zeta_tilde = 0.0;
};

/// Probability of at most k successes in z Bernoulli(p) trials,
///
///     B_{z,k}(p) = sum_{j=0}^{min(k,z)} C(z,j) p^j (1-p)^(z-j),
///
/// with 0^0 = 1. Terms are formed in extended-precision log space and summed
/// with a log-sum-exp plus Kahan compensation; absolute error is below 1e-13
/// for z <= 1e4.
double binom_tail(std::int64_t z, std::int64_t k, double p);

/// Natural log of binom_tail, usable where the tail itself underflows. Returns
/// -infinity when the tail is exactly zero.
long double log_binom_tail(std::int64_t z, std::int64_t k, double p);

/// log(1 - B_{z,k}(p)): the probability of more than k successes.
long double log_binom_upper_tail(std::int64_t z, std::int64_t k, double p);

/// The unique x in [0, 1] with B_{n,k}(x) = delta, for n >= k + 1 and
/// 0 < delta <= 1. Bisection on [0, 1] (B is strictly decreasing in x when
/// k < n), iterated until the bracket is below 1e-13 and |B(x) - delta| is
/// below 1e-12, or the bracket can no longer be split. Returns 0 for delta = 1.
/// Throws NumericalError if 200 iterations do not suffice.
/// Log-space evaluation of the defensive tables h_z and g_z for 0 <= z <= n + 1.
/// Values far below the double range stay finite here.
class DefensiveTables {
   public:
    DefensiveTables(std::int64_t n, std::int64_t k, double nu);

    long double log_h(std::int64_t z) const;
    /// log(1 - h_z), accurate where h_z is within rounding of 1.
    long double log_one_minus_h(std::int64_t z) const;
    long double log_g(std::int64_t z) const;

   private:
    std::int64_t n_;
    std::int64_t k_;
    double nu_;
    long double log_norm_;
};

double solve_j(std::int64_t n, std::int64_t k, double delta);

/// IID certificate: fidelity_bound = max(0, 1 - solve_j(n, k, delta) / nu).
Certificate sqsv_certificate(const CertificateQuery &q);

/// h_z, g_z, zhat, kappa and zeta_tilde for a defensive query. Requires
/// 0 < lambda < 1 and delta > B_{n,k}(nu); throws ValidationError otherwise.
DqsvIntermediates dqsv_intermediates(const CertificateQuery &q);

/// Defensive certificate: 0 when delta <= B_{n,k}(nu), otherwise
/// zeta_tilde / delta. Throws NumericalError if the result leaves [0, 1] by
/// more than 1e-12.
Certificate dqsv_certificate(const CertificateQuery &q);

/// Dispatches on q.protocol.
Certificate certify(const CertificateQuery &q);

/// Clopper-Pearson two-sided interval for a binomial proportion, obtained by
/// inverting B with solve_j.
struct ProportionInterval {
    double low;
    double high;
};
ProportionInterval clopper_pearson(std::int64_t successes, std::int64_t trials, double confidence = 0.95);

}  // namespace qsv

#endif
