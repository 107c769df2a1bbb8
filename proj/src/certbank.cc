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

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "qsv/errors.h"

namespace qsv {

namespace {

constexpr long double kNegInf = -std::numeric_limits<long double>::infinity();
constexpr int kMaxBisection = 200;
constexpr double kRootTolerance = 1e-13;
constexpr double kResidualTolerance = 1e-12;
constexpr double kRangeTolerance = 1e-12;
constexpr double kTieTolerance = 1e-14;
constexpr long double kTieKappaSlack = 1e-12L;

long double log_add(long double a, long double b) {
    if (a == kNegInf) {
        return b;
    }
    if (b == kNegInf) {
        return a;
    }
    const long double hi = std::max(a, b);
    return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

// h_z and g_z of the defensive certificate, in log space. z ranges over
// 0 .. n + 1; tails are evaluated at nu.
struct DefensivePoint {
    std::int64_t zhat;
    long double kappa;
    long double zeta_tilde;
};

// Largest z in [k, n] with h_z >= delta, located by bisection on the index
// (h is strictly decreasing on [k, n + 1]), followed by the interpolation
// weight kappa and the interpolated zeta.
//
// For delta >= 1/2 every comparison runs on 1 - h, which is resolved to full
// relative precision even where h rounds to 1; below that h itself is.
//
// h_z equal to delta within a relative 1e-14 counts as a tie and selects z,
// provided the resulting kappa overshoots 1 by at most kTieKappaSlack; where h
// is too flat for that, the exact comparison decides. zeta is continuous in
// delta across h_z = delta, so either choice gives the same value.
DefensivePoint locate(const DefensiveTables &t, const CertificateQuery &q) {
    const bool upper = q.delta >= 0.5;
    const long double delta = q.delta;
    // Distance of delta from 1 (exact for delta >= 1/2) or delta itself.
    const long double target = upper ? 1.0L - delta : delta;
    auto value = [&](std::int64_t z) {
        return upper ? std::exp(t.log_one_minus_h(z)) : std::exp(t.log_h(z));
    };
    auto reaches = [&](std::int64_t z) {
        const long double slack = delta * static_cast<long double>(kTieTolerance);
        return upper ? value(z) <= target + slack : value(z) >= target - slack;
    };
    std::int64_t lo = q.k;
    std::int64_t hi = q.n + 1;
    while (hi - lo > 1) {
        const std::int64_t mid = lo + (hi - lo) / 2;
        if (reaches(mid)) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    auto evaluate = [&](std::int64_t z) {
        const long double v0 = value(z);
        const long double v1 = value(z + 1);
        const long double denom = upper ? v1 - v0 : v0 - v1;
        if (!(denom > 0.0L)) {
            throw NumericalError("defensive certificate: h is not strictly decreasing at z = " + std::to_string(z));
        }
        return (upper ? v1 - target : target - v1) / denom;
    };
    long double kappa = evaluate(lo);
    if (kappa > 1.0L + kTieKappaSlack && lo > q.k) {
        --lo;
        kappa = evaluate(lo);
    }
    kappa = std::clamp(kappa, 0.0L, 1.0L);
    const long double g0 = std::exp(t.log_g(lo));
    const long double g1 = std::exp(t.log_g(lo + 1));
    return DefensivePoint{lo, kappa, (1.0L - kappa) * g1 + kappa * g0};
}

// delta <= h_{n+1} = B_{n,k}(nu), with the same tie tolerance and the same
// choice of h or 1 - h as locate(). The certificate tends to 0 as delta
// approaches the floor from above, so the tolerance moves it by ~1e-14.
bool at_or_below_floor(const DefensiveTables &t, const CertificateQuery &q) {
    const long double delta = q.delta;
    const long double slack = delta * static_cast<long double>(kTieTolerance);
    if (q.delta >= 0.5) {
        return std::exp(t.log_one_minus_h(q.n + 1)) <= 1.0L - delta + slack;
    }
    return std::exp(t.log_h(q.n + 1)) + slack >= delta;
}

void require_dqsv_protocol(const CertificateQuery &q) {
    if (q.protocol != Protocol::kDqsv) {
        throw ValidationError("query protocol is not dqsv");
    }
}

Certificate make_certificate(const CertificateQuery &q, double fidelity) {
    if (fidelity < -kRangeTolerance || fidelity > 1.0 + kRangeTolerance || std::isnan(fidelity)) {
        throw NumericalError("certificate fidelity " + std::to_string(fidelity) + " outside [0, 1]");
    }
    fidelity = std::clamp(fidelity, 0.0, 1.0);
    return Certificate{q, fidelity, 1.0 - fidelity};
}

}  // namespace

std::string_view protocol_name(Protocol p) {
    return p == Protocol::kSqsv ? "sqsv" : "dqsv";
}

Protocol parse_protocol(std::string_view name) {
    std::string lower(name);
    std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
    if (lower == "sqsv") {
        return Protocol::kSqsv;
    }
    if (lower == "dqsv") {
        return Protocol::kDqsv;
    }
    throw ValidationError("unknown protocol '" + std::string(name) + "' (expected sqsv or dqsv)");
}

void CertificateQuery::validate() const {
    if (k < 0) {
        throw ValidationError("k must be non-negative");
    }
    if (n < k + 1) {
        throw ValidationError("n must be at least k + 1 (n = " + std::to_string(n) + ", k = " + std::to_string(k) + ")");
    }
    if (!(delta > 0.0 && delta <= 1.0)) {
        throw ValidationError("delta must lie in (0, 1]");
    }
    if (protocol == Protocol::kSqsv) {
        if (!(lambda >= 0.0 && lambda < 1.0)) {
            throw ValidationError("lambda must lie in [0, 1) for sqsv");
        }
    } else if (!(lambda > 0.0 && lambda < 1.0)) {
        throw ValidationError("lambda must lie in (0, 1) for dqsv");
    }
}

namespace {

void check_binom_args(std::int64_t z, std::int64_t k, double p) {
    if (z < 0 || k < 0) {
        throw ValidationError("binom_tail: z and k must be non-negative");
    }
    if (!(p >= 0.0 && p <= 1.0)) {
        throw ValidationError("binom_tail: p must lie in [0, 1]");
    }
}

// log C(z, j) p^j (1 - p)^(z - j).
long double log_term(std::int64_t z, std::int64_t j, long double log_p, long double log_q, long double log_z_fact) {
    return log_z_fact - std::lgamma(static_cast<long double>(j) + 1.0L) -
           std::lgamma(static_cast<long double>(z - j) + 1.0L) + static_cast<long double>(j) * log_p +
           static_cast<long double>(z - j) * log_q;
}

// log of sum_{j = first}^{last} C(z, j) p^j (1 - p)^(z - j) for 0 < p < 1.
//
// Terms are scaled by the largest one (the pmf peaks at the mode, clamped to
// the range). Every kAnchorStride terms the scaled term is evaluated exactly
// through lgamma; in between it follows the ratio recurrence, which keeps the
// accumulated rounding to a few dozen ulps.
long double log_binom_range(std::int64_t z, std::int64_t first, std::int64_t last, double p) {
    constexpr std::int64_t kAnchorStride = 32;
    const long double lp = p;
    const long double log_p = std::log(lp);
    const long double log_q = std::log1p(-lp);
    const long double odds = lp / (1.0L - lp);
    const long double log_z_fact = std::lgamma(static_cast<long double>(z) + 1.0L);

    const auto mode = static_cast<std::int64_t>(std::floor(static_cast<long double>(z + 1) * lp));
    const long double top = log_term(z, std::clamp(mode, first, last), log_p, log_q, log_z_fact);

    // Kahan-compensated sum of exp(t_j - top).
    long double sum = 0.0L;
    long double carry = 0.0L;
    long double scaled = 0.0L;
    for (std::int64_t j = first; j <= last; ++j) {
        if ((j - first) % kAnchorStride == 0) {
            scaled = std::exp(log_term(z, j, log_p, log_q, log_z_fact) - top);
        } else {
            scaled *= static_cast<long double>(z - j + 1) / static_cast<long double>(j) * odds;
        }
        const long double y = scaled - carry;
        const long double next = sum + y;
        carry = (next - sum) - y;
        sum = next;
    }
    return top + std::log(sum);
}

}  // namespace

long double log_binom_tail(std::int64_t z, std::int64_t k, double p) {
    check_binom_args(z, k, p);
    if (k >= z || p == 0.0) {
        return 0.0L;
    }
    if (p == 1.0) {
        return kNegInf;
    }
    return log_binom_range(z, 0, k, p);
}

long double log_binom_upper_tail(std::int64_t z, std::int64_t k, double p) {
    check_binom_args(z, k, p);
    if (k >= z || p == 0.0) {
        return kNegInf;
    }
    if (p == 1.0) {
        return 0.0L;
    }
    return log_binom_range(z, k + 1, z, p);
}

DefensiveTables::DefensiveTables(std::int64_t n, std::int64_t k, double nu)
    : n_(n), k_(k), nu_(nu), log_norm_(std::log(static_cast<long double>(n + 1))) {
}

long double DefensiveTables::log_h(std::int64_t z) const {
    if (z <= k_) {
        return 0.0L;
    }
    const std::int64_t untested = n_ - z + 1;
    const long double first =
        untested > 0 ? std::log(static_cast<long double>(untested)) + log_binom_tail(z, k_, nu_) : kNegInf;
    const long double second = std::log(static_cast<long double>(z)) + log_binom_tail(z - 1, k_, nu_);
    return log_add(first, second) - log_norm_;
}

long double DefensiveTables::log_one_minus_h(std::int64_t z) const {
    if (z <= k_) {
        return kNegInf;
    }
    const std::int64_t untested = n_ - z + 1;
    const long double first =
        untested > 0 ? std::log(static_cast<long double>(untested)) + log_binom_upper_tail(z, k_, nu_) : kNegInf;
    const long double second = std::log(static_cast<long double>(z)) + log_binom_upper_tail(z - 1, k_, nu_);
    return log_add(first, second) - log_norm_;
}

long double DefensiveTables::log_g(std::int64_t z) const {
    const std::int64_t untested = n_ - z + 1;
    if (untested <= 0) {
        return kNegInf;
    }
    const long double base = std::log(static_cast<long double>(untested)) - log_norm_;
    return z <= k_ ? base : base + log_binom_tail(z, k_, nu_);
}

double binom_tail(std::int64_t z, std::int64_t k, double p) {
    return static_cast<double>(std::exp(log_binom_tail(z, k, p)));
}

double solve_j(std::int64_t n, std::int64_t k, double delta) {
    if (k < 0 || n < k + 1) {
        throw ValidationError("solve_j: requires k >= 0 and n >= k + 1");
    }
    if (!(delta > 0.0 && delta <= 1.0)) {
        throw ValidationError("solve_j: delta must lie in (0, 1]");
    }
    if (delta == 1.0) {
        return 0.0;
    }
    double lo = 0.0;  // B(lo) >= delta
    double hi = 1.0;  // B(hi) < delta
    for (int it = 0; it < kMaxBisection; ++it) {
        const double mid = lo + 0.5 * (hi - lo);
        if (mid <= lo || mid >= hi) {
            // Bracket is two adjacent doubles.
            return std::abs(binom_tail(n, k, lo) - delta) <= std::abs(binom_tail(n, k, hi) - delta) ? lo : hi;
        }
        if (binom_tail(n, k, mid) >= delta) {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo <= kRootTolerance) {
            const double x = lo + 0.5 * (hi - lo);
            if (std::abs(binom_tail(n, k, x) - delta) <= kResidualTolerance) {
                return x;
            }
        }
    }
    throw NumericalError("solve_j did not converge for n = " + std::to_string(n) + ", k = " + std::to_string(k));
}

Certificate sqsv_certificate(const CertificateQuery &q) {
    q.validate();
    if (q.protocol != Protocol::kSqsv) {
        throw ValidationError("query protocol is not sqsv");
    }
    const double j = solve_j(q.n, q.k, q.delta);
    return make_certificate(q, std::max(0.0, 1.0 - j / q.nu()));
}

DqsvIntermediates dqsv_intermediates(const CertificateQuery &q) {
    q.validate();
    require_dqsv_protocol(q);
    const DefensiveTables tables(q.n, q.k, q.nu());
    if (at_or_below_floor(tables, q)) {
        throw ValidationError("dqsv_intermediates: delta <= B_{n,k}(nu); the certificate is 0 here");
    }
    DqsvIntermediates out;
    out.h.reserve(static_cast<std::size_t>(q.n) + 2);
    out.g.reserve(static_cast<std::size_t>(q.n) + 2);
    for (std::int64_t z = 0; z <= q.n + 1; ++z) {
        out.h.push_back(static_cast<double>(std::exp(tables.log_h(z))));
        out.g.push_back(static_cast<double>(std::exp(tables.log_g(z))));
    }
    const DefensivePoint pt = locate(tables, q);
    out.zhat = pt.zhat;
    out.kappa = static_cast<double>(pt.kappa);
    out.zeta_tilde = static_cast<double>(pt.zeta_tilde);
    return out;
}

Certificate dqsv_certificate(const CertificateQuery &q) {
    q.validate();
    require_dqsv_protocol(q);
    const DefensiveTables tables(q.n, q.k, q.nu());
    if (at_or_below_floor(tables, q)) {
        return make_certificate(q, 0.0);
    }
    const DefensivePoint pt = locate(tables, q);
    return make_certificate(q, static_cast<double>(pt.zeta_tilde / static_cast<long double>(q.delta)));
}

Certificate certify(const CertificateQuery &q) {
    return q.protocol == Protocol::kSqsv ? sqsv_certificate(q) : dqsv_certificate(q);
}

ProportionInterval clopper_pearson(std::int64_t successes, std::int64_t trials, double confidence) {
    if (trials < 1 || successes < 0 || successes > trials) {
        throw ValidationError("clopper_pearson: need 0 <= successes <= trials, trials >= 1");
    }
    if (!(confidence > 0.0 && confidence < 1.0)) {
        throw ValidationError("clopper_pearson: confidence must lie in (0, 1)");
    }
    const double tail = 0.5 * (1.0 - confidence);
    const double low = successes == 0 ? 0.0 : solve_j(trials, successes - 1, 1.0 - tail);
    const double high = successes == trials ? 1.0 : solve_j(trials, successes, tail);
    return ProportionInterval{low, high};
}

}  // namespace qsv
