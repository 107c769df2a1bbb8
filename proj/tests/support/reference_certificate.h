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

#ifndef QSV_TESTS_SUPPORT_REFERENCE_CERTIFICATE_H
#define QSV_TESTS_SUPPORT_REFERENCE_CERTIFICATE_H

// Slow 50-digit evaluation of the binomial tail and the defensive
// certificate, written directly from the definitions with no log-space
// tricks. Used to cross-check the production implementation.

#include <cstdint>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>

namespace qsv::test_support {

using Real = boost::multiprecision::cpp_bin_float_50;

// Sum of C(z, j) p^j (1 - p)^(z - j) for j <= min(k, z), built by the
// term ratio recurrence.
inline Real reference_binom_tail(std::int64_t z, std::int64_t k, const Real &p) {
    if (k >= z || p == 0) {
        return Real(1);
    }
    const Real q = 1 - p;
    if (q == 0) {
        return Real(0);
    }
    Real term = boost::multiprecision::pow(q, z);
    Real sum = term;
    for (std::int64_t j = 0; j < k; ++j) {
        term *= Real(z - j) / Real(j + 1) * p / q;
        sum += term;
    }
    return sum;
}

// Sum of the terms with j > k, accumulated directly so that tiny upper tails
// keep their relative precision.
inline Real reference_binom_upper_tail(std::int64_t z, std::int64_t k, const Real &p) {
    if (k >= z || p == 0) {
        return Real(0);
    }
    const Real q = 1 - p;
    Real sum = 0;
    Real term = boost::multiprecision::pow(q, z);
    for (std::int64_t j = 0; j < z; ++j) {
        term *= Real(z - j) / Real(j + 1) * p / q;
        if (j + 1 > k) {
            sum += term;
        }
    }
    return q == 0 ? Real(1) : sum;
}

struct ReferenceDefensive {
    std::vector<Real> h;
    std::vector<Real> g;
    std::int64_t zhat = -1;
    Real kappa;
    Real zeta_tilde;
    Real fidelity;
    bool degenerate = false;
};

// nu is passed as the exact value the production code sees (1 - lambda in
// double), promoted without rounding.
inline ReferenceDefensive reference_defensive(std::int64_t n, std::int64_t k, double delta, double nu) {
    const Real v(nu);
    const Real d(delta);
    ReferenceDefensive out;
    for (std::int64_t z = 0; z <= n + 1; ++z) {
        if (z <= k) {
            out.h.push_back(Real(1));
            out.g.push_back(Real(n - z + 1) / Real(n + 1));
        } else {
            out.h.push_back((Real(n - z + 1) * reference_binom_tail(z, k, v) +
                             Real(z) * reference_binom_tail(z - 1, k, v)) /
                            Real(n + 1));
            out.g.push_back(Real(n - z + 1) * reference_binom_tail(z, k, v) / Real(n + 1));
        }
    }
    if (d <= out.h[static_cast<std::size_t>(n + 1)]) {
        out.degenerate = true;
        out.fidelity = 0;
        return out;
    }
    for (std::int64_t z = 0; z <= n + 1; ++z) {
        if (out.h[static_cast<std::size_t>(z)] >= d) {
            out.zhat = z;
        }
    }
    const auto z = static_cast<std::size_t>(out.zhat);
    out.kappa = (d - out.h[z + 1]) / (out.h[z] - out.h[z + 1]);
    out.zeta_tilde = (1 - out.kappa) * out.g[z + 1] + out.kappa * out.g[z];
    out.fidelity = out.zeta_tilde / d;
    return out;
}

}  // namespace qsv::test_support

#endif
