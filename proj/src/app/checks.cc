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

#include "qsv/app/checks.h"

#include <cmath>
#include <functional>
#include <vector>

#include "qsv/app/config.h"
#include "qsv/app/report.h"
#include "qsv/certbank.h"
#include "qsv/errors.h"
#include "qsv/oracle.h"

namespace qsv::app {

namespace {

constexpr double kTol = 1e-12;

// Probability a below probability b, with each given as (log p, log(1 - p));
// whichever side is resolved to full precision decides.
bool below(long double log_a, long double log_upper_a, long double log_b, long double log_upper_b) {
    return log_a < log_b || log_upper_a > log_upper_b;
}

struct TailPoint {
    long double lower;
    long double upper;
};

TailPoint tail(std::int64_t z, std::int64_t k, double p) {
    return {log_binom_tail(z, k, p), log_binom_upper_tail(z, k, p)};
}

bool below(const TailPoint &a, const TailPoint &b) {
    return below(a.lower, a.upper, b.lower, b.upper);
}

void record(CheckReport &r, bool ok, const std::function<ordered_json()> &describe_failure) {
    ++r.checks;
    if (!ok) {
        if (r.violations == 0) {
            r.counterexample = describe_failure();
        }
        ++r.violations;
    }
}

}  // namespace

nlohmann::ordered_json CheckReport::to_json() const {
    ordered_json out;
    out["suite"] = suite;
    out["passed"] = passed();
    out["checks"] = checks;
    out["violations"] = violations;
    out["details"] = details;
    out["counterexample"] = counterexample;
    return out;
}

CheckReport check_binom() {
    CheckReport r;
    r.suite = "binom";
    const std::vector<double> p_grid = {0.001, 0.01, 0.1, 0.25, 0.5, 0.75, 0.9, 0.99, 0.999};
    std::int64_t monotone_checks = 0;
    for (std::int64_t z = 1; z <= 200; ++z) {
        for (std::int64_t k = 0; k < z; ++k) {
            for (std::size_t i = 0; i < p_grid.size(); ++i) {
                const double p = p_grid[i];
                const TailPoint here = tail(z, k, p);
                auto failure = [&](const char *what) {
                    return [=] {
                        ordered_json j;
                        j["property"] = what;
                        j["z"] = z;
                        j["k"] = k;
                        j["p"] = p;
                        return j;
                    };
                };
                // Strictly increasing in k (up to k = z, where the tail is 1).
                record(r, below(here, tail(z, k + 1, p)), failure("increasing in k"));
                // Strictly decreasing in z.
                record(r, below(tail(z + 1, k, p), here), failure("decreasing in z"));
                // Strictly decreasing in p.
                if (i + 1 < p_grid.size()) {
                    record(r, below(tail(z, k, p_grid[i + 1]), here), failure("decreasing in p"));
                }
                monotone_checks += i + 1 < p_grid.size() ? 3 : 2;
            }
        }
    }
    r.details["tail_monotonicity_checks"] = monotone_checks;

    double worst_closed = 0.0;
    for (std::int64_t n : {1, 10, 100, 1000, 10000}) {
        for (double delta : {0.01, 0.05, 0.5, 0.9}) {
            const double closed = -std::expm1(std::log(delta) / static_cast<double>(n));
            const double err = std::abs(solve_j(n, 0, delta) - closed);
            worst_closed = std::max(worst_closed, err);
            record(r, err <= kTol, [=] {
                ordered_json j;
                j["property"] = "zero-failure closed form";
                j["n"] = n;
                j["delta"] = delta;
                j["error"] = err;
                return j;
            });
        }
    }
    r.details["closed_form_max_error"] = worst_closed;

    double worst_floor = 0.0;
    std::int64_t table_checks = 0;
    for (double lambda : {0.1, 1.0 / 3.0, 0.9}) {
        for (std::int64_t n : {1, 2, 3, 5, 10, 20, 50, 100, 150, 200}) {
            for (std::int64_t k = 0; k < n; ++k) {
                const DefensiveTables t(n, k, 1.0 - lambda);
                for (std::int64_t z = k; z <= n; ++z) {
                    const bool ok =
                        below(t.log_h(z + 1), t.log_one_minus_h(z + 1), t.log_h(z), t.log_one_minus_h(z));
                    record(r, ok, [=] {
                        ordered_json j;
                        j["property"] = "h strictly decreasing";
                        j["n"] = n;
                        j["k"] = k;
                        j["lambda"] = lambda;
                        j["z"] = z;
                        return j;
                    });
                    ++table_checks;
                }
                // Relative difference of h_{N+1} and B_{N,k}(nu) from their logs.
                const double rel = std::abs(std::expm1(
                    static_cast<double>(t.log_h(n + 1) - log_binom_tail(n, k, 1.0 - lambda))));
                worst_floor = std::max(worst_floor, rel);
                record(r, rel <= kTol, [=] {
                    ordered_json j;
                    j["property"] = "h_{N+1} equals B_{N,k}(nu)";
                    j["n"] = n;
                    j["k"] = k;
                    j["lambda"] = lambda;
                    j["relative_error"] = rel;
                    return j;
                });
            }
        }
    }
    r.details["table_monotonicity_checks"] = table_checks;
    r.details["floor_max_relative_error"] = worst_floor;
    return r;
}

CheckReport check_sqsv_scan(std::int64_t grid_size) {
    CheckReport r;
    r.suite = "sqsv";
    const double step = 1.0 / static_cast<double>(grid_size);
    double worst_gap = 0.0;
    for (std::int64_t n : {1, 5, 10, 50, 100}) {
        for (std::int64_t k : {0, 1, 3}) {
            if (k >= n) {
                continue;
            }
            for (double delta : {0.01, 0.05, 0.5, 1.0}) {
                for (double lambda : {0.0, 0.2, 1.0 / 3.0, 0.7}) {
                    const double scan = sqsv_worst_case_scan(n, k, delta, lambda, grid_size);
                    const double cert = sqsv_certificate({Protocol::kSqsv, n, k, delta, lambda}).infidelity_bound;
                    const double gap = cert - scan;
                    worst_gap = std::max(worst_gap, gap);
                    record(r, gap >= -kTol && gap <= step + kTol, [=] {
                        ordered_json j;
                        j["n"] = n;
                        j["k"] = k;
                        j["delta"] = delta;
                        j["lambda"] = lambda;
                        j["scan_infidelity"] = scan;
                        j["certificate_infidelity"] = cert;
                        return j;
                    });
                }
            }
        }
    }
    r.details["grid_size"] = grid_size;
    r.details["max_gap"] = worst_gap;
    return r;
}

CheckReport check_dqsv_sweep(std::int64_t n, std::int64_t k, double lambda, std::int64_t trials,
                             const SeedPlan &seeds, int threads) {
    const SoundnessReport s = dqsv_soundness_sweep(n, k, lambda, trials, seeds, threads);
    CheckReport r;
    r.suite = "dqsv-sweep";
    r.checks = s.evaluated;
    r.violations = s.violations;
    r.details = soundness_json(s);
    if (!s.counterexamples.empty()) {
        r.counterexample = r.details["counterexamples"][0];
    }
    return r;
}

CheckReport check_factorization(std::int64_t n_max, std::int64_t trials, const SeedPlan &seeds) {
    if (n_max < 1 || n_max > 15) {
        throw ValidationError("factorization check needs 1 <= n <= 15");
    }
    CheckReport r;
    r.suite = "factorization";
    const HomogeneousStrategy strategy = build_singlet_strategy();
    double worst = 0.0;
    for (std::int64_t n = 1; n <= n_max; ++n) {
        RandomStream rng = seeds.stream(static_cast<std::uint64_t>(n));
        for (std::int64_t t = 0; t < trials; ++t) {
            const auto spec = random_adversary(n + 1, rng);
            const ProductSequenceMixture m = build_mixture(spec);
            for (std::int64_t k = 0; k < n; ++k) {
                const ExactStats fast = exact_stats(m, k, strategy);
                const ExactStats slow = enumerate_stats(m, k, strategy);
                const double err = std::max(std::abs(fast.p_k - slow.p_k), std::abs(fast.f_k - slow.f_k));
                worst = std::max(worst, err);
                record(r, err <= kTol, [&] {
                    ordered_json j;
                    j["n"] = n;
                    j["k"] = k;
                    j["mixture"] = describe(spec);
                    j["factorized"] = {fast.p_k, fast.f_k};
                    j["enumerated"] = {slow.p_k, slow.f_k};
                    return j;
                });
            }
        }
    }
    r.details["n_max"] = n_max;
    r.details["trials_per_n"] = trials;
    r.details["max_abs_difference"] = worst;
    return r;
}

}  // namespace qsv::app
