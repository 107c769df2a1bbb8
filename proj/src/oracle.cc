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

#include "qsv/oracle.h"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>

#include "qsv/certbank.h"
#include "qsv/errors.h"
#include "qsv/simulation.h"

namespace qsv {

namespace {

struct SystemScalars {
    double pass;      // tr(omega sigma)
    double fidelity;  // <target|sigma|target>
};

std::vector<SystemScalars> scalars(const ProductSequence &seq, const HomogeneousStrategy &strategy) {
    std::vector<SystemScalars> out;
    out.reserve(seq.states.size());
    for (const auto &s : seq.states) {
        out.push_back({pass_probability(strategy, s), s.overlap(strategy.target())});
    }
    return out;
}

void require_budget(const ProductSequenceMixture &m, std::int64_t k, std::size_t max_systems) {
    if (k < 0) {
        throw ValidationError("k must be non-negative");
    }
    if (m.num_systems() > max_systems) {
        throw BudgetError("oracle budget exceeded: " + std::to_string(m.num_systems()) + " systems > " +
                          std::to_string(max_systems));
    }
}

// P(at most k failures) among all systems except `skip`, by the usual
// Poisson-binomial recursion truncated at k + 1 failures.
double at_most_k_failures(const std::vector<SystemScalars> &sys, std::size_t skip, std::int64_t k,
                          std::vector<double> &dist) {
    const auto bins = static_cast<std::size_t>(k) + 1;
    dist.assign(bins, 0.0);
    dist[0] = 1.0;
    for (std::size_t j = 0; j < sys.size(); ++j) {
        if (j == skip) {
            continue;
        }
        const double pass = sys[j].pass;
        const double fail = 1.0 - pass;
        for (std::size_t f = bins; f-- > 0;) {
            dist[f] = dist[f] * pass + (f > 0 ? dist[f - 1] * fail : 0.0);
        }
    }
    double total = 0.0;
    for (double d : dist) {
        total += d;
    }
    return total;
}

// Rounding can push the sums a few ulps outside 0 <= f_k <= p_k <= 1.
ExactStats finish(ExactStats out) {
    out.p_k = std::clamp(out.p_k, 0.0, 1.0);
    out.f_k = std::clamp(out.f_k, 0.0, out.p_k);
    if (out.p_k > 0.0) {
        out.conditional_fidelity = out.f_k / out.p_k;
    }
    return out;
}

}  // namespace

ExactStats exact_stats(const ProductSequenceMixture &m, std::int64_t k, const HomogeneousStrategy &strategy,
                       OracleBudget budget) {
    require_budget(m, k, budget.max_systems);
    const double keep = 1.0 / static_cast<double>(m.num_systems());
    ExactStats out;
    std::vector<double> dist;
    for (const auto &b : m.branches()) {
        const auto sys = scalars(b.sequence, strategy);
        double pk = 0.0;
        double fk = 0.0;
        for (std::size_t l = 0; l < sys.size(); ++l) {
            const double accept = at_most_k_failures(sys, l, k, dist);
            pk += accept;
            fk += accept * sys[l].fidelity;
        }
        out.p_k += b.weight * keep * pk;
        out.f_k += b.weight * keep * fk;
    }
    return finish(out);
}

double exact_pk(const ProductSequenceMixture &m, std::int64_t k, const HomogeneousStrategy &strategy,
                OracleBudget budget) {
    return exact_stats(m, k, strategy, budget).p_k;
}

double exact_fk(const ProductSequenceMixture &m, std::int64_t k, const HomogeneousStrategy &strategy,
                OracleBudget budget) {
    return exact_stats(m, k, strategy, budget).f_k;
}

ExactStats enumerate_stats(const ProductSequenceMixture &m, std::int64_t k, const HomogeneousStrategy &strategy) {
    require_budget(m, k, 16);
    const ComplexMatrix fail_op = strategy.fail_operator();
    const ComplexMatrix target = outer(strategy.target(), strategy.target());
    const std::size_t systems = m.num_systems();
    const std::size_t tested = systems - 1;
    ExactStats out;
    for (const auto &b : m.branches()) {
        std::vector<double> pass(systems);
        std::vector<double> fail(systems);
        std::vector<double> fid(systems);
        for (std::size_t j = 0; j < systems; ++j) {
            const auto &s = b.sequence.states[j];
            pass[j] = expectation(strategy.omega(), s);
            fail[j] = expectation(fail_op, s);
            fid[j] = expectation(target, s);
        }
        for (std::size_t l = 0; l < systems; ++l) {
            double accept = 0.0;
            for (std::uint32_t mask = 0; mask < (1u << tested); ++mask) {
                if (std::popcount(mask) > k) {
                    continue;
                }
                double prob = 1.0;
                std::size_t slot = 0;
                for (std::size_t j = 0; j < systems; ++j) {
                    if (j == l) {
                        continue;
                    }
                    prob *= (mask >> slot & 1u) ? fail[j] : pass[j];
                    ++slot;
                }
                accept += prob;
            }
            out.p_k += b.weight * accept / static_cast<double>(systems);
            out.f_k += b.weight * accept * fid[l] / static_cast<double>(systems);
        }
    }
    return finish(out);
}

double sqsv_worst_case_scan(std::int64_t n, std::int64_t k, double delta, double lambda, std::int64_t grid_size) {
    if (grid_size < 1000) {
        throw ValidationError("sqsv_worst_case_scan: grid_size must be at least 1000");
    }
    CertificateQuery{Protocol::kSqsv, n, k, delta, lambda}.validate();
    const HomogeneousStrategy strategy = build_homogeneous_strategy(singlet(), lambda);
    double best = 0.0;
    for (std::int64_t i = 0; i < grid_size; ++i) {
        const double eps = static_cast<double>(i) / static_cast<double>(grid_size - 1);
        const double pass = pass_probability(strategy, worst_case_state(eps, strategy));
        if (binom_tail(n, k, std::clamp(1.0 - pass, 0.0, 1.0)) >= delta) {
            best = eps;
        }
    }
    return best;
}

std::optional<SoundnessCase> check_dqsv_soundness(const std::vector<BranchSpec> &branches, std::int64_t k,
                                                  const HomogeneousStrategy &strategy) {
    const ProductSequenceMixture m = build_mixture(branches);
    const auto n = static_cast<std::int64_t>(m.num_systems()) - 1;
    const ExactStats stats = exact_stats(m, k, strategy);
    const double floor = binom_tail(n, k, strategy.nu());
    if (!(stats.p_k > floor) || !stats.conditional_fidelity) {
        return std::nullopt;
    }
    const double delta = std::min(stats.p_k, 1.0);
    const Certificate cert = dqsv_certificate({Protocol::kDqsv, n, k, delta, strategy.lambda()});
    SoundnessCase c;
    c.mixture = describe(branches);
    c.p_k = stats.p_k;
    c.conditional_fidelity = *stats.conditional_fidelity;
    c.certificate = cert.fidelity_bound;
    c.slack = c.conditional_fidelity - c.certificate;
    return c;
}

std::vector<BranchSpec> random_adversary(std::int64_t num_systems, RandomStream &rng) {
    const auto systems = static_cast<std::size_t>(num_systems);
    auto random_state = [&rng]() {
        switch (rng.below(4)) {
            case 0:
                return StateSpec::mixed();
            case 1:
                return StateSpec::werner(rng.uniform(0.25, 1.0));
            case 2:
                return StateSpec::singlet_phi(rng.uniform(0.0, 2.0 * std::numbers::pi));
            default:
                return StateSpec::singlet_phi(rng.uniform(0.0, 2.0 * std::numbers::pi), rng.uniform(0.25, 1.0));
        }
    };

    const std::size_t count = 1 + rng.below(8);
    std::vector<BranchSpec> branches(count);
    double total = 0.0;
    for (std::size_t b = 0; b < count; ++b) {
        auto &branch = branches[b];
        branch.weight = rng.uniform(0.05, 1.0);
        total += branch.weight;
        // Mostly-good base sequence with a random number of planted deviants.
        const StateSpec base = rng.bernoulli(0.5) ? StateSpec::singlet()
                                                  : (rng.bernoulli(0.5) ? StateSpec::werner(rng.uniform(0.7, 1.0))
                                                                        : random_state());
        branch.systems.assign(systems, base);
        const std::size_t deviants = rng.below(systems + 1);
        for (std::size_t d = 0; d < deviants; ++d) {
            branch.systems[rng.below(systems)] = random_state();
        }
        branch.label = "b" + std::to_string(b);
    }
    for (auto &branch : branches) {
        branch.weight /= total;
    }
    return branches;
}

SoundnessReport dqsv_soundness_sweep(std::int64_t n, std::int64_t k, double lambda, std::int64_t trials,
                                     const SeedPlan &seeds, int threads) {
    if (n < 1 || n > 12) {
        throw ValidationError("dqsv_soundness_sweep: n must lie in [1, 12]");
    }
    if (trials < 1) {
        throw ValidationError("dqsv_soundness_sweep: trials must be positive");
    }
    CertificateQuery{Protocol::kDqsv, n, k, 1.0, lambda}.validate();
    const HomogeneousStrategy strategy =
        lambda == 1.0 / 3.0 ? build_singlet_strategy() : build_homogeneous_strategy(singlet(), lambda);

    std::vector<std::optional<SoundnessCase>> results(static_cast<std::size_t>(trials));
    parallel_for(results.size(), threads, [&](std::size_t t) {
        RandomStream rng = seeds.stream(t);
        results[t] = check_dqsv_soundness(random_adversary(n + 1, rng), k, strategy);
    });

    SoundnessReport report;
    report.n = n;
    report.k = k;
    report.lambda = lambda;
    report.trials = trials;
    for (auto &r : results) {
        if (!r) {
            continue;
        }
        ++report.evaluated;
        if (!report.tightest || r->slack < report.min_slack) {
            report.min_slack = r->slack;
            report.tightest = *r;
        }
        if (r->slack < -kSoundnessTolerance) {
            ++report.violations;
            report.counterexamples.push_back(*r);
        }
    }
    return report;
}

}  // namespace qsv
