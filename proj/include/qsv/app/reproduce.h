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

#ifndef QSV_APP_REPRODUCE_H
#define QSV_APP_REPRODUCE_H

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "qsv/random.h"
#include "qsv/simulation.h"

namespace qsv::app {

/// Correlated source rho1 (2/3 singlets, 1/3 maximally mixed) tested with
/// N = 100, sweeping the failure allowance k.
struct Fig3Options {
    std::int64_t n = 100;
    std::int64_t k_max = 10;
    std::int64_t rounds = 10000;
    std::vector<double> prep_fidelities = {1.0, 0.98};
};

struct Fig3Row {
    double prep_fidelity = 1.0;
    std::int64_t n = 0;
    std::int64_t k = 0;
    std::int64_t rounds = 0;
    std::int64_t accepted = 0;
    double p_hat = 0.0;
    double p_low = 0.0;
    double p_high = 0.0;
    double p_exact = 0.0;
    MeanEstimate uncond_truth;
    double uncond_exact = 0.0;
    std::optional<MeanEstimate> cond_truth;
    std::optional<MeanEstimate> cond_measured;
    std::optional<double> cond_exact;
    std::optional<double> sqsv_cert;      // delta = p_hat
    std::optional<double> dqsv_cert;      // delta = p_hat
    std::optional<double> sqsv_cert_low;  // delta = lower 95% edge of p_hat
    std::optional<double> dqsv_cert_low;
};

std::vector<Fig3Row> run_fig3(const Fig3Options &options, const SeedPlan &seeds, int threads);
void write_fig3_csv(std::ostream &out, const std::vector<Fig3Row> &rows);

/// rho2 (one |Psi(phi)> at a uniformly random position among singlets) with
/// k = 1: a sweep over N at phi = pi and a sweep over phi at N = 5. Each point
/// runs until `acceptances` accepted rounds (capped at `max_rounds`).
struct Fig4Options {
    std::vector<std::int64_t> n_values = {2, 3, 4, 5, 6, 7, 8, 9, 10};
    std::vector<double> phi_values = {0.0, 0.7853981633974483, 1.5707963267948966, 2.356194490192345,
                                      3.141592653589793};
    std::int64_t n_for_phi_sweep = 5;
    double phi_for_n_sweep = 3.141592653589793;
    std::int64_t k = 1;
    std::int64_t acceptances = 1000;
    std::int64_t max_rounds = 1000000;
    double prep_fidelity = 1.0;
};

struct Fig4Row {
    std::string sweep;  // "n" or "phi"
    std::int64_t n = 0;
    double phi = 0.0;
    std::int64_t k = 0;
    std::int64_t rounds = 0;
    std::int64_t accepted = 0;
    double p_hat = 0.0;
    double p_low = 0.0;
    double p_high = 0.0;
    double p_exact = 0.0;
    double uncond_exact = 0.0;
    std::optional<double> cond_exact;
    MeanEstimate uncond_truth;
    std::optional<MeanEstimate> cond_truth;
    std::optional<MeanEstimate> cond_measured;
    std::optional<double> sqsv_cert;
    std::optional<double> dqsv_cert;
    std::optional<double> sqsv_cert_exact;  // delta = exact p_k
    std::optional<double> dqsv_cert_exact;
};

std::vector<Fig4Row> run_fig4(const Fig4Options &options, const SeedPlan &seeds, int threads);
void write_fig4_csv(std::ostream &out, const std::vector<Fig4Row> &rows);

/// Honest source: one growing run of tests per round, certificates at the
/// observed failure count for every grid N.
struct Fig5Options {
    double fidelity = 0.99;
    double delta = 0.05;
    std::int64_t n_max = 1000;
    int points_per_decade = 20;
    std::int64_t rounds = 80;
};

/// Distinct values round(10^(i / points_per_decade)) up to n_max, with n_max
/// appended if the grid misses it.
std::vector<std::int64_t> log_grid(std::int64_t n_max, int points_per_decade);

std::vector<ScalingRow> run_fig5(const Fig5Options &options, const SeedPlan &seeds, int threads);
void write_fig5_csv(std::ostream &out, const std::vector<ScalingRow> &rows);

/// Least-squares slope of log(eps) against log(n) over rows with lo <= n <= hi,
/// using the round-averaged standard-protocol infidelity.
double loglog_slope(const std::vector<ScalingRow> &rows, std::int64_t lo, std::int64_t hi);

}  // namespace qsv::app

#endif
