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

#include "qsv/app/report.h"

#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>

#include "qsv/errors.h"
#include "qsv/format.h"

namespace qsv::app {

std::string timestamp_utc() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

void write_csv_preamble(std::ostream &out, std::string_view schema) {
    out << "# schema: " << schema << "\n";
    out << "# generated_at: " << timestamp_utc() << "\n";
}

void write_csv_row(std::ostream &out, const std::vector<std::string> &cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i > 0) {
            out << ',';
        }
        out << cells[i];
    }
    out << '\n';
}

std::string cell(double x) {
    return format_double(x);
}

std::string cell(std::int64_t x) {
    return std::to_string(x);
}

std::string cell(const std::optional<double> &x) {
    return x ? format_double(*x) : "";
}

ordered_json json_preamble(std::string_view schema) {
    ordered_json doc;
    doc["schema"] = schema;
    doc["generated_at"] = timestamp_utc();
    return doc;
}

void write_json(std::ostream &out, const ordered_json &doc) {
    out << doc.dump(2) << "\n";
}

std::string settings_digest(const RunOutcome &o) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto feed = [&](std::uint8_t byte) {
        h ^= byte;
        h *= 0x100000001b3ULL;
    };
    for (std::size_t i = 0; i < o.settings.size(); ++i) {
        feed(o.settings[i]);
        feed(o.passes[i] ? 1 : 0);
    }
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

ordered_json certificate_json(const Certificate &c, const std::optional<DqsvIntermediates> &in) {
    ordered_json out;
    out["protocol"] = protocol_name(c.query.protocol);
    out["n"] = c.query.n;
    out["k"] = c.query.k;
    out["delta"] = c.query.delta;
    out["lambda"] = c.query.lambda;
    out["fidelity_bound"] = c.fidelity_bound;
    out["infidelity_bound"] = c.infidelity_bound;
    if (in) {
        ordered_json j;
        j["h"] = in->h;
        j["g"] = in->g;
        j["zhat"] = in->zhat;
        j["kappa"] = in->kappa;
        j["zeta_tilde"] = in->zeta_tilde;
        out["intermediates"] = std::move(j);
    }
    return out;
}

ordered_json mean_json(const MeanEstimate &m) {
    ordered_json out;
    out["mean"] = m.mean;
    out["std_dev"] = m.std_dev;
    out["std_error"] = m.std_error;
    out["count"] = m.count;
    return out;
}

std::optional<double> certificate_at(Protocol p, std::int64_t n, std::int64_t k, double delta, double lambda) {
    const CertificateQuery q{p, n, k, delta, lambda};
    try {
        q.validate();
    } catch (const ValidationError &) {
        return std::nullopt;
    }
    return certify(q).fidelity_bound;
}

namespace {

ordered_json optional_mean(const std::optional<MeanEstimate> &m) {
    return m ? mean_json(*m) : ordered_json(nullptr);
}

ordered_json optional_number(const std::optional<double> &x) {
    return x ? ordered_json(*x) : ordered_json(nullptr);
}

}  // namespace

ordered_json summary_json(const ExperimentSummary &s, double delta_config, double lambda) {
    ordered_json out = json_preamble("qsv.summary/1");
    out["protocol"] = protocol_name(s.protocol);
    out["n"] = s.n;
    out["k"] = s.k;
    out["lambda"] = lambda;
    out["rounds"] = s.rounds;
    out["accepted"] = s.accepted;
    out["p_hat"] = s.p_hat;
    out["p_ci95"] = {s.p_ci.low, s.p_ci.high};
    out["conditional_fidelity_truth"] = optional_mean(s.conditional_fidelity_truth);
    out["conditional_fidelity_measured"] = optional_mean(s.conditional_fidelity_measured);
    out["unconditional_fidelity_truth"] = mean_json(s.unconditional_fidelity_truth);
    out["unconditional_fidelity_measured"] = mean_json(s.unconditional_fidelity_measured);
    ordered_json hist = ordered_json::object();
    for (const auto &[failures, count] : s.failure_histogram) {
        hist[std::to_string(failures)] = count;
    }
    out["failure_histogram"] = std::move(hist);
    ordered_json certs;
    for (Protocol p : {Protocol::kSqsv, Protocol::kDqsv}) {
        ordered_json c;
        c["at_configured_delta"] = optional_number(certificate_at(p, s.n, s.k, delta_config, lambda));
        c["at_p_hat"] = optional_number(certificate_at(p, s.n, s.k, s.p_hat, lambda));
        c["at_p_low"] = optional_number(certificate_at(p, s.n, s.k, s.p_ci.low, lambda));
        certs[std::string(protocol_name(p))] = std::move(c);
    }
    out["configured_delta"] = delta_config;
    out["certificates"] = std::move(certs);
    return out;
}

void write_summary_csv(std::ostream &out, const ExperimentSummary &s, double lambda) {
    write_csv_preamble(out, "qsv.summary/1");
    write_csv_row(out, {"protocol", "n", "k", "rounds", "accepted", "p_hat", "p_low", "p_high", "cond_truth_mean",
                        "cond_truth_se", "cond_measured_mean", "cond_measured_se", "uncond_truth_mean",
                        "uncond_truth_se", "sqsv_cert_p_hat", "dqsv_cert_p_hat", "sqsv_cert_p_low",
                        "dqsv_cert_p_low"});
    auto mean = [](const std::optional<MeanEstimate> &m) { return m ? cell(m->mean) : ""; };
    auto se = [](const std::optional<MeanEstimate> &m) { return m ? cell(m->std_error) : ""; };
    write_csv_row(out, {std::string(protocol_name(s.protocol)), cell(s.n), cell(s.k), cell(s.rounds), cell(s.accepted),
                        cell(s.p_hat), cell(s.p_ci.low), cell(s.p_ci.high), mean(s.conditional_fidelity_truth),
                        se(s.conditional_fidelity_truth), mean(s.conditional_fidelity_measured),
                        se(s.conditional_fidelity_measured), cell(s.unconditional_fidelity_truth.mean),
                        cell(s.unconditional_fidelity_truth.std_error),
                        cell(certificate_at(Protocol::kSqsv, s.n, s.k, s.p_hat, lambda)),
                        cell(certificate_at(Protocol::kDqsv, s.n, s.k, s.p_hat, lambda)),
                        cell(certificate_at(Protocol::kSqsv, s.n, s.k, s.p_ci.low, lambda)),
                        cell(certificate_at(Protocol::kDqsv, s.n, s.k, s.p_ci.low, lambda))});
}

void write_rounds_csv(std::ostream &out, std::span<const RunOutcome> outcomes, std::int64_t k) {
    write_csv_preamble(out, "qsv.rounds/1");
    write_csv_row(out, {"round", "branch", "failures", "accepted", "leftover_index", "leftover_truth_fidelity",
                        "settings_digest"});
    for (std::size_t r = 0; r < outcomes.size(); ++r) {
        const RunOutcome &o = outcomes[r];
        write_csv_row(out, {std::to_string(r), std::to_string(o.branch_index), cell(o.failures),
                            o.accepted(k) ? "1" : "0",
                            o.leftover_index ? std::to_string(*o.leftover_index) : "",
                            cell(o.leftover_truth_fidelity), settings_digest(o)});
    }
}

ordered_json soundness_json(const SoundnessReport &r) {
    auto case_json = [](const SoundnessCase &c) {
        ordered_json j;
        j["mixture"] = c.mixture;
        j["p_k"] = c.p_k;
        j["conditional_fidelity"] = c.conditional_fidelity;
        j["certificate"] = c.certificate;
        j["slack"] = c.slack;
        return j;
    };
    ordered_json out;
    out["n"] = r.n;
    out["k"] = r.k;
    out["lambda"] = r.lambda;
    out["trials"] = r.trials;
    out["evaluated"] = r.evaluated;
    out["violations"] = r.violations;
    out["min_slack"] = r.min_slack;
    out["tightest"] = r.tightest ? case_json(*r.tightest) : ordered_json(nullptr);
    ordered_json ce = ordered_json::array();
    for (const auto &c : r.counterexamples) {
        ce.push_back(case_json(c));
    }
    out["counterexamples"] = std::move(ce);
    return out;
}

std::ofstream open_output(const std::filesystem::path &dir, const std::string &name) {
    std::filesystem::create_directories(dir);
    std::ofstream out(dir / name, std::ios::binary);
    if (!out) {
        throw ValidationError("cannot write " + (dir / name).string());
    }
    return out;
}

}  // namespace qsv::app
