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

#include "qsv/app/commands.h"

#include <cstdint>
#include <filesystem>
#include <optional>

#include "CLI11.hpp"
#include "qsv/app/checks.h"
#include "qsv/app/config.h"
#include "qsv/app/report.h"
#include "qsv/app/reproduce.h"
#include "qsv/errors.h"

namespace qsv::app {

namespace {

// Experiment ids separating the seed streams of the commands.
constexpr std::uint64_t kSimulateId = 1;
constexpr std::uint64_t kFig3Id = 3;
constexpr std::uint64_t kFig4Id = 4;
constexpr std::uint64_t kFig5Id = 5;
constexpr std::uint64_t kOracleId = 9;

struct GlobalFlags {
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    std::optional<std::string> format;
    std::optional<int> threads;
};

struct CertifyFlags {
    std::string protocol;
    std::int64_t n = 0;
    std::int64_t k = 0;
    double delta = 0.0;
    std::string lambda = "1/3";
    bool intermediates = false;
};

struct SimulateFlags {
    std::optional<std::string> config;
    std::optional<std::string> protocol;
    std::optional<std::int64_t> n;
    std::optional<std::int64_t> k;
    std::optional<double> delta;
    std::optional<std::string> lambda;
    std::optional<std::string> source;
    std::optional<double> fidelity;
    std::optional<std::string> phi;
    std::optional<std::int64_t> rounds;
    std::optional<std::int64_t> target_acceptances;
    std::optional<std::int64_t> max_rounds;
    bool no_conditional = false;
};

struct ReproduceFlags {
    std::string figure;
    std::optional<std::int64_t> rounds;
    std::optional<std::int64_t> k_max;
    std::vector<double> prep_fidelities;
    std::optional<std::int64_t> acceptances;
    std::optional<std::int64_t> max_rounds;
    std::optional<double> fidelity;
    bool ideal = false;
    std::optional<double> delta;
    std::optional<std::int64_t> n_max;
    std::optional<int> points_per_decade;
};

struct OracleFlags {
    std::string suite;
    std::optional<std::int64_t> n;
    std::int64_t k = 1;
    std::int64_t trials = 10000;
    std::string lambda = "1/3";
    std::int64_t grid = 10000;
};

std::uint64_t seed_of(const GlobalFlags &g) {
    return g.seed.value_or(0);
}

int threads_of(const GlobalFlags &g) {
    const int t = g.threads.value_or(1);
    if (t < 1) {
        throw ValidationError("--threads must be at least 1");
    }
    return t;
}

std::filesystem::path out_dir_of(const GlobalFlags &g) {
    return g.out_dir.value_or("qsv-out");
}

int cmd_certify(const CertifyFlags &f, const GlobalFlags &g, std::ostream &out) {
    CertificateQuery q;
    q.protocol = parse_protocol(f.protocol);
    q.n = f.n;
    q.k = f.k;
    q.delta = f.delta;
    q.lambda = parse_lambda(f.lambda);
    const Certificate c = certify(q);
    std::optional<DqsvIntermediates> in;
    bool degenerate = false;
    if (f.intermediates && q.protocol == Protocol::kDqsv) {
        try {
            in = dqsv_intermediates(q);
        } catch (const ValidationError &) {
            degenerate = true;  // delta at or below the floor
        }
    }
    const OutputFormat format = parse_format(g.format.value_or("json"));
    if (format == OutputFormat::kCsv) {
        write_csv_row(out, {"protocol", "n", "k", "delta", "lambda", "fidelity_bound", "infidelity_bound"});
        write_csv_row(out, {std::string(protocol_name(q.protocol)), cell(q.n), cell(q.k), cell(q.delta),
                            cell(q.lambda), cell(c.fidelity_bound), cell(c.infidelity_bound)});
        return kExitOk;
    }
    ordered_json doc = certificate_json(c, in);
    if (f.intermediates && !in) {
        doc["intermediates"] = nullptr;
        if (degenerate) {
            doc["degenerate"] = true;
        }
    }
    write_json(out, doc);
    return kExitOk;
}

int cmd_simulate(const SimulateFlags &f, const GlobalFlags &g, std::ostream &out, std::ostream &err) {
    RunConfig c = f.config ? load_config(*f.config) : RunConfig{};
    if (f.protocol) {
        c.protocol = parse_protocol(*f.protocol);
    }
    if (f.n) {
        c.n = *f.n;
    }
    if (f.k) {
        c.k = *f.k;
    }
    if (f.delta) {
        c.delta = *f.delta;
    }
    if (f.lambda) {
        c.lambda = parse_lambda(*f.lambda);
    }
    if (f.source) {
        c.source.model = *f.source;
    }
    if (f.fidelity) {
        c.source.fidelity = *f.fidelity;
    }
    if (f.phi) {
        c.source.phi = StateSpec::parse("singlet_phi(" + *f.phi + ")").phi;
    }
    if (f.rounds) {
        c.stopping = StoppingRule::fixed(*f.rounds);
    }
    if (f.target_acceptances) {
        c.stopping = StoppingRule::until_accepted(*f.target_acceptances, f.max_rounds.value_or(c.stopping.max_rounds));
    } else if (f.max_rounds && c.stopping.target_acceptances) {
        c.stopping.max_rounds = *f.max_rounds;
    }
    if (f.no_conditional) {
        c.conditional_estimates = false;
    }
    if (g.seed) {
        c.seed = *g.seed;
    }
    if (g.out_dir) {
        c.out_dir = *g.out_dir;
    }
    if (g.format) {
        c.format = parse_format(*g.format);
    }
    if (g.threads) {
        c.threads = *g.threads;
    }
    validate(c);

    const HomogeneousStrategy strategy = strategy_for(c.lambda);
    const ProductSequenceMixture source = build_source(c);
    const SeedPlan seeds{c.seed, kSimulateId};
    const auto outcomes = simulate_rounds(source, c.n, c.k, strategy, c.protocol, c.stopping, seeds, c.threads);
    const ExperimentSummary s = summarize(outcomes, c.n, c.k, c.protocol, strategy);

    const std::filesystem::path dir = c.out_dir;
    {
        auto cfg = open_output(dir, "config.json");
        write_json(cfg, config_to_json(c));
    }
    if (c.format == OutputFormat::kJson) {
        auto sum = open_output(dir, "summary.json");
        write_json(sum, summary_json(s, c.delta, c.lambda));
    } else {
        auto sum = open_output(dir, "summary.csv");
        write_summary_csv(sum, s, c.lambda);
    }
    {
        auto rounds = open_output(dir, "rounds.csv");
        write_rounds_csv(rounds, outcomes, c.k);
    }
    out << "rounds " << s.rounds << ", accepted " << s.accepted << ", p_hat " << cell(s.p_hat) << "\n";
    out << "wrote " << (dir / (c.format == OutputFormat::kJson ? "summary.json" : "summary.csv")).string() << " and "
        << (dir / "rounds.csv").string() << "\n";
    if (c.conditional_estimates && c.protocol == Protocol::kDqsv && s.accepted == 0) {
        err << "qsv: no round was accepted; conditional fidelity estimates are undefined\n";
        return kExitNoAcceptance;
    }
    return kExitOk;
}

void write_meta(const std::filesystem::path &dir, const std::string &figure, const ordered_json &options,
                std::uint64_t seed) {
    ordered_json meta = json_preamble("qsv.reproduce-meta/1");
    meta["figure"] = figure;
    meta["seed"] = std::to_string(seed);
    meta["options"] = options;
    auto f = open_output(dir, figure + "_meta.json");
    write_json(f, meta);
}

int cmd_reproduce(const ReproduceFlags &f, const GlobalFlags &g, std::ostream &out) {
    const std::uint64_t seed = seed_of(g);
    const int threads = threads_of(g);
    const std::filesystem::path dir = out_dir_of(g);
    ordered_json options;
    std::string file = f.figure + ".csv";
    if (f.figure == "fig3") {
        Fig3Options o;
        if (f.rounds) {
            o.rounds = *f.rounds;
        }
        if (f.k_max) {
            o.k_max = *f.k_max;
        }
        if (!f.prep_fidelities.empty()) {
            o.prep_fidelities = f.prep_fidelities;
        }
        if (f.ideal) {
            o.prep_fidelities = {1.0};
        }
        options["n"] = o.n;
        options["k_max"] = o.k_max;
        options["rounds"] = o.rounds;
        options["prep_fidelities"] = o.prep_fidelities;
        const auto rows = run_fig3(o, SeedPlan{seed, kFig3Id}, threads);
        auto csv = open_output(dir, file);
        write_fig3_csv(csv, rows);
    } else if (f.figure == "fig4") {
        Fig4Options o;
        if (f.acceptances) {
            o.acceptances = *f.acceptances;
        }
        if (f.max_rounds) {
            o.max_rounds = *f.max_rounds;
        }
        if (f.prep_fidelities.size() > 1) {
            throw ValidationError("fig4 takes a single --prep-fidelity");
        }
        if (!f.prep_fidelities.empty()) {
            o.prep_fidelity = f.prep_fidelities.front();
        }
        options["k"] = o.k;
        options["acceptances"] = o.acceptances;
        options["max_rounds"] = o.max_rounds;
        options["prep_fidelity"] = o.prep_fidelity;
        options["n_values"] = o.n_values;
        options["phi_values"] = o.phi_values;
        const auto rows = run_fig4(o, SeedPlan{seed, kFig4Id}, threads);
        auto csv = open_output(dir, file);
        write_fig4_csv(csv, rows);
    } else if (f.figure == "fig5") {
        Fig5Options o;
        if (f.fidelity) {
            o.fidelity = *f.fidelity;
        }
        if (f.ideal) {
            o.fidelity = 1.0;
        }
        if (f.rounds) {
            o.rounds = *f.rounds;
        }
        if (f.delta) {
            o.delta = *f.delta;
        }
        if (f.n_max) {
            o.n_max = *f.n_max;
        }
        if (f.points_per_decade) {
            o.points_per_decade = *f.points_per_decade;
        }
        options["fidelity"] = o.fidelity;
        options["delta"] = o.delta;
        options["n_max"] = o.n_max;
        options["points_per_decade"] = o.points_per_decade;
        options["rounds"] = o.rounds;
        const auto rows = run_fig5(o, SeedPlan{seed, kFig5Id}, threads);
        auto csv = open_output(dir, file);
        write_fig5_csv(csv, rows);
    } else {
        throw ValidationError("unknown figure '" + f.figure + "' (expected fig3, fig4 or fig5)");
    }
    write_meta(dir, f.figure, options, seed);
    out << "wrote " << (dir / file).string() << "\n";
    return kExitOk;
}

int cmd_oracle_check(const OracleFlags &f, const GlobalFlags &g, std::ostream &out) {
    const SeedPlan seeds{seed_of(g), kOracleId};
    CheckReport r;
    if (f.suite == "binom") {
        r = check_binom();
    } else if (f.suite == "sqsv") {
        r = check_sqsv_scan(f.grid);
    } else if (f.suite == "dqsv-sweep") {
        r = check_dqsv_sweep(f.n.value_or(6), f.k, parse_lambda(f.lambda), f.trials, seeds, threads_of(g));
    } else if (f.suite == "factorization") {
        r = check_factorization(f.n.value_or(8), std::min<std::int64_t>(f.trials, 200), seeds);
    } else {
        throw ValidationError("unknown suite '" + f.suite + "' (expected binom, sqsv, dqsv-sweep or factorization)");
    }
    write_json(out, r.to_json());
    return r.passed() ? kExitOk : kExitViolation;
}

}  // namespace

int run_cli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
    CLI::App app{"Fidelity certificates and simulations for standard and defensive verification of the two-qubit "
                 "singlet.",
                 "qsv"};
    app.require_subcommand(1);
    app.fallthrough();

    GlobalFlags g;
    app.add_option("--seed", g.seed, "Master seed (unsigned 64-bit)");
    app.add_option("--out-dir", g.out_dir, "Directory for output files");
    app.add_option("--format", g.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    app.add_option("--threads", g.threads, "Worker threads for simulations");

    CertifyFlags cf;
    CLI::App *certify = app.add_subcommand("certify", "Evaluate a fidelity certificate");
    certify->add_option("--protocol", cf.protocol, "sqsv or dqsv")->required();
    certify->add_option("--n", cf.n, "Number of tests")->required();
    certify->add_option("--k", cf.k, "Allowed failures")->required();
    certify->add_option("--delta", cf.delta, "Significance level in (0, 1]")->required();
    certify->add_option("--lambda", cf.lambda, "Second-largest eigenvalue of the strategy (decimal or 1/3)")
        ->capture_default_str();
    certify->add_flag("--intermediates", cf.intermediates, "Include h, g, zhat, kappa and zeta (dqsv)");

    SimulateFlags sf;
    CLI::App *simulate = app.add_subcommand("simulate", "Run a Monte Carlo verification experiment");
    simulate->add_option("--config", sf.config, "JSON run configuration")->check(CLI::ExistingFile);
    simulate->add_option("--protocol", sf.protocol, "sqsv or dqsv");
    simulate->add_option("--n", sf.n, "Number of tests per round");
    simulate->add_option("--k", sf.k, "Allowed failures");
    simulate->add_option("--delta", sf.delta, "Significance level used for the reported certificates");
    simulate->add_option("--lambda", sf.lambda, "Strategy lambda (decimal or 1/3)");
    simulate->add_option("--source", sf.source, "honest, rho1, rho2 or custom");
    simulate->add_option("--fidelity", sf.fidelity, "Per-copy fidelity of the prepared singlets");
    simulate->add_option("--phi", sf.phi, "Phase of the odd copy for rho2 (radians, or pi, pi/4, ...)");
    simulate->add_option("--rounds", sf.rounds, "Fixed number of rounds");
    simulate->add_option("--target-acceptances", sf.target_acceptances, "Stop after this many accepted rounds");
    simulate->add_option("--max-rounds", sf.max_rounds, "Round cap for --target-acceptances");
    simulate->add_flag("--no-conditional", sf.no_conditional, "Do not require conditional estimates");

    ReproduceFlags rf;
    CLI::App *reproduce = app.add_subcommand("reproduce", "Regenerate a figure dataset as CSV");
    reproduce->add_option("figure", rf.figure, "fig3, fig4 or fig5")->required();
    reproduce->add_option("--rounds", rf.rounds, "Rounds (fig3: per preparation; fig5: averaged runs)");
    reproduce->add_option("--k-max", rf.k_max, "Largest k (fig3)");
    reproduce->add_option("--prep-fidelity", rf.prep_fidelities, "Singlet preparation fidelity (fig3: list; fig4)")
        ->delimiter(',');
    reproduce->add_option("--acceptances", rf.acceptances, "Accepted rounds per grid point (fig4)");
    reproduce->add_option("--max-rounds", rf.max_rounds, "Round cap per grid point (fig4)");
    reproduce->add_option("--fidelity", rf.fidelity, "Honest per-copy fidelity (fig5)");
    reproduce->add_flag("--ideal", rf.ideal, "Noise-free preparation (fig3, fig5)");
    reproduce->add_option("--delta", rf.delta, "Significance level (fig5)");
    reproduce->add_option("--n-max", rf.n_max, "Largest N (fig5)");
    reproduce->add_option("--points-per-decade", rf.points_per_decade, "Grid density (fig5)");

    OracleFlags of;
    CLI::App *oracle = app.add_subcommand("oracle-check", "Run an exact verification suite");
    oracle->add_option("suite", of.suite, "binom, sqsv, dqsv-sweep or factorization")->required();
    oracle->add_option("--n", of.n, "Tests per trial (dqsv-sweep, default 6) or largest N (factorization, default 8)");
    oracle->add_option("--k", of.k, "Allowed failures (dqsv-sweep)")->capture_default_str();
    oracle->add_option("--trials", of.trials, "Random mixtures (dqsv-sweep; factorization uses at most 200 per N)")
        ->capture_default_str();
    oracle->add_option("--lambda", of.lambda, "Strategy lambda (dqsv-sweep)")->capture_default_str();
    oracle->add_option("--grid", of.grid, "Scan resolution (sqsv)")->capture_default_str();

    std::vector<const char *> argv = {"qsv"};
    for (const auto &a : args) {
        argv.push_back(a.c_str());
    }
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp &e) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError &e) {
        err << "qsv: " << e.what() << "\n";
        return kExitValidation;
    }

    try {
        if (certify->parsed()) {
            return cmd_certify(cf, g, out);
        }
        if (simulate->parsed()) {
            return cmd_simulate(sf, g, out, err);
        }
        if (reproduce->parsed()) {
            return cmd_reproduce(rf, g, out);
        }
        if (oracle->parsed()) {
            return cmd_oracle_check(of, g, out);
        }
    } catch (const NumericalError &e) {
        err << "qsv: numerical failure: " << e.what() << "\n";
        return kExitNumerical;
    } catch (const ValidationError &e) {
        err << "qsv: " << e.what() << "\n";
        return kExitValidation;
    } catch (const std::exception &e) {
        err << "qsv: internal error: " << e.what() << "\n";
        return kExitInternal;
    }
    return kExitInternal;
}

}  // namespace qsv::app
