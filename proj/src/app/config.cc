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

#include "qsv/app/config.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "qsv/errors.h"

namespace qsv::app {

using nlohmann::json;

namespace {

constexpr double kOneThird = 1.0 / 3.0;

std::string join(const std::string &base, const std::string &field) {
    return base.empty() ? field : base + "." + field;
}

std::string index(const std::string &base, std::size_t i) {
    return base + "[" + std::to_string(i) + "]";
}

double number(const json &v, const std::string &where) {
    if (!v.is_number()) {
        throw ConfigError(where, "expected a number");
    }
    return v.get<double>();
}

std::int64_t integer(const json &v, const std::string &where) {
    if (!v.is_number_integer()) {
        throw ConfigError(where, "expected an integer");
    }
    return v.get<std::int64_t>();
}

std::string text(const json &v, const std::string &where) {
    if (!v.is_string()) {
        throw ConfigError(where, "expected a string");
    }
    return v.get<std::string>();
}

void reject_unknown(const json &obj, const std::string &where, std::initializer_list<std::string_view> known) {
    for (const auto &item : obj.items()) {
        bool found = false;
        for (auto key : known) {
            found = found || item.key() == key;
        }
        if (!found) {
            throw ConfigError(join(where, item.key()), "unknown field");
        }
    }
}

StateSpec state(const json &v, const std::string &where) {
    try {
        return StateSpec::parse(text(v, where));
    } catch (const ConfigError &) {
        throw;
    } catch (const ValidationError &e) {
        throw ConfigError(where, e.what());
    }
}

BranchSpec branch(const json &v, const std::string &where) {
    if (!v.is_object()) {
        throw ConfigError(where, "expected an object with weight and systems");
    }
    reject_unknown(v, where, {"weight", "systems", "label"});
    if (!v.contains("weight") || !v.contains("systems")) {
        throw ConfigError(where, "branch needs both weight and systems");
    }
    BranchSpec out;
    out.weight = number(v["weight"], join(where, "weight"));
    if (v.contains("label")) {
        out.label = text(v["label"], join(where, "label"));
    }
    const std::string sys_where = join(where, "systems");
    const json &systems = v["systems"];
    if (!systems.is_array()) {
        throw ConfigError(sys_where, "expected an array");
    }
    for (std::size_t i = 0; i < systems.size(); ++i) {
        const json &item = systems[i];
        const std::string item_where = index(sys_where, i);
        if (item.is_object()) {
            // {"state": "...", "count": m} repeats a descriptor.
            reject_unknown(item, item_where, {"state", "count"});
            if (!item.contains("state")) {
                throw ConfigError(item_where, "missing state");
            }
            const StateSpec s = state(item["state"], join(item_where, "state"));
            const std::int64_t count = item.contains("count") ? integer(item["count"], join(item_where, "count")) : 1;
            if (count < 1) {
                throw ConfigError(join(item_where, "count"), "count must be at least 1");
            }
            out.systems.insert(out.systems.end(), static_cast<std::size_t>(count), s);
        } else {
            out.systems.push_back(state(item, item_where));
        }
    }
    return out;
}

void apply_source(const json &v, SourceConfig &src) {
    const std::string where = "source";
    if (v.is_string()) {
        src.model = v.get<std::string>();
        return;
    }
    if (!v.is_object()) {
        throw ConfigError(where, "expected a model name or an object");
    }
    reject_unknown(v, where, {"model", "fidelity", "phi", "branches"});
    if (v.contains("model")) {
        src.model = text(v["model"], join(where, "model"));
    }
    if (v.contains("fidelity")) {
        src.fidelity = number(v["fidelity"], join(where, "fidelity"));
    }
    if (v.contains("phi")) {
        const json &phi = v["phi"];
        if (phi.is_string()) {
            // Reuse the angle grammar of singlet_phi(...) descriptors.
            try {
                src.phi = StateSpec::parse("singlet_phi(" + phi.get<std::string>() + ")").phi;
            } catch (const ValidationError &e) {
                throw ConfigError(join(where, "phi"), e.what());
            }
        } else {
            src.phi = number(phi, join(where, "phi"));
        }
    }
    if (v.contains("branches")) {
        const json &b = v["branches"];
        const std::string bw = join(where, "branches");
        if (!b.is_array()) {
            throw ConfigError(bw, "expected an array");
        }
        src.branches.clear();
        for (std::size_t i = 0; i < b.size(); ++i) {
            src.branches.push_back(branch(b[i], index(bw, i)));
        }
    }
}

void apply_stopping(const json &v, StoppingRule &rule) {
    const std::string where = "stopping";
    if (!v.is_object()) {
        throw ConfigError(where, "expected an object");
    }
    reject_unknown(v, where, {"rounds", "target_acceptances", "max_rounds"});
    if (v.contains("rounds")) {
        if (v.contains("target_acceptances")) {
            throw ConfigError(where, "give either rounds or target_acceptances, not both");
        }
        rule = StoppingRule::fixed(integer(v["rounds"], join(where, "rounds")));
        return;
    }
    if (v.contains("target_acceptances")) {
        const std::int64_t target = integer(v["target_acceptances"], join(where, "target_acceptances"));
        const std::int64_t cap =
            v.contains("max_rounds") ? integer(v["max_rounds"], join(where, "max_rounds")) : 1'000'000;
        rule = StoppingRule::until_accepted(target, cap);
        return;
    }
    throw ConfigError(where, "needs rounds or target_acceptances");
}

std::size_t line_of(std::string_view text, std::size_t byte) {
    const std::size_t end = std::min(byte, text.size());
    std::size_t line = 1;
    for (std::size_t i = 0; i < end; ++i) {
        line += text[i] == '\n' ? 1 : 0;
    }
    return line;
}

}  // namespace

ConfigError::ConfigError(const std::string &where, const std::string &what)
    : ValidationError("config error at " + where + ": " + what) {
}

OutputFormat parse_format(std::string_view text) {
    if (text == "json") {
        return OutputFormat::kJson;
    }
    if (text == "csv") {
        return OutputFormat::kCsv;
    }
    throw ValidationError("unknown format '" + std::string(text) + "' (expected json or csv)");
}

std::string_view format_name(OutputFormat f) {
    return f == OutputFormat::kJson ? "json" : "csv";
}

double parse_lambda(std::string_view text) {
    while (!text.empty() && text.front() == ' ') {
        text.remove_prefix(1);
    }
    while (!text.empty() && text.back() == ' ') {
        text.remove_suffix(1);
    }
    if (text == "1/3") {
        return kOneThird;
    }
    double value = 0.0;
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || end != text.data() + text.size() || text.empty()) {
        throw ValidationError("lambda '" + std::string(text) + "' is neither a decimal nor 1/3");
    }
    return value;
}

std::uint64_t parse_seed(const json &value, const std::string &where) {
    if (value.is_number_unsigned()) {
        return value.get<std::uint64_t>();
    }
    if (value.is_number_integer()) {
        const auto v = value.get<std::int64_t>();
        if (v < 0) {
            throw ConfigError(where, "seed must be non-negative");
        }
        return static_cast<std::uint64_t>(v);
    }
    if (value.is_string()) {
        const std::string s = value.get<std::string>();
        std::uint64_t out = 0;
        const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
        if (ec == std::errc() && end == s.data() + s.size() && !s.empty()) {
            return out;
        }
    }
    throw ConfigError(where, "expected an unsigned 64-bit integer");
}

RunConfig config_from_json(const json &doc) {
    if (!doc.is_object()) {
        throw ConfigError("<root>", "expected an object");
    }
    reject_unknown(doc, "", {"protocol", "n", "k", "delta", "lambda", "source", "stopping", "seed", "out_dir", "format",
                             "threads", "conditional_estimates"});
    RunConfig c;
    if (doc.contains("protocol")) {
        try {
            c.protocol = parse_protocol(text(doc["protocol"], "protocol"));
        } catch (const ConfigError &) {
            throw;
        } catch (const ValidationError &e) {
            throw ConfigError("protocol", e.what());
        }
    }
    if (doc.contains("n")) {
        c.n = integer(doc["n"], "n");
    }
    if (doc.contains("k")) {
        c.k = integer(doc["k"], "k");
    }
    if (doc.contains("delta")) {
        c.delta = number(doc["delta"], "delta");
    }
    if (doc.contains("lambda")) {
        const json &l = doc["lambda"];
        try {
            c.lambda = l.is_string() ? parse_lambda(l.get<std::string>()) : number(l, "lambda");
        } catch (const ConfigError &) {
            throw;
        } catch (const ValidationError &e) {
            throw ConfigError("lambda", e.what());
        }
    }
    if (doc.contains("source")) {
        apply_source(doc["source"], c.source);
    }
    if (doc.contains("stopping")) {
        apply_stopping(doc["stopping"], c.stopping);
    }
    if (doc.contains("seed")) {
        c.seed = parse_seed(doc["seed"], "seed");
    }
    if (doc.contains("out_dir")) {
        c.out_dir = text(doc["out_dir"], "out_dir");
    }
    if (doc.contains("format")) {
        try {
            c.format = parse_format(text(doc["format"], "format"));
        } catch (const ConfigError &) {
            throw;
        } catch (const ValidationError &e) {
            throw ConfigError("format", e.what());
        }
    }
    if (doc.contains("threads")) {
        c.threads = static_cast<int>(integer(doc["threads"], "threads"));
    }
    if (doc.contains("conditional_estimates")) {
        if (!doc["conditional_estimates"].is_boolean()) {
            throw ConfigError("conditional_estimates", "expected true or false");
        }
        c.conditional_estimates = doc["conditional_estimates"].get<bool>();
    }
    return c;
}

RunConfig parse_config_text(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text.begin(), text.end());
    } catch (const json::parse_error &e) {
        throw ConfigError("line " + std::to_string(line_of(text, e.byte)), e.what());
    }
    return config_from_json(doc);
}

RunConfig load_config(const std::filesystem::path &path) {
    std::ifstream in(path);
    if (!in) {
        throw ValidationError("cannot open config file " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

nlohmann::ordered_json config_to_json(const RunConfig &c) {
    nlohmann::ordered_json out;
    out["protocol"] = protocol_name(c.protocol);
    out["n"] = c.n;
    out["k"] = c.k;
    out["delta"] = c.delta;
    if (c.lambda == kOneThird) {
        out["lambda"] = "1/3";
    } else {
        out["lambda"] = c.lambda;
    }
    nlohmann::ordered_json src;
    src["model"] = c.source.model;
    src["fidelity"] = c.source.fidelity;
    src["phi"] = c.source.phi;
    if (!c.source.branches.empty()) {
        auto &branches = src["branches"] = nlohmann::ordered_json::array();
        for (const auto &b : c.source.branches) {
            nlohmann::ordered_json jb;
            jb["weight"] = b.weight;
            jb["label"] = b.label;
            auto &systems = jb["systems"] = nlohmann::ordered_json::array();
            for (const auto &s : b.systems) {
                systems.push_back(s.to_string());
            }
            branches.push_back(std::move(jb));
        }
    }
    out["source"] = std::move(src);
    nlohmann::ordered_json stop;
    if (c.stopping.target_acceptances) {
        stop["target_acceptances"] = *c.stopping.target_acceptances;
        stop["max_rounds"] = c.stopping.max_rounds;
    } else {
        stop["rounds"] = c.stopping.max_rounds;
    }
    out["stopping"] = std::move(stop);
    out["seed"] = std::to_string(c.seed);
    out["out_dir"] = c.out_dir;
    out["format"] = format_name(c.format);
    out["threads"] = c.threads;
    out["conditional_estimates"] = c.conditional_estimates;
    return out;
}

void validate(const RunConfig &c) {
    CertificateQuery q{c.protocol, c.n, c.k, c.delta, c.lambda};
    try {
        q.validate();
    } catch (const ValidationError &e) {
        throw ConfigError("n/k/delta/lambda", e.what());
    }
    if (c.threads < 1) {
        throw ConfigError("threads", "must be at least 1");
    }
    const StoppingRule &s = c.stopping;
    if (s.max_rounds < 1) {
        throw ConfigError(s.target_acceptances ? "stopping.max_rounds" : "stopping.rounds", "must be at least 1");
    }
    if (s.target_acceptances && *s.target_acceptances < 1) {
        throw ConfigError("stopping.target_acceptances", "must be at least 1");
    }
    const std::string &model = c.source.model;
    if (model != "honest" && model != "rho1" && model != "rho2" && model != "custom") {
        throw ConfigError("source.model", "unknown model '" + model + "' (expected honest, rho1, rho2 or custom)");
    }
    if (!(c.source.fidelity >= 0.25 && c.source.fidelity <= 1.0)) {
        throw ConfigError("source.fidelity", "must lie in [0.25, 1]");
    }
    if (!std::isfinite(c.source.phi)) {
        throw ConfigError("source.phi", "must be finite");
    }
    if (model == "custom") {
        if (c.source.branches.empty()) {
            throw ConfigError("source.branches", "custom source needs at least one branch");
        }
        const auto want = static_cast<std::size_t>(c.n + 1);
        for (std::size_t i = 0; i < c.source.branches.size(); ++i) {
            if (c.source.branches[i].systems.size() != want) {
                throw ConfigError(index("source.branches", i) + ".systems",
                                  "has " + std::to_string(c.source.branches[i].systems.size()) +
                                      " systems; n + 1 = " + std::to_string(want) + " required");
            }
        }
        try {
            build_mixture(c.source.branches);
        } catch (const ValidationError &e) {
            throw ConfigError("source.branches", e.what());
        }
    } else if (!c.source.branches.empty()) {
        throw ConfigError("source.branches", "only allowed with model custom");
    }
}

HomogeneousStrategy strategy_for(double lambda) {
    if (lambda == kOneThird) {
        return build_singlet_strategy();
    }
    return build_homogeneous_strategy(singlet(), lambda);
}

ProductSequenceMixture build_source(const RunConfig &c) {
    const NoiseSpec noise{c.source.fidelity};
    const std::int64_t systems = c.n + 1;
    if (c.source.model == "honest") {
        return honest_iid(systems, noise);
    }
    if (c.source.model == "rho1") {
        return rho1(c.n, noise);
    }
    if (c.source.model == "rho2") {
        return rho2(c.n, c.source.phi, noise);
    }
    return build_mixture(c.source.branches);
}

}  // namespace qsv::app
