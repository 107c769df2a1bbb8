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

#ifndef QSV_APP_CONFIG_H
#define QSV_APP_CONFIG_H

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "qsv/certbank.h"
#include "qsv/errors.h"
#include "qsv/simulation.h"
#include "qsv/sources.h"
#include "qsv/strategy.h"

namespace qsv::app {

/// Config problem tied to a location: a dotted field path such as
/// "source.branches[1].systems[0]", or "line 4" for syntax errors.
struct ConfigError : ValidationError {
    ConfigError(const std::string &where, const std::string &what);
};

enum class OutputFormat { kJson, kCsv };

OutputFormat parse_format(std::string_view text);
std::string_view format_name(OutputFormat f);

struct SourceConfig {
    /// honest | rho1 | rho2 | custom
    std::string model = "honest";
    /// Per-copy fidelity of the honest source, or of the prepared singlets
    /// (and the odd copy) in rho1 / rho2.
    double fidelity = 1.0;
    double phi = 3.141592653589793;
    /// custom only; each branch lists n + 1 systems.
    std::vector<BranchSpec> branches;
};

struct RunConfig {
    Protocol protocol = Protocol::kDqsv;
    std::int64_t n = 10;
    std::int64_t k = 0;
    double delta = 0.05;
    double lambda = 1.0 / 3.0;
    SourceConfig source;
    StoppingRule stopping = StoppingRule::fixed(1000);
    std::uint64_t seed = 0;
    std::string out_dir = "qsv-out";
    OutputFormat format = OutputFormat::kJson;
    int threads = 1;
    bool conditional_estimates = true;
};

/// Decimal, or the literal "1/3" which maps to the double nearest 1/3.
double parse_lambda(std::string_view text);

/// Accepts a non-negative integer or a string holding one; JSON numbers above
/// 2^53 lose precision, so large seeds are best quoted.
std::uint64_t parse_seed(const nlohmann::json &value, const std::string &where);

RunConfig config_from_json(const nlohmann::json &doc);
RunConfig load_config(const std::filesystem::path &path);
/// Parses text, mapping syntax errors to line numbers.
RunConfig parse_config_text(std::string_view text);

nlohmann::ordered_json config_to_json(const RunConfig &config);

/// Throws ConfigError on any precondition the engine would reject.
void validate(const RunConfig &config);

/// The Pauli singlet strategy for lambda = 1/3, else the two-test
/// homogeneous strategy with that lambda.
HomogeneousStrategy strategy_for(double lambda);

ProductSequenceMixture build_source(const RunConfig &config);

}  // namespace qsv::app

#endif
