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

#ifndef QSV_APP_REPORT_H
#define QSV_APP_REPORT_H

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "qsv/certbank.h"
#include "qsv/oracle.h"
#include "qsv/simulation.h"

namespace qsv::app {

using ordered_json = nlohmann::ordered_json;

/// Current UTC time as 2026-01-31T12:00:00Z.
std::string timestamp_utc();

/// Two comment lines opening every CSV file:
///   # schema: <name>/<version>
///   # generated_at: <timestamp>
/// The timestamp line is the only content that differs between identical runs.
void write_csv_preamble(std::ostream &out, std::string_view schema);

/// Rows of text cells joined by commas; cells never need quoting here.
void write_csv_row(std::ostream &out, const std::vector<std::string> &cells);

std::string cell(double x);
std::string cell(std::int64_t x);
std::string cell(const std::optional<double> &x);

/// JSON documents open with "schema" and "generated_at" keys, each on its
/// own line once pretty-printed.
ordered_json json_preamble(std::string_view schema);

/// Writes `doc` with two-space indentation and a trailing newline.
void write_json(std::ostream &out, const ordered_json &doc);

/// FNV-1a over the setting indices and pass bits of one round, as 16 hex digits.
std::string settings_digest(const RunOutcome &o);

ordered_json certificate_json(const Certificate &c, const std::optional<DqsvIntermediates> &intermediates);

ordered_json mean_json(const MeanEstimate &m);

/// Summary plus the certificates evaluated at delta = p_hat and at the lower
/// Clopper-Pearson edge.
ordered_json summary_json(const ExperimentSummary &s, double delta_config, double lambda);

void write_summary_csv(std::ostream &out, const ExperimentSummary &s, double lambda);

void write_rounds_csv(std::ostream &out, std::span<const RunOutcome> outcomes, std::int64_t k);

ordered_json soundness_json(const SoundnessReport &r);

/// Opens `dir / name` for writing, creating `dir` as needed.
std::ofstream open_output(const std::filesystem::path &dir, const std::string &name);

/// Certificate at delta, or nullopt when delta is outside (0, 1] or the
/// query is otherwise invalid (k >= n).
std::optional<double> certificate_at(Protocol p, std::int64_t n, std::int64_t k, double delta, double lambda);

}  // namespace qsv::app

#endif
