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

#ifndef QSV_ERRORS_H
#define QSV_ERRORS_H

#include <stdexcept>
#include <string>

namespace qsv {

/// Raised when an input violates a documented precondition (bad dimension,
/// non-normalized state, parameter out of range, malformed config).
struct ValidationError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Raised when an internal consistency check fails: a computed quantity left
/// its guaranteed range or an iteration that must converge did not.
struct NumericalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Raised by the exact oracle when a request exceeds its combinatorial budget.
struct BudgetError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Writes a one-line warning to stderr. Used for tolerated-but-noteworthy
/// numerical clamps.
void warn(const std::string &message);

}  // namespace qsv

#endif
