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

#ifndef QSV_FORMAT_H
#define QSV_FORMAT_H

#include <string>

namespace qsv {

/// Shortest decimal string that round-trips to the same double, independent
/// of locale ("nan" / "inf" / "-inf" for non-finite values).
std::string format_double(double x);

}  // namespace qsv

#endif
