// Copyright 2026 The privgram Authors
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

#pragma once

#include <cstdint>
#include <map>
#include <sstream>
#include <string>

#include "privgram/sym_matrix.hpp"

namespace privgram {

// Output of one mechanism run: the released matrix plus everything needed to
// interpret it (mechanism id, the calibration constants actually used, which
// branch ran for the adaptive mechanisms, the stream seed, and whether the
// matrix passed the Cholesky PD test).
struct GramEstimate {
  SymMatrix matrix;
  std::string mechanism;
  std::map<std::string, double> calibration;
  std::string branch;
  std::uint64_t seed = 0;
  bool is_pd = false;
};

// Calibration map flattened to "key=value" pairs joined with ';', for log and
// CSV columns.
inline std::string flatten_calibration(
    const std::map<std::string, double>& calibration) {
  std::ostringstream out;
  out.precision(12);
  bool first = true;
  for (const auto& [key, value] : calibration) {
    if (!first) out << ';';
    out << key << '=' << value;
    first = false;
  }
  return out.str();
}

}  // namespace privgram
