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

#include <cmath>

#include "privgram/errors.hpp"

namespace privgram {

// An (epsilon, delta) differential privacy budget.  Delta must lie strictly
// below 1/e, the range every calibration formula in this library assumes.
struct PrivacyBudget {
  PrivacyBudget(double epsilon_in, double delta_in)
      : epsilon(epsilon_in), delta(delta_in) {
    if (!(std::isfinite(epsilon) && epsilon > 0.0)) {
      throw InputError("PrivacyBudget: epsilon must be positive and finite");
    }
    if (!(std::isfinite(delta) && delta > 0.0 && delta < std::exp(-1.0))) {
      throw InputError("PrivacyBudget: delta must lie in (0, 1/e)");
    }
  }

  double epsilon;
  double delta;
};

}  // namespace privgram
