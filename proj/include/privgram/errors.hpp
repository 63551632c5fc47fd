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

#include <stdexcept>
#include <string>

namespace privgram {

// Caller passed invalid arguments or malformed external input.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An internal numerical computation broke down.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A mechanism cannot be calibrated for the requested budget and data.
class CalibrationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A linear system was too close to singular to solve reliably.  Carries the
// smallest Cholesky pivot encountered so callers can report how degenerate
// the system was.
class SingularSystemError : public NumericError {
 public:
  SingularSystemError(const std::string& what, double min_pivot)
      : NumericError(what), min_pivot_(min_pivot) {}

  double min_pivot() const { return min_pivot_; }

 private:
  double min_pivot_;
};

}  // namespace privgram
