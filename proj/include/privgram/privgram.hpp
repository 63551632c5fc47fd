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

// Convenience umbrella for the whole library.

#pragma once

#include "privgram/budget.hpp"
#include "privgram/calibration.hpp"
#include "privgram/dataset.hpp"
#include "privgram/errors.hpp"
#include "privgram/estimate.hpp"
#include "privgram/experiment.hpp"
#include "privgram/io.hpp"
#include "privgram/linalg.hpp"
#include "privgram/mechanisms.hpp"
#include "privgram/regress.hpp"
#include "privgram/rng.hpp"
#include "privgram/sampling.hpp"
#include "privgram/statcheck.hpp"
#include "privgram/sym_matrix.hpp"
