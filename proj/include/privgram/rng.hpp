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
#include <cstdint>
#include <random>

#include "privgram/errors.hpp"

namespace privgram {

// SplitMix64 finalizer; full-avalanche mix of a 64-bit value.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Child seed for (master_seed, stream_id).  The combine is asymmetric so
// equal master and stream values do not collapse to one seed.
inline std::uint64_t derive_seed(std::uint64_t master_seed,
                                 std::uint64_t stream_id) {
  return mix64(master_seed ^ mix64(stream_id ^ 0x5851f42d4c957f2dULL));
}

// Deterministic random stream: a mersenne-twister engine seeded from a
// (master_seed, stream_id) pair, plus the scalar distribution transforms the
// library needs.  All transforms are written out explicitly (polar method,
// inverse CDF, Marsaglia-Tsang) so sequences do not depend on the standard
// library's unspecified distribution algorithms.  Single-owner: derive one
// stream per trial or mechanism instead of sharing.
class RngStream {
 public:
  RngStream(std::uint64_t master_seed, std::uint64_t stream_id)
      : RngStream(derive_seed(master_seed, stream_id)) {}

  explicit RngStream(std::uint64_t seed) : seed_(seed), engine_(seed) {}

  // The derived seed this stream runs on; recorded in estimate metadata.
  std::uint64_t seed() const { return seed_; }

  RngStream child(std::uint64_t stream_id) const {
    return RngStream(seed_, stream_id);
  }

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return (engine_() >> 11) * 0x1.0p-53; }

  // Uniform on (0, 1).
  double uniform_pos() {
    double u;
    do {
      u = uniform();
    } while (u == 0.0);
    return u;
  }

  // Standard normal via the Marsaglia polar method, keeping the spare value.
  double gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u, v, s;
    do {
      u = 2.0 * uniform() - 1.0;
      v = 2.0 * uniform() - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double scale = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * scale;
    has_spare_ = true;
    return u * scale;
  }

  double gaussian(double sigma) { return sigma * gaussian(); }

  // Laplace with density (1/2b) exp(-|x|/b) via inverse CDF.
  double laplace(double scale) {
    if (!(scale > 0.0)) throw InputError("laplace: scale must be positive");
    double u;
    do {
      u = uniform() - 0.5;
    } while (u <= -0.5);
    const double magnitude = -scale * std::log1p(-2.0 * std::abs(u));
    return u < 0.0 ? -magnitude : magnitude;
  }

  // Gamma(shape, scale) via Marsaglia-Tsang, with the boost step for
  // shape < 1.
  double gamma(double shape, double scale) {
    if (!(shape > 0.0) || !(scale > 0.0)) {
      throw InputError("gamma: shape and scale must be positive");
    }
    if (shape < 1.0) {
      const double boost = std::pow(uniform_pos(), 1.0 / shape);
      return gamma(shape + 1.0, scale) * boost;
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
      double x, v;
      do {
        x = gaussian();
        v = 1.0 + c * x;
      } while (v <= 0.0);
      v = v * v * v;
      const double u = uniform_pos();
      if (u < 1.0 - 0.0331 * x * x * x * x) return d * v * scale;
      if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) {
        return d * v * scale;
      }
    }
  }

  double chi_square(double dof) {
    if (!(dof > 0.0)) throw InputError("chi_square: dof must be positive");
    return gamma(0.5 * dof, 2.0);
  }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

inline double sample_laplace(RngStream& rng, double scale) {
  return rng.laplace(scale);
}

}  // namespace privgram
