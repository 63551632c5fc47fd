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

#include "privgram/budget.hpp"
#include "privgram/errors.hpp"

namespace privgram {

// Ridge width w for the plain sketch mechanism:
//   w = sqrt(4B^2 (sqrt(2 r ln(4/d)) + ln(4/d)) / eps).
inline double jl_width(double row_bound, const PrivacyBudget& budget, long r) {
  if (r < 1) throw InputError("jl_width: r must be >= 1");
  if (!(row_bound >= 0.0)) throw InputError("jl_width: row bound must be >= 0");
  const double log4d = std::log(4.0 / budget.delta);
  const double b2 = row_bound * row_bound;
  return std::sqrt(4.0 * b2 *
                   (std::sqrt(2.0 * static_cast<double>(r) * log4d) + log4d) /
                   budget.epsilon);
}

// Ridge width used by the adaptive sketch before the singular-value credit:
//   w = sqrt((8B^2/eps)(sqrt(2 r0 ln(8/d)) + ln(8/d))).
// The larger constants pay for the extra private singular-value release.
inline double jl_width_adaptive(double row_bound, const PrivacyBudget& budget,
                                long r0) {
  if (r0 < 1) throw InputError("jl_width_adaptive: r0 must be >= 1");
  if (!(row_bound >= 0.0)) {
    throw InputError("jl_width_adaptive: row bound must be >= 0");
  }
  const double log8d = std::log(8.0 / budget.delta);
  const double b2 = row_bound * row_bound;
  return std::sqrt(8.0 * b2 / budget.epsilon *
                   (std::sqrt(2.0 * static_cast<double>(r0) * log8d) + log8d));
}

// Downward shift applied to the released least singular value so the estimate
// errs on the safe side: 2B^2 ln(2/d) / eps.
inline double sv_shift(double row_bound, const PrivacyBudget& budget) {
  const double b2 = row_bound * row_bound;
  return 2.0 * b2 * std::log(2.0 / budget.delta) / budget.epsilon;
}

// Scale of the Laplace noise on the released singular value: 2B^2 / eps.
inline double sv_noise_scale(double row_bound, const PrivacyBudget& budget) {
  const double b2 = row_bound * row_bound;
  return 2.0 * b2 / budget.epsilon;
}

namespace internal {

// Largest integer c with (8B^2/eps)(sqrt(2 c L) + L) <= s, L = ln(8/d).
// Solving the quadratic gives c = floor(T^2 / 2L) with T = s*eps/(8B^2) - L.
inline long budget_saturating_count(double row_bound,
                                    const PrivacyBudget& budget, double s) {
  const double log8d = std::log(8.0 / budget.delta);
  const double b2 = row_bound * row_bound;
  const double t = s * budget.epsilon / (8.0 * b2) - log8d;
  if (!(t > 0.0)) {
    throw NumericError(
        "budget_saturating_count: credit too small for any row count");
  }
  return static_cast<long>(std::floor(t * t / (2.0 * log8d)));
}

}  // namespace internal

// Largest sketch row count r* whose width requirement fits inside the
// singular-value credit s.
inline long max_sketch_rows(double row_bound, const PrivacyBudget& budget,
                            double s) {
  return internal::budget_saturating_count(row_bound, budget, s);
}

// Largest Wishart degrees of freedom k* whose regularizer requirement fits
// inside the credit s; the constraint collapses to the same quadratic as
// max_sketch_rows.
inline long max_wishart_dof(double row_bound, const PrivacyBudget& budget,
                            double s) {
  return internal::budget_saturating_count(row_bound, budget, s);
}

// Degrees of freedom for the additive Wishart mechanism:
//   k = floor(d + (14/eps^2) * 2 ln(4/d)),  valid for eps in (0, 1].
inline long wishart_dof(int d, const PrivacyBudget& budget) {
  if (d < 1) throw InputError("wishart_dof: dimension must be >= 1");
  if (budget.epsilon > 1.0) {
    throw InputError("wishart_dof: epsilon must be <= 1 for this mechanism");
  }
  const double log4d = std::log(4.0 / budget.delta);
  const double k = std::floor(
      d + 14.0 / (budget.epsilon * budget.epsilon) * 2.0 * log4d);
  return static_cast<long>(k);
}

// Regularizer for the inverse-Wishart posterior mechanism:
//   psi = (2B^2/eps)(2 sqrt(2 dof ln(4/d)) + 2 ln(4/d)).
inline double inv_wishart_psi(double row_bound, const PrivacyBudget& budget,
                              long dof) {
  if (dof < 1) throw InputError("inv_wishart_psi: dof must be >= 1");
  if (!(row_bound >= 0.0)) {
    throw InputError("inv_wishart_psi: row bound must be >= 0");
  }
  const double log4d = std::log(4.0 / budget.delta);
  const double b2 = row_bound * row_bound;
  return 2.0 * b2 / budget.epsilon *
         (2.0 * std::sqrt(2.0 * static_cast<double>(dof) * log4d) +
          2.0 * log4d);
}

// Regularizer for the adaptive inverse-Wishart mechanism before the credit:
//   psi = (4B^2/eps)(2 sqrt(2 k0 ln(8/d)) + 2 ln(8/d)).
inline double inv_wishart_psi_adaptive(double row_bound,
                                       const PrivacyBudget& budget, long k0) {
  if (k0 < 1) throw InputError("inv_wishart_psi_adaptive: k0 must be >= 1");
  if (!(row_bound >= 0.0)) {
    throw InputError("inv_wishart_psi_adaptive: row bound must be >= 0");
  }
  const double log8d = std::log(8.0 / budget.delta);
  const double b2 = row_bound * row_bound;
  return 4.0 * b2 / budget.epsilon *
         (2.0 * std::sqrt(2.0 * static_cast<double>(k0) * log8d) +
          2.0 * log8d);
}

enum class AgVarianceConvention { kEpsSquared, kEpsLinear };

// Noise level for entrywise Gaussian noise on the Gram matrix, sensitivity
// B^2.  kEpsSquared is the standard Gaussian-mechanism calibration
// sigma^2 = 2 B^4 ln(2/d) / eps^2; kEpsLinear divides by eps once instead.
inline double analyze_gauss_sigma(double row_bound,
                                  const PrivacyBudget& budget,
                                  AgVarianceConvention convention) {
  const double b2 = row_bound * row_bound;
  const double variance_eps1 =
      2.0 * b2 * b2 * std::log(2.0 / budget.delta) / budget.epsilon;
  switch (convention) {
    case AgVarianceConvention::kEpsSquared:
      return std::sqrt(variance_eps1 / budget.epsilon);
    case AgVarianceConvention::kEpsLinear:
      return std::sqrt(variance_eps1);
  }
  throw InputError("analyze_gauss_sigma: unknown convention");
}

// Noise level for Gaussian noise added to the inverse Gram matrix:
//   sigma^2 = 8 ln(2/d) / (rho^2 eps^2).
inline double gauss_inverse_sigma(const PrivacyBudget& budget, double rho) {
  if (!(rho > 0.0)) throw InputError("gauss_inverse_sigma: rho must be > 0");
  return std::sqrt(8.0 * std::log(2.0 / budget.delta)) /
         (rho * budget.epsilon);
}

}  // namespace privgram
