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

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "privgram/errors.hpp"
#include "privgram/linalg.hpp"
#include "privgram/rng.hpp"
#include "privgram/sampling.hpp"
#include "privgram/sym_matrix.hpp"

// Monte Carlo verification of the concentration inequalities the mechanism
// calibrations rest on, plus exact-identity regression checks for the linear
// algebra shortcuts.  Each check returns a CheckReport whose single pass
// criterion is the binomial three-sigma rule below; no check applies a
// different or hidden threshold.

namespace privgram {

struct CheckReport {
  std::string check_id;
  long trials = 0;
  long violations = 0;
  // Theoretical probability of a per-trial violation (0 for exact identities).
  double bound = 0.0;
  // Three-sigma binomial margin: 3 * sqrt(bound * (1 - bound) / trials).
  double slack = 0.0;
  bool passed = false;
  // Per-check summary statistics (max observed errors, sub-counts, recorded
  // constants).  Keys are stable so the CLI can emit them verbatim.
  std::map<std::string, double> details;
};

namespace internal {

inline double binomial_slack(double bound, long trials) {
  if (trials <= 0) return 0.0;
  return 3.0 * std::sqrt(bound * (1.0 - bound) / static_cast<double>(trials));
}

inline CheckReport finish_report(std::string check_id, long trials,
                                 long violations, double bound,
                                 std::map<std::string, double> details) {
  CheckReport report;
  report.check_id = std::move(check_id);
  report.trials = trials;
  report.violations = violations;
  report.bound = bound;
  report.slack = binomial_slack(bound, trials);
  report.passed = static_cast<double>(violations) <=
                  (bound + report.slack) * static_cast<double>(trials);
  report.details = std::move(details);
  return report;
}

inline Eigen::VectorXd random_unit_vector(RngStream& rng, int dim) {
  Eigen::VectorXd v(dim);
  double norm = 0.0;
  do {
    for (int i = 0; i < dim; ++i) v(i) = rng.gaussian();
    norm = v.norm();
  } while (norm < 1e-12);
  return v / norm;
}

inline Eigen::MatrixXd random_orthogonal(RngStream& rng, int dim) {
  Eigen::MatrixXd g(dim, dim);
  for (int i = 0; i < dim; ++i) {
    for (int j = 0; j < dim; ++j) g(i, j) = rng.gaussian();
  }
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(g);
  return qr.householderQ();
}

// Diagonal entries log-uniform in [0.1, 10], so any matrix assembled from
// them has condition number at most 100.
inline Eigen::VectorXd log_uniform_spectrum(RngStream& rng, int dim) {
  Eigen::VectorXd d(dim);
  for (int i = 0; i < dim; ++i) {
    d(i) = std::pow(10.0, 2.0 * rng.uniform() - 1.0);
  }
  return d;
}

inline double relative_error(double value, double reference) {
  const double denom = std::max(std::abs(value), std::abs(reference));
  if (denom == 0.0) return 0.0;
  return std::abs(value - reference) / denom;
}

// |v'v - v' ((1/(r-d+1)) X'X)^{-1} v|, the deviation the inverse projection
// bound controls (callers compare against bounds stated for unit v).
inline double inverse_projection_deviation(const Eigen::MatrixXd& x,
                                           const Eigen::VectorXd& v, long r,
                                           int d) {
  const double scale = static_cast<double>(r - d + 1);
  const Eigen::MatrixXd gram = x.transpose() * x / scale;
  const Eigen::VectorXd z = gram.ldlt().solve(v);
  return std::abs(v.squaredNorm() - v.dot(z));
}

}  // namespace internal

// Determinant lemma det(A + uv') = det(A) (1 + v'A^{-1}u) and the rank-one
// inverse update (A + uv')^{-1} = A^{-1} - A^{-1}uv'A^{-1} / (1 + v'A^{-1}u),
// both exact, verified to relative error 1e-9 on well-conditioned random A.
// Updates with |1 + v'A^{-1}u| < 0.1 are redrawn: the identities degenerate
// there and the redraw count is reported instead.
inline CheckReport check_sherman_morrison(RngStream& rng, int dim,
                                          long trials) {
  if (dim < 2) throw InputError("check_sherman_morrison: dim must be >= 2");
  if (trials < 1) throw InputError("check_sherman_morrison: trials must be >= 1");

  constexpr double kRelTol = 1e-9;
  long violations = 0;
  long redraws = 0;
  double max_det_err = 0.0;
  double max_inv_err = 0.0;

  for (long trial = 0; trial < trials; ++trial) {
    const Eigen::MatrixXd q1 = internal::random_orthogonal(rng, dim);
    const Eigen::MatrixXd q2 = internal::random_orthogonal(rng, dim);
    const Eigen::VectorXd spectrum = internal::log_uniform_spectrum(rng, dim);
    const Eigen::MatrixXd a = q1 * spectrum.asDiagonal() * q2.transpose();
    const Eigen::MatrixXd a_inv = a.partialPivLu().inverse();

    Eigen::VectorXd u(dim), v(dim);
    double denom = 0.0;
    do {
      for (int i = 0; i < dim; ++i) u(i) = rng.gaussian();
      for (int i = 0; i < dim; ++i) v(i) = rng.gaussian();
      denom = 1.0 + v.dot(a_inv * u);
      if (std::abs(denom) < 0.1) ++redraws;
    } while (std::abs(denom) < 0.1);

    const Eigen::MatrixXd updated = a + u * v.transpose();
    const double det_direct = updated.determinant();
    const double det_lemma = a.determinant() * denom;
    const double det_err = internal::relative_error(det_direct, det_lemma);

    const Eigen::MatrixXd inv_direct = updated.partialPivLu().inverse();
    const Eigen::MatrixXd inv_update =
        a_inv - (a_inv * u) * (v.transpose() * a_inv) / denom;
    const double inv_err =
        (inv_direct - inv_update).norm() /
        std::max(inv_direct.norm(), inv_update.norm());

    max_det_err = std::max(max_det_err, det_err);
    max_inv_err = std::max(max_inv_err, inv_err);
    if (det_err > kRelTol || inv_err > kRelTol) ++violations;
  }

  return internal::finish_report(
      "sherman-morrison", trials, violations, 0.0,
      {{"max_det_rel_err", max_det_err},
       {"max_inverse_rel_err", max_inv_err},
       {"redraws", static_cast<double>(redraws)}});
}

// Two-sided chi-squared tail: a sum of k squared standard normals leaves
// [(sqrt(k) - sqrt(delta))^2, (sqrt(k) + sqrt(delta))^2] with probability at
// most exp(-delta/2) per side.  The per-trial sum is accumulated literally
// from k Gaussian draws rather than through the gamma sampler, so the check
// exercises the inequality and not the sampler shortcut.
inline CheckReport check_chi2_tail(RngStream& rng, long k, double delta_param,
                                   long trials) {
  if (k < 1) throw InputError("check_chi2_tail: k must be >= 1");
  if (!(delta_param > 0.0) || !(delta_param < static_cast<double>(k))) {
    throw InputError("check_chi2_tail: delta must satisfy 0 < delta < k");
  }
  if (trials < 1) throw InputError("check_chi2_tail: trials must be >= 1");

  const double root_k = std::sqrt(static_cast<double>(k));
  const double root_delta = std::sqrt(delta_param);
  const double upper_edge = (root_k + root_delta) * (root_k + root_delta);
  const double lower_edge = (root_k - root_delta) * (root_k - root_delta);
  const double bound = std::exp(-delta_param / 2.0);

  long upper_violations = 0;
  long lower_violations = 0;
  for (long trial = 0; trial < trials; ++trial) {
    double sum = 0.0;
    for (long i = 0; i < k; ++i) {
      const double g = rng.gaussian();
      sum += g * g;
    }
    if (sum > upper_edge) ++upper_violations;
    if (sum < lower_edge) ++lower_violations;
  }

  return internal::finish_report(
      "chi2-tail", trials, std::max(upper_violations, lower_violations), bound,
      {{"upper_violations", static_cast<double>(upper_violations)},
       {"lower_violations", static_cast<double>(lower_violations)},
       {"upper_edge", upper_edge},
       {"lower_edge", lower_edge}});
}

// Projection concentration for an r x d standard Gaussian X and a unit v:
// forward form |v'((1/r)X'X - I)v| <= 2 sqrt(2 ln(2/beta)/r) + 2 ln(2/beta)/r,
// inverse form |v'(I - ((1/(r-d+1))X'X)^{-1})v| <= (2t - t^2)/(1 - t)^2 with
// t = sqrt(2 ln(2/beta)/(r-d+1)), each failing with probability at most beta.
// A fresh X and fresh unit v are drawn per trial; the report counts both
// forms and passes only if each empirical rate clears the binomial rule.
inline CheckReport check_jl_lemma(RngStream& rng, long r, int d,
                                  double beta_param, long trials) {
  if (r < 1) throw InputError("check_jl_lemma: r must be >= 1");
  if (d < 1) throw InputError("check_jl_lemma: d must be >= 1");
  if (!(beta_param > 0.0) || !(beta_param < 1.0)) {
    throw InputError("check_jl_lemma: beta must lie in (0, 1)");
  }
  if (trials < 1) throw InputError("check_jl_lemma: trials must be >= 1");
  if (r < d) {
    throw InputError("check_jl_lemma: inverse form needs r >= d");
  }
  const double log_term = 2.0 * std::log(2.0 / beta_param);
  const double t = std::sqrt(log_term / static_cast<double>(r - d + 1));
  if (t >= 1.0) {
    throw InputError(
        "check_jl_lemma: inverse bound needs sqrt(2 ln(2/beta)/(r-d+1)) < 1");
  }

  const double forward_bound =
      2.0 * std::sqrt(log_term / static_cast<double>(r)) +
      log_term / static_cast<double>(r);
  const double inverse_bound = (2.0 * t - t * t) / ((1.0 - t) * (1.0 - t));

  long forward_violations = 0;
  long inverse_violations = 0;
  for (long trial = 0; trial < trials; ++trial) {
    Eigen::MatrixXd x(r, d);
    for (long i = 0; i < r; ++i) {
      for (int j = 0; j < d; ++j) x(i, j) = rng.gaussian();
    }
    const Eigen::VectorXd v = internal::random_unit_vector(rng, d);

    const double forward_dev =
        std::abs((x * v).squaredNorm() / static_cast<double>(r) - 1.0);
    if (forward_dev > forward_bound) ++forward_violations;

    const double inverse_dev =
        internal::inverse_projection_deviation(x, v, r, d);
    if (inverse_dev > inverse_bound) ++inverse_violations;
  }

  return internal::finish_report(
      "jl-lemma", trials, std::max(forward_violations, inverse_violations),
      beta_param,
      {{"forward_violations", static_cast<double>(forward_violations)},
       {"inverse_violations", static_cast<double>(inverse_violations)},
       {"forward_bound", forward_bound},
       {"inverse_bound", inverse_bound}});
}

// Eigenvalue sandwich for a Wishart draw X ~ W_d(V, m): every eigenvalue
// satisfies sigma_j(X) in (sqrt(m) +/- (sqrt(d) + sqrt(2 ln(2/delta))))^2
// sigma_j(V), jointly with probability at least 1 - delta.  V is a fixed
// random positive-definite matrix Q D Q' with D log-uniform in [0.1, 10],
// drawn once from the stream before the trials, then multiplied by
// scale_multiplier (both sides of the sandwich scale with it, so the
// violation pattern under a fixed seed is scale-invariant).
inline CheckReport check_wishart_eigen_bounds(RngStream& rng, int d, long m,
                                              double delta_param, long trials,
                                              double scale_multiplier = 1.0) {
  if (d < 1) throw InputError("check_wishart_eigen_bounds: d must be >= 1");
  if (!(delta_param > 0.0) || !(delta_param < 1.0)) {
    throw InputError("check_wishart_eigen_bounds: delta must lie in (0, 1)");
  }
  if (trials < 1) {
    throw InputError("check_wishart_eigen_bounds: trials must be >= 1");
  }
  if (!(scale_multiplier > 0.0)) {
    throw InputError("check_wishart_eigen_bounds: scale multiplier must be > 0");
  }
  const double edge =
      std::sqrt(static_cast<double>(d)) +
      std::sqrt(2.0 * std::log(2.0 / delta_param));
  const double root_m = std::sqrt(static_cast<double>(m));
  if (!(root_m > edge)) {
    throw InputError(
        "check_wishart_eigen_bounds: needs sqrt(m) > sqrt(d) + "
        "sqrt(2 ln(2/delta))");
  }

  const Eigen::MatrixXd q = internal::random_orthogonal(rng, d);
  const Eigen::VectorXd spectrum =
      internal::log_uniform_spectrum(rng, d) * scale_multiplier;
  const Eigen::MatrixXd v_dense =
      q * spectrum.asDiagonal() * q.transpose();
  const WishartSpec spec(SymMatrix::from_dense(v_dense), m);

  Eigen::VectorXd v_eigs = spectrum;
  std::sort(v_eigs.data(), v_eigs.data() + d);

  const double lower_factor = (root_m - edge) * (root_m - edge);
  const double upper_factor = (root_m + edge) * (root_m + edge);

  long violations = 0;
  for (long trial = 0; trial < trials; ++trial) {
    const SymMatrix draw = sample_wishart(rng, spec);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(draw.dense());
    const Eigen::VectorXd x_eigs = solver.eigenvalues();
    bool ok = true;
    for (int j = 0; j < d; ++j) {
      const double lo = lower_factor * v_eigs(j);
      const double hi = upper_factor * v_eigs(j);
      if (x_eigs(j) < lo || x_eigs(j) > hi) {
        ok = false;
        break;
      }
    }
    if (!ok) ++violations;
  }

  return internal::finish_report(
      "wishart-eigen", trials, violations, delta_param,
      {{"edge", edge},
       {"lower_factor", lower_factor},
       {"upper_factor", upper_factor}});
}

// Additive-Wishart regression utility.  A fixed design X (n x p) is scaled so
// sigma_min(X'X) = c_construct * sigma^2 (sqrt(k) + sqrt(p) +
// sqrt(2 ln(4/nu)))^2, y is a fixed Gaussian vector, and per trial a draw
// W ~ W_{p+1}(sigma^2 I, k) is split into its leading p x p block N and the
// off-diagonal column n.  The perturbed solution
// bt = (X'X + N)^{-1} (X'y + n) must satisfy
//   ||bt - bh|| <= ||bh|| / (C-1)
//                 + sigma^2 (C-2) / ((C-1) sigma_min(X'X))
//                   * min{ 2 sqrt(2 k p ln(4p/nu)),
//                          (sqrt(k) + sqrt(p) + sqrt(2 ln(4/nu)))^2 }
// with probability at least 1 - nu over the draw of W.
inline CheckReport check_wishart_utility_bound(RngStream& rng, int p, long k,
                                               double sigma, double nu_param,
                                               long trials,
                                               double c_construct = 4.0) {
  if (p < 1) throw InputError("check_wishart_utility_bound: p must be >= 1");
  if (k < 1) throw InputError("check_wishart_utility_bound: k must be >= 1");
  if (!(sigma >= 0.0)) {
    throw InputError("check_wishart_utility_bound: sigma must be >= 0");
  }
  if (!(nu_param > 0.0) || !(nu_param < 1.0)) {
    throw InputError("check_wishart_utility_bound: nu must lie in (0, 1)");
  }
  if (trials < 1) {
    throw InputError("check_wishart_utility_bound: trials must be >= 1");
  }
  if (!(c_construct >= 2.0)) {
    throw InputError("check_wishart_utility_bound: construction needs C >= 2");
  }

  const double root_term = std::sqrt(static_cast<double>(k)) +
                           std::sqrt(static_cast<double>(p)) +
                           std::sqrt(2.0 * std::log(4.0 / nu_param));
  const double edge_sq = root_term * root_term;
  const double sigma_min_target = c_construct * sigma * sigma * edge_sq;

  // sigma = 0 makes the target zero; keep the design nondegenerate so the
  // unperturbed solve stays well posed (the bound is then trivially 0 <= RHS).
  const double design_scale = sigma_min_target > 0.0 ? sigma_min_target : 1.0;

  const int n_rows = std::max(8 * p, 40);
  Eigen::MatrixXd x(n_rows, p);
  for (int i = 0; i < n_rows; ++i) {
    for (int j = 0; j < p; ++j) x(i, j) = rng.gaussian();
  }
  Eigen::VectorXd y(n_rows);
  for (int i = 0; i < n_rows; ++i) y(i) = rng.gaussian();

  Eigen::MatrixXd gram = x.transpose() * x;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> pre_solver(gram);
  const double raw_min = pre_solver.eigenvalues()(0);
  const double rescale = std::sqrt(design_scale / raw_min);
  x *= rescale;
  y *= rescale;
  gram = x.transpose() * x;

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram);
  const double sigma_min = solver.eigenvalues()(0);
  const Eigen::VectorXd xty = x.transpose() * y;
  const Eigen::VectorXd beta_hat = gram.ldlt().solve(xty);

  const double noise_term =
      std::min(2.0 * std::sqrt(2.0 * static_cast<double>(k) *
                               static_cast<double>(p) *
                               std::log(4.0 * static_cast<double>(p) /
                                        nu_param)),
               edge_sq);
  const double c = c_construct;
  const double rhs = beta_hat.norm() / (c - 1.0) +
                     sigma * sigma * (c - 2.0) / ((c - 1.0) * sigma_min) *
                         noise_term;

  std::optional<WishartSpec> spec;
  if (sigma > 0.0) {
    spec.emplace(SymMatrix::identity(p + 1, sigma * sigma), k);
  }

  long violations = 0;
  double max_lhs = 0.0;
  for (long trial = 0; trial < trials; ++trial) {
    SymMatrix w(p + 1);
    if (spec.has_value()) w = sample_wishart(rng, *spec);
    Eigen::MatrixXd noise_block(p, p);
    Eigen::VectorXd noise_vec(p);
    for (int i = 0; i < p; ++i) {
      noise_vec(i) = w(i, p);
      for (int j = 0; j < p; ++j) noise_block(i, j) = w(i, j);
    }
    const Eigen::VectorXd beta_tilde =
        (gram + noise_block).ldlt().solve(xty + noise_vec);
    const double lhs = (beta_tilde - beta_hat).norm();
    max_lhs = std::max(max_lhs, lhs);
    if (lhs > rhs) ++violations;
  }

  return internal::finish_report(
      "wishart-utility", trials, violations, nu_param,
      {{"c", c},
       {"rhs", rhs},
       {"sigma_min", sigma_min},
       {"beta_hat_norm", beta_hat.norm()},
       {"max_lhs", max_lhs}});
}

// Inverse-projection rate check: with r = d + ceil(8 / eta^2) rows the
// deviation |v'(I - ((1/(r-d+1))X'X)^{-1})v| should be O(eta).  Violations
// count trials with deviation above 4 * eta against a nominal rate of 0.05;
// the report also records the empirical 95th-percentile constant
// c_emp = P95 / eta for inspection.
inline CheckReport check_inverse_jl_vs_forward(RngStream& rng, int d,
                                               double eta, long trials) {
  if (d < 1) throw InputError("check_inverse_jl_vs_forward: d must be >= 1");
  if (!(eta > 0.0) || !(eta < 1.0)) {
    throw InputError("check_inverse_jl_vs_forward: eta must lie in (0, 1)");
  }
  if (trials < 1) {
    throw InputError("check_inverse_jl_vs_forward: trials must be >= 1");
  }

  const long r = d + static_cast<long>(std::ceil(8.0 / (eta * eta)));
  constexpr double kNominalRate = 0.05;

  std::vector<double> deviations;
  deviations.reserve(static_cast<std::size_t>(trials));
  long violations = 0;
  for (long trial = 0; trial < trials; ++trial) {
    Eigen::MatrixXd x(r, d);
    for (long i = 0; i < r; ++i) {
      for (int j = 0; j < d; ++j) x(i, j) = rng.gaussian();
    }
    const Eigen::VectorXd v = internal::random_unit_vector(rng, d);
    const double dev = internal::inverse_projection_deviation(x, v, r, d);
    deviations.push_back(dev);
    if (dev > 4.0 * eta) ++violations;
  }

  std::sort(deviations.begin(), deviations.end());
  const std::size_t idx = static_cast<std::size_t>(
      std::ceil(0.95 * static_cast<double>(trials))) - 1;
  const double p95 = deviations[std::min(idx, deviations.size() - 1)];
  const double c_emp = p95 / eta;

  return internal::finish_report(
      "inverse-jl-rate", trials, violations, kNominalRate,
      {{"r", static_cast<double>(r)},
       {"p95", p95},
       {"c_emp", c_emp}});
}

}  // namespace privgram
