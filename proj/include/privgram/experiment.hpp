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
#include <bit>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>
#include <vector>

#include "privgram/budget.hpp"
#include "privgram/dataset.hpp"
#include "privgram/errors.hpp"
#include "privgram/estimate.hpp"
#include "privgram/io.hpp"
#include "privgram/mechanisms.hpp"
#include "privgram/regress.hpp"
#include "privgram/rng.hpp"

// Synthetic regression benchmarks: dataset generators, a single-trial runner
// that feeds any mechanism's output into the Gram-matrix solver, and a grid
// runner that sweeps (mechanism, n, epsilon) cells and emits plot-ready CSV.

namespace privgram {

// Task: y = X b + intercept + N(0, noise_sd^2) with standard normal features.
// The released matrix has columns [X | 1 | y], so its dimension is p + 2.
struct SingleRegressionConfig {
  long n = 0;
  int p = 20;
  double noise_sd = 0.5;
  double beta_min = -1.0;
  double beta_max = 1.0;
  bool intercept = true;
};

// Task: p independent feature columns, an all-ones column, then p label
// columns y_i = X b_i + intercept_i + noise.  The regression targets column
// y_{label_index} and additionally includes the first m other y-columns as
// (redundant) features, whose true coefficients are zero.
struct MultiRegressionConfig {
  long n = 0;
  int p = 20;
  int m = 0;
  int label_index = 0;
  double noise_sd = 0.5;
};

// Row clipping bound used by both generators.
inline double default_row_bound(int d) {
  return std::sqrt(2.5 * static_cast<double>(d));
}

namespace internal {

inline void validate_single_config(const SingleRegressionConfig& config) {
  if (config.p < 1) {
    throw InputError("SingleRegressionConfig: p must be >= 1");
  }
  if (config.n < config.p + 2) {
    throw InputError("SingleRegressionConfig: need n >= p + 2");
  }
  if (!(config.noise_sd >= 0.0)) {
    throw InputError("SingleRegressionConfig: noise_sd must be >= 0");
  }
  if (!(config.beta_min <= config.beta_max)) {
    throw InputError("SingleRegressionConfig: empty beta range");
  }
}

// Layout fields only; the sample count is checked separately because the
// grid runner fills it in per cell.
inline void validate_multi_layout(const MultiRegressionConfig& config) {
  if (config.p < 1) {
    throw InputError("MultiRegressionConfig: p must be >= 1");
  }
  if (config.m < 0 || config.m > config.p - 1) {
    throw InputError("MultiRegressionConfig: m must lie in [0, p - 1]");
  }
  if (config.label_index < 0 || config.label_index >= config.p) {
    throw InputError("MultiRegressionConfig: label_index must lie in [0, p)");
  }
}

inline void validate_multi_config(const MultiRegressionConfig& config) {
  validate_multi_layout(config);
  if (config.n < 2 * config.p + 1) {
    throw InputError("MultiRegressionConfig: need n >= 2p + 1");
  }
  if (!(config.noise_sd >= 0.0)) {
    throw InputError("MultiRegressionConfig: noise_sd must be >= 0");
  }
}

}  // namespace internal

// Draw order is fixed for reproducibility: the p+1 coefficients first, then
// the feature block row by row, then one noise value per row.  The noise
// draws happen even at noise_sd = 0 so coupled seeds generate the same X and
// coefficients regardless of the noise setting.
inline std::pair<Dataset, Coefficients> gen_single(
    const SingleRegressionConfig& config, RngStream& rng) {
  internal::validate_single_config(config);
  const int p = config.p;
  const int d = p + 2;
  const long n = config.n;

  Eigen::VectorXd beta(p + 1);
  for (int j = 0; j <= p; ++j) {
    beta(j) =
        config.beta_min + (config.beta_max - config.beta_min) * rng.uniform();
  }
  if (!config.intercept) beta(p) = 0.0;

  RowMatrixXd rows(n, d);
  for (long i = 0; i < n; ++i) {
    for (int j = 0; j < p; ++j) rows(i, j) = rng.gaussian();
    rows(i, p) = 1.0;
  }
  Eigen::VectorXd noise(n);
  for (long i = 0; i < n; ++i) noise(i) = rng.gaussian();
  rows.col(p + 1) = rows.leftCols(p) * beta.head(p) +
                    Eigen::VectorXd::Constant(n, beta(p)) +
                    config.noise_sd * noise;

  Dataset data = clip_rows(std::move(rows), default_row_bound(d));
  return {std::move(data), Coefficients{std::move(beta)}};
}

// The regression task matching gen_single's column layout.
inline RegressionTask single_task(int p) {
  std::vector<int> features(static_cast<std::size_t>(p) + 1);
  for (int j = 0; j <= p; ++j) features[static_cast<std::size_t>(j)] = j;
  return RegressionTask(p + 1, std::move(features));
}

// Draw order: the p coefficient vectors (column by column), the feature block
// row by row, then the noise column for each label in index order.
inline std::pair<Dataset, Coefficients> gen_multi(
    const MultiRegressionConfig& config, RngStream& rng) {
  internal::validate_multi_config(config);
  const int p = config.p;
  const int d = 2 * p + 1;
  const long n = config.n;

  Eigen::MatrixXd betas(p + 1, p);
  for (int i = 0; i < p; ++i) {
    for (int j = 0; j <= p; ++j) betas(j, i) = 2.0 * rng.uniform() - 1.0;
  }

  RowMatrixXd rows(n, d);
  for (long i = 0; i < n; ++i) {
    for (int j = 0; j < p; ++j) rows(i, j) = rng.gaussian();
    rows(i, p) = 1.0;
  }
  Eigen::VectorXd noise(n);
  for (int i = 0; i < p; ++i) {
    for (long row = 0; row < n; ++row) noise(row) = rng.gaussian();
    rows.col(p + 1 + i) = rows.leftCols(p) * betas.col(i).head(p) +
                          Eigen::VectorXd::Constant(n, betas(p, i)) +
                          config.noise_sd * noise;
  }

  Dataset data = clip_rows(std::move(rows), default_row_bound(d));
  Eigen::VectorXd truth(p + 1 + config.m);
  truth.head(p + 1) = betas.col(config.label_index);
  truth.tail(config.m).setZero();
  return {std::move(data), Coefficients{std::move(truth)}};
}

// The regression task matching gen_multi's column layout: the label is the
// selected y-column, the features are all of [X | 1] plus the first m other
// y-columns in index order (so the coefficient vector lines up with the
// zero-padded truth gen_multi returns).
inline RegressionTask multi_task(const MultiRegressionConfig& config) {
  internal::validate_multi_layout(config);
  const int p = config.p;
  const int label = p + 1 + config.label_index;
  std::vector<int> features;
  features.reserve(static_cast<std::size_t>(p) + 1 +
                   static_cast<std::size_t>(config.m));
  for (int j = 0; j <= p; ++j) features.push_back(j);
  int added = 0;
  for (int i = 0; i < p && added < config.m; ++i) {
    if (i == config.label_index) continue;
    features.push_back(p + 1 + i);
    ++added;
  }
  return RegressionTask(label, std::move(features));
}

// Per-mechanism knobs a trial may need.  Absent sketch sizes default to 2d,
// matching the reference experiment setup.
struct TrialOptions {
  std::optional<long> r;
  std::optional<long> r0;
  std::optional<long> k0;
  AgVarianceConvention ag_variance_convention = AgVarianceConvention::kEpsSquared;
  AgScaleConstantMode ag_scale_constant_mode =
      AgScaleConstantMode::kAnalytic2SigmaSqrtD;
};

struct TrialRecord {
  std::string mechanism;
  long n = 0;
  double epsilon = 0.0;
  long trial_index = 0;
  std::uint64_t seed = 0;
  double error_l2 = 0.0;
  bool failed = false;
  std::string branch;
  std::map<std::string, double> calibration;
  double wall_time_ms = 0.0;
};

inline GramEstimate run_mechanism(const Dataset& data,
                                  const std::string& mechanism_id,
                                  const PrivacyBudget& budget, RngStream& rng,
                                  const TrialOptions& options = {}) {
  const long d = data.dim();
  MechanismConfig config(budget);
  config.ag_variance_convention = options.ag_variance_convention;
  config.ag_scale_constant_mode = options.ag_scale_constant_mode;

  if (mechanism_id == "none") return exact_gram(data);
  if (mechanism_id == "ridge-jl") {
    return ridge_jl(data, budget, options.r.value_or(2 * d), rng);
  }
  if (mechanism_id == "ridge-jl-adaptive") {
    return ridge_jl_adaptive(data, budget, options.r0.value_or(2 * d), rng);
  }
  if (mechanism_id == "wishart") return additive_wishart(data, budget, rng);
  if (mechanism_id == "wishart-corrected") {
    return wishart_bias_correct(additive_wishart(data, budget, rng), budget);
  }
  if (mechanism_id == "inv-wishart") return inv_wishart(data, budget, rng);
  if (mechanism_id == "inv-wishart-adaptive") {
    return inv_wishart_adaptive(data, budget, options.k0.value_or(2 * d), rng);
  }
  if (mechanism_id == "analyze-gauss") {
    return analyze_gauss(data, budget, rng, config);
  }
  if (mechanism_id == "ag-psd") {
    return ag_psd_project(analyze_gauss(data, budget, rng, config));
  }
  if (mechanism_id == "ag-scaled") {
    return ag_scaled(analyze_gauss(data, budget, rng, config), config);
  }
  if (mechanism_id == "gauss-inverse") {
    throw InputError(
        "run_mechanism: gauss-inverse perturbs the inverse Gram matrix and "
        "does not feed the solve pipeline; run it through the mech command");
  }
  throw InputError("run_mechanism: unknown mechanism id '" + mechanism_id +
                   "'");
}

// One mechanism run plus the downstream solve.  Data-dependent failures
// (singular solves, calibration breakdowns on degenerate inputs) are captured
// in the record with a zero sentinel error; configuration mistakes still
// throw.
inline TrialRecord run_trial(const Dataset& data, const Coefficients& truth,
                             const std::string& mechanism_id,
                             const PrivacyBudget& budget,
                             const RegressionTask& task, RngStream& rng,
                             const TrialOptions& options = {}) {
  TrialRecord record;
  record.mechanism = mechanism_id;
  record.n = data.n();
  record.epsilon = budget.epsilon;
  record.seed = rng.seed();

  const auto start = std::chrono::steady_clock::now();
  try {
    const GramEstimate estimate =
        run_mechanism(data, mechanism_id, budget, rng, options);
    const Coefficients solved = solve_from_gram(estimate.matrix, task);
    record.error_l2 = l2_error(solved, truth);
    record.branch = estimate.branch;
    record.calibration = estimate.calibration;
  } catch (const NumericError&) {
    record.failed = true;
    record.error_l2 = 0.0;
  } catch (const CalibrationError&) {
    record.failed = true;
    record.error_l2 = 0.0;
  }
  const auto stop = std::chrono::steady_clock::now();
  record.wall_time_ms =
      std::chrono::duration<double, std::milli>(stop - start).count();
  return record;
}

struct ExperimentGrid {
  std::vector<long> n_values;
  std::vector<double> epsilons{0.05, 0.1, 0.15, 0.2, 0.25, 0.5};
  double delta = std::exp(-9.0);
  long trials = 15;
  std::vector<std::string> mechanisms{"none", "ridge-jl", "ridge-jl-adaptive"};
  std::uint64_t master_seed = 0;
  TrialOptions options;

  ExperimentGrid() {
    for (int exp = 14; exp <= 25; ++exp) n_values.push_back(1L << exp);
  }
};

struct SummaryRow {
  std::string mechanism;
  long n = 0;
  double epsilon = 0.0;
  double mean_error = 0.0;
  double sd_error = 0.0;
  long fail_count = 0;
};

struct ExperimentResult {
  std::vector<TrialRecord> trials;
  std::vector<SummaryRow> summary;
};

namespace internal {

constexpr std::uint64_t kDataStream = 0x6461746173657400ULL;

inline std::uint64_t fnv1a64(std::string_view text) {
  std::uint64_t hash = 1469598103934665603ULL;
  for (const char c : text) {
    hash ^= static_cast<unsigned char>(c);
    hash *= 1099511628211ULL;
  }
  return hash;
}

// Root seed of one (n, epsilon, trial) cell; the dataset stream and each
// mechanism's noise stream are derived from it, so every mechanism inside a
// trial sees the same data but independent noise.
inline std::uint64_t trial_base_seed(std::uint64_t master_seed, long n,
                                     double epsilon, long trial) {
  std::uint64_t seed = derive_seed(master_seed, static_cast<std::uint64_t>(n));
  seed = derive_seed(seed, std::bit_cast<std::uint64_t>(epsilon));
  return derive_seed(seed, static_cast<std::uint64_t>(trial));
}

inline void validate_grid(const ExperimentGrid& grid) {
  if (grid.trials < 1) throw InputError("ExperimentGrid: trials must be >= 1");
  if (grid.n_values.empty()) {
    throw InputError("ExperimentGrid: n grid must be nonempty");
  }
  if (grid.epsilons.empty()) {
    throw InputError("ExperimentGrid: epsilon grid must be nonempty");
  }
  if (grid.mechanisms.empty()) {
    throw InputError("ExperimentGrid: mechanism list must be nonempty");
  }
}

inline bool record_order(const TrialRecord& a, const TrialRecord& b) {
  return std::tie(a.mechanism, a.n, a.epsilon, a.trial_index) <
         std::tie(b.mechanism, b.n, b.epsilon, b.trial_index);
}

// Mean over non-failed trials, sample standard deviation, failure count.
inline std::vector<SummaryRow> summarize(
    const std::vector<TrialRecord>& sorted_records) {
  std::vector<SummaryRow> rows;
  std::size_t i = 0;
  while (i < sorted_records.size()) {
    std::size_t j = i;
    while (j < sorted_records.size() &&
           sorted_records[j].mechanism == sorted_records[i].mechanism &&
           sorted_records[j].n == sorted_records[i].n &&
           sorted_records[j].epsilon == sorted_records[i].epsilon) {
      ++j;
    }
    SummaryRow row;
    row.mechanism = sorted_records[i].mechanism;
    row.n = sorted_records[i].n;
    row.epsilon = sorted_records[i].epsilon;
    long used = 0;
    double sum = 0.0;
    for (std::size_t k = i; k < j; ++k) {
      if (sorted_records[k].failed) {
        ++row.fail_count;
      } else {
        sum += sorted_records[k].error_l2;
        ++used;
      }
    }
    if (used > 0) row.mean_error = sum / static_cast<double>(used);
    if (used > 1) {
      double sq = 0.0;
      for (std::size_t k = i; k < j; ++k) {
        if (sorted_records[k].failed) continue;
        const double dev = sorted_records[k].error_l2 - row.mean_error;
        sq += dev * dev;
      }
      row.sd_error = std::sqrt(sq / static_cast<double>(used - 1));
    }
    rows.push_back(std::move(row));
    i = j;
  }
  return rows;
}

template <typename GenFn>
ExperimentResult run_experiment_impl(const ExperimentGrid& grid,
                                     const RegressionTask& task,
                                     const GenFn& gen) {
  validate_grid(grid);

  const auto listed = [&grid](const std::string& id) {
    return std::find(grid.mechanisms.begin(), grid.mechanisms.end(), id) !=
           grid.mechanisms.end();
  };
  // When both sketch mechanisms run, the fixed-size one reuses the row count
  // the adaptive one settled on, so their errors are directly comparable.
  const bool paired = listed("ridge-jl") && listed("ridge-jl-adaptive") &&
                      !grid.options.r.has_value();

  ExperimentResult result;
  for (const long n : grid.n_values) {
    for (const double epsilon : grid.epsilons) {
      const PrivacyBudget budget(epsilon, grid.delta);
      for (long trial = 0; trial < grid.trials; ++trial) {
        const std::uint64_t base =
            trial_base_seed(grid.master_seed, n, epsilon, trial);
        RngStream data_rng(base, kDataStream);
        const auto [data, truth] = gen(n, data_rng);

        TrialOptions options = grid.options;
        const auto run_one = [&](const std::string& id) {
          RngStream mech_rng(base, fnv1a64(id));
          TrialRecord record =
              run_trial(data, truth, id, budget, task, mech_rng, options);
          record.trial_index = trial;
          record.seed = base;
          if (paired && id == "ridge-jl-adaptive" && !record.failed) {
            options.r = static_cast<long>(record.calibration.at("r"));
          }
          result.trials.push_back(std::move(record));
        };

        if (paired) run_one("ridge-jl-adaptive");
        for (const std::string& id : grid.mechanisms) {
          if (paired && id == "ridge-jl-adaptive") continue;
          run_one(id);
        }
      }
    }
  }

  std::sort(result.trials.begin(), result.trials.end(), record_order);
  result.summary = summarize(result.trials);
  return result;
}

inline void append_double(std::string& out, double value) {
  char buf[32];
  const auto conv = std::to_chars(buf, buf + sizeof(buf), value);
  out.append(buf, conv.ptr);
}

}  // namespace internal

inline ExperimentResult run_single_experiment(const ExperimentGrid& grid,
                                              SingleRegressionConfig config) {
  const RegressionTask task = single_task(config.p);
  return internal::run_experiment_impl(
      grid, task, [&config](long n, RngStream& rng) {
        config.n = n;
        return gen_single(config, rng);
      });
}

inline ExperimentResult run_multi_experiment(const ExperimentGrid& grid,
                                             MultiRegressionConfig config) {
  const RegressionTask task = multi_task(config);
  return internal::run_experiment_impl(
      grid, task, [&config](long n, RngStream& rng) {
        config.n = n;
        return gen_multi(config, rng);
      });
}

// CSV emission.  Doubles are printed in shortest round-trip form so reruns
// with the same master seed produce byte-identical files; the wall-time
// column is the one field that legitimately varies between runs.

inline void write_trial_csv(std::ostream& out,
                            const std::vector<TrialRecord>& records) {
  out << "mechanism,n,epsilon,trial,seed,error_l2,failed,branch,calibration,"
         "wall_time_ms\n";
  for (const TrialRecord& record : records) {
    std::string line;
    line += record.mechanism;
    line += ',';
    line += std::to_string(record.n);
    line += ',';
    internal::append_double(line, record.epsilon);
    line += ',';
    line += std::to_string(record.trial_index);
    line += ',';
    line += std::to_string(record.seed);
    line += ',';
    internal::append_double(line, record.error_l2);
    line += ',';
    line += record.failed ? '1' : '0';
    line += ',';
    line += record.branch;
    line += ',';
    line += flatten_calibration(record.calibration);
    line += ',';
    internal::append_double(line, record.wall_time_ms);
    line += '\n';
    out << line;
  }
}

inline void write_summary_csv(std::ostream& out,
                              const std::vector<SummaryRow>& rows) {
  out << "mechanism,n,epsilon,mean_error,sd_error,fail_count\n";
  for (const SummaryRow& row : rows) {
    std::string line;
    line += row.mechanism;
    line += ',';
    line += std::to_string(row.n);
    line += ',';
    internal::append_double(line, row.epsilon);
    line += ',';
    internal::append_double(line, row.mean_error);
    line += ',';
    internal::append_double(line, row.sd_error);
    line += ',';
    line += std::to_string(row.fail_count);
    line += '\n';
    out << line;
  }
}

inline void write_experiment_csv(const ExperimentResult& result,
                                 const std::string& trials_path,
                                 const std::string& summary_path) {
  std::ofstream trials = internal::open_for_write(trials_path);
  write_trial_csv(trials, result.trials);
  if (!trials) throw InputError("write failed: " + trials_path);
  std::ofstream summary = internal::open_for_write(summary_path);
  write_summary_csv(summary, result.summary);
  if (!summary) throw InputError("write failed: " + summary_path);
}

}  // namespace privgram
