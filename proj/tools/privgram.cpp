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

#include <cstdint>
#include <exception>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "privgram/experiment.hpp"
#include "privgram/io.hpp"
#include "privgram/mechanisms.hpp"
#include "privgram/regress.hpp"
#include "privgram/rng.hpp"
#include "privgram/statcheck.hpp"

namespace {

using namespace privgram;

std::string format_double(double value) {
  std::string out;
  internal::append_double(out, value);
  return out;
}

AgVarianceConvention parse_ag_convention(const std::string& name) {
  if (name == "eps2") return AgVarianceConvention::kEpsSquared;
  if (name == "eps1") return AgVarianceConvention::kEpsLinear;
  throw InputError("unknown Analyze Gauss convention: " + name);
}

AgScaleConstantMode parse_ag_scale_mode(const std::string& name) {
  if (name == "analytic") return AgScaleConstantMode::kAnalytic2SigmaSqrtD;
  if (name == "mc") return AgScaleConstantMode::kMonteCarlo;
  throw InputError("unknown Analyze Gauss scale mode: " + name);
}

struct GenArgs {
  std::string scenario;
  long n = 0;
  int p = 20;
  int m = 0;
  int label_index = 0;
  double noise_sd = 0.5;
  std::uint64_t seed = 0;
  std::string out;
};

void run_gen(const GenArgs& args) {
  RngStream rng(args.seed);
  Dataset data(RowMatrixXd::Zero(1, 2), 1.0);
  Coefficients truth;
  if (args.scenario == "single") {
    SingleRegressionConfig config;
    config.n = args.n;
    config.p = args.p;
    config.noise_sd = args.noise_sd;
    auto [generated, beta] = gen_single(config, rng);
    data = std::move(generated);
    truth = std::move(beta);
  } else {
    MultiRegressionConfig config;
    config.n = args.n;
    config.p = args.p;
    config.m = args.m;
    config.label_index = args.label_index;
    config.noise_sd = args.noise_sd;
    auto [generated, beta] = gen_multi(config, rng);
    data = std::move(generated);
    truth = std::move(beta);
  }
  write_dataset(args.out, data);
  write_coefficients(args.out + ".truth", truth);
  std::cout << "wrote " << data.n() << "x" << data.dim() << " dataset to "
            << args.out << " (truth: " << args.out << ".truth)\n";
}

struct MechArgs {
  std::string alg;
  double eps = 0.0;
  double delta = std::exp(-9.0);
  std::string in;
  std::string out;
  std::uint64_t seed = 0;
  long r = -1;
  long r0 = -1;
  long k0 = -1;
  double rho = 1.0;
  std::string ag_convention = "eps2";
  std::string ag_scale_mode = "analytic";
};

void run_mech(const MechArgs& args) {
  const Dataset data = read_dataset(args.in);
  const PrivacyBudget budget(args.eps, args.delta);
  RngStream rng(args.seed);

  GramEstimate estimate;
  if (args.alg == "gauss-inverse") {
    estimate = gauss_inverse_noise(data, budget, args.rho, rng);
  } else {
    TrialOptions options;
    if (args.r >= 0) options.r = args.r;
    if (args.r0 >= 0) options.r0 = args.r0;
    if (args.k0 >= 0) options.k0 = args.k0;
    options.ag_variance_convention = parse_ag_convention(args.ag_convention);
    options.ag_scale_constant_mode = parse_ag_scale_mode(args.ag_scale_mode);
    estimate = run_mechanism(data, args.alg, budget, rng, options);
  }
  write_gram_estimate(args.out, estimate);
  std::cout << estimate.mechanism << " -> " << args.out;
  if (!estimate.branch.empty()) std::cout << " (branch: " << estimate.branch << ")";
  std::cout << " calibration: " << flatten_calibration(estimate.calibration)
            << "\n";
}

struct RegressArgs {
  std::string gram;
  int label = 0;
  std::vector<int> features;
  std::string out;
};

void run_regress(const RegressArgs& args) {
  const GramEstimate estimate = read_gram_estimate(args.gram);
  const RegressionTask task(args.label, args.features);
  const Coefficients coefficients = solve_from_gram(estimate.matrix, task);
  write_coefficients(args.out, coefficients);
  std::cout << "wrote " << coefficients.values.size() << " coefficients to "
            << args.out << "\n";
}

struct ExpArgs {
  std::vector<long> n_list;
  std::vector<double> eps_list;
  long trials = 15;
  std::uint64_t master_seed = 0;
  std::string out_dir;
  std::vector<std::string> mechs;
  int p = 20;
  int m = 1;
  int label_index = 0;
  double noise_sd = 0.5;
  long r = -1;
  long r0 = -1;
  long k0 = -1;
  std::string ag_convention = "eps2";
};

ExperimentGrid build_grid(const ExpArgs& args) {
  ExperimentGrid grid;
  if (!args.n_list.empty()) grid.n_values = args.n_list;
  if (!args.eps_list.empty()) grid.epsilons = args.eps_list;
  grid.trials = args.trials;
  grid.master_seed = args.master_seed;
  if (!args.mechs.empty()) grid.mechanisms = args.mechs;
  if (args.r >= 0) grid.options.r = args.r;
  if (args.r0 >= 0) grid.options.r0 = args.r0;
  if (args.k0 >= 0) grid.options.k0 = args.k0;
  grid.options.ag_variance_convention = parse_ag_convention(args.ag_convention);
  return grid;
}

void emit_experiment(const ExperimentResult& result, const std::string& dir) {
  std::filesystem::create_directories(dir);
  const std::string trials_path = dir + "/trials.csv";
  const std::string summary_path = dir + "/summary.csv";
  write_experiment_csv(result, trials_path, summary_path);
  write_summary_csv(std::cout, result.summary);
  std::cerr << "wrote " << result.trials.size() << " trial rows to "
            << trials_path << " and " << result.summary.size()
            << " summary rows to " << summary_path << "\n";
}

void run_exp_single(const ExpArgs& args) {
  const ExperimentGrid grid = build_grid(args);
  SingleRegressionConfig config;
  config.p = args.p;
  config.noise_sd = args.noise_sd;
  emit_experiment(run_single_experiment(grid, config), args.out_dir);
}

void run_exp_multi(const ExpArgs& args) {
  ExperimentGrid grid = build_grid(args);
  if (args.eps_list.empty()) grid.epsilons = {0.1};
  if (args.n_list.empty()) {
    grid.n_values.clear();
    for (int exp = 12; exp <= 27; ++exp) grid.n_values.push_back(1L << exp);
  }
  if (args.mechs.empty()) {
    grid.mechanisms = {"none",    "analyze-gauss",     "ridge-jl-adaptive",
                       "wishart", "wishart-corrected", "ag-scaled",
                       "inv-wishart-adaptive"};
  }
  MultiRegressionConfig config;
  config.p = args.p;
  config.m = args.m;
  config.label_index = args.label_index;
  config.noise_sd = args.noise_sd;
  emit_experiment(run_multi_experiment(grid, config), args.out_dir);
}

struct CheckArgs {
  std::string suite = "all";
  std::uint64_t seed = 0;
  long trials = 0;  // 0 keeps each check's reference trial count
};

int run_check(const CheckArgs& args) {
  struct Entry {
    const char* id;
    CheckReport (*run)(RngStream&, long);
  };
  const Entry entries[] = {
      {"sherman-morrison",
       [](RngStream& rng, long trials) {
         return check_sherman_morrison(rng, 8, trials > 0 ? trials : 1000);
       }},
      {"chi2-tail",
       [](RngStream& rng, long trials) {
         return check_chi2_tail(rng, 50, 2.0 * std::log(40.0),
                                trials > 0 ? trials : 100000);
       }},
      {"jl-lemma",
       [](RngStream& rng, long trials) {
         return check_jl_lemma(rng, 200, 10, 0.05, trials > 0 ? trials : 10000);
       }},
      {"wishart-eigen",
       [](RngStream& rng, long trials) {
         return check_wishart_eigen_bounds(rng, 3, 400, 0.05,
                                           trials > 0 ? trials : 2000);
       }},
      {"wishart-utility",
       [](RngStream& rng, long trials) {
         return check_wishart_utility_bound(rng, 5, 60, 1.0, 0.1,
                                            trials > 0 ? trials : 2000);
       }},
      {"inverse-jl-rate",
       [](RngStream& rng, long trials) {
         return check_inverse_jl_vs_forward(rng, 10, 0.2,
                                            trials > 0 ? trials : 5000);
       }},
  };

  bool matched = false;
  bool all_passed = true;
  std::cout << "check_id,trials,violations,bound,slack,passed\n";
  for (const Entry& entry : entries) {
    if (args.suite != "all" && args.suite != entry.id) continue;
    matched = true;
    RngStream rng(args.seed, internal::fnv1a64(entry.id));
    const CheckReport report = entry.run(rng, args.trials);
    std::cout << report.check_id << ',' << report.trials << ','
              << report.violations << ',' << format_double(report.bound) << ','
              << format_double(report.slack) << ','
              << (report.passed ? '1' : '0') << "\n";
    all_passed = all_passed && report.passed;
  }
  if (!matched) {
    throw InputError("unknown check suite: " + args.suite);
  }
  return all_passed ? 0 : 2;
}

const std::vector<std::string> kMechanismIds{
    "ridge-jl",      "ridge-jl-adaptive",    "wishart",
    "wishart-corrected", "inv-wishart",      "inv-wishart-adaptive",
    "analyze-gauss", "ag-psd",               "ag-scaled",
    "gauss-inverse", "none"};

void add_grid_flags(CLI::App* cmd, ExpArgs& args) {
  cmd->add_option("--n-list", args.n_list, "sample counts to sweep")
      ->delimiter(',');
  cmd->add_option("--eps-list", args.eps_list, "epsilon values to sweep")
      ->delimiter(',');
  cmd->add_option("--trials", args.trials, "trials per grid cell");
  cmd->add_option("--master-seed", args.master_seed, "seed for the whole run");
  cmd->add_option("--out-dir", args.out_dir,
                  "directory for trials.csv and summary.csv")
      ->required();
  cmd->add_option("--mechs", args.mechs, "mechanism ids to compare")
      ->delimiter(',');
  cmd->add_option("--p", args.p, "feature count");
  cmd->add_option("--noise-sd", args.noise_sd,
                  "label noise standard deviation (pass 0.7071 to treat the "
                  "reference 0.5 as a variance instead)");
  cmd->add_option("--r", args.r, "fixed sketch rows (disables pairing)");
  cmd->add_option("--r0", args.r0, "adaptive sketch burn-in rows");
  cmd->add_option("--k0", args.k0, "adaptive inverse-Wishart burn-in dof");
  cmd->add_option("--ag-convention", args.ag_convention,
                  "Analyze Gauss variance convention")
      ->check(CLI::IsMember({"eps2", "eps1"}));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Differentially private Gram matrix estimation and regression "
      "benchmarks"};
  app.require_subcommand(1);

  GenArgs gen_args;
  CLI::App* gen = app.add_subcommand("gen", "generate a synthetic dataset");
  gen->add_option("--scenario", gen_args.scenario, "dataset family")
      ->check(CLI::IsMember({"single", "multi"}))
      ->required();
  gen->add_option("--n", gen_args.n, "rows")->required();
  gen->add_option("--p", gen_args.p, "feature count");
  gen->add_option("--m", gen_args.m, "redundant label columns used as features");
  gen->add_option("--label-index", gen_args.label_index,
                  "which label column is the regression target");
  gen->add_option("--noise-sd", gen_args.noise_sd,
                  "label noise standard deviation");
  gen->add_option("--seed", gen_args.seed, "stream seed");
  gen->add_option("--out", gen_args.out, "dataset path")->required();

  MechArgs mech_args;
  CLI::App* mech =
      app.add_subcommand("mech", "run one mechanism over a dataset");
  mech->add_option("--alg", mech_args.alg, "mechanism id")
      ->check(CLI::IsMember(kMechanismIds))
      ->required();
  mech->add_option("--eps", mech_args.eps, "epsilon")->required();
  mech->add_option("--delta", mech_args.delta, "delta");
  mech->add_option("--in", mech_args.in, "dataset path")->required();
  mech->add_option("--seed", mech_args.seed, "stream seed");
  mech->add_option("--out", mech_args.out, "estimate path")->required();
  mech->add_option("--r", mech_args.r, "sketch rows for ridge-jl");
  mech->add_option("--r0", mech_args.r0, "burn-in rows for ridge-jl-adaptive");
  mech->add_option("--k0", mech_args.k0,
                   "burn-in dof for inv-wishart-adaptive");
  mech->add_option("--rho", mech_args.rho,
                   "spectral-gap parameter for gauss-inverse");
  mech->add_option("--ag-convention", mech_args.ag_convention,
                   "Analyze Gauss variance convention")
      ->check(CLI::IsMember({"eps2", "eps1"}));
  mech->add_option("--ag-scale-mode", mech_args.ag_scale_mode,
                   "scaled Analyze Gauss constant mode")
      ->check(CLI::IsMember({"analytic", "mc"}));

  RegressArgs regress_args;
  CLI::App* regress =
      app.add_subcommand("regress", "solve a regression from a Gram estimate");
  regress->add_option("--gram", regress_args.gram, "estimate path")->required();
  regress->add_option("--label", regress_args.label, "label column index")
      ->required();
  regress->add_option("--features", regress_args.features,
                      "feature column indices")
      ->delimiter(',')
      ->required();
  regress->add_option("--out", regress_args.out, "coefficients path")
      ->required();

  ExpArgs single_args;
  CLI::App* exp_single = app.add_subcommand(
      "exp-single", "sweep mechanisms over the single-label benchmark");
  add_grid_flags(exp_single, single_args);

  ExpArgs multi_args;
  CLI::App* exp_multi = app.add_subcommand(
      "exp-multi", "sweep mechanisms over the redundant-label benchmark");
  add_grid_flags(exp_multi, multi_args);
  exp_multi->add_option("--m", multi_args.m,
                        "redundant label columns used as features");
  exp_multi->add_option("--label-index", multi_args.label_index,
                        "which label column is the regression target");

  CheckArgs check_args;
  CLI::App* check = app.add_subcommand(
      "check", "run the statistical verification suite");
  check->add_option("--suite", check_args.suite, "all or one check id");
  check->add_option("--seed", check_args.seed, "master seed");
  check->add_option("--trials", check_args.trials,
                    "override the per-check trial count");

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) run_gen(gen_args);
    if (mech->parsed()) run_mech(mech_args);
    if (regress->parsed()) run_regress(regress_args);
    if (exp_single->parsed()) run_exp_single(single_args);
    if (exp_multi->parsed()) run_exp_multi(multi_args);
    if (check->parsed()) return run_check(check_args);
  } catch (const std::exception& error) {
    std::cerr << "error: " << error.what() << "\n";
    return 1;
  }
  return 0;
}
