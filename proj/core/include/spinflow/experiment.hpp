// Copyright 2026 The spinflow Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "spinflow/lattice.hpp"
#include "spinflow/metrics.hpp"
#include "spinflow/mh_sampler.hpp"
#include "spinflow/trajectory.hpp"
#include "spinflow/validators.hpp"

namespace spinflow {

enum class Scenario { Dynamics, ConvDt, ConvDx, Validate };

std::string_view to_string(Scenario s);
Scenario parse_scenario(std::string_view name);

/// Accepts a number or "inf"/"infinity" (noise switched off).
double parse_beta(std::string_view text);

struct ExperimentConfig {
  Scenario scenario = Scenario::Dynamics;
  Model model = Model::XY;
  int N = 10;
  std::vector<int> N_sweep;
  double L = 2.0;
  double gamma = 1.5;
  std::optional<double> beta;  // overrides gamma
  double dt = 1e-3;
  std::vector<double> dt_sweep;
  int ref_factor = 16;
  double T = 0.5;
  InitialCondition ic = InitialCondition::OutOfEquilibrium;
  std::optional<double> amplitude;
  int realizations = 1;
  std::uint64_t seed = 0;
  std::string output_dir = "out";
  unsigned workers = 0;  // 0: all cores; never recorded in metadata
  ProposalKind proposal = ProposalKind::Normalized;
  double snapshot_interval = 0.05;

  // validate
  std::vector<double> eps_list{0.05, 0.02, 0.01};
  std::int64_t n_trials = 100'000;
  double validator_beta = 0.05;
  std::int64_t uniformity_steps = 1'000'000;
  double uniformity_dt = 0.01;
  int energy_realizations = 100;
  double energy_T = 1.0;
  double energy_b = 1.0;
  InitialCondition energy_ic = InitialCondition::Aligned;
  std::vector<double> taylor_eps{1e-1, 1e-2, 1e-3};
  int taylor_samples = 1000;

  /// Defaults for one scenario.
  static ExperimentConfig defaults(Scenario scenario);

  double beta_for(int n) const;
  ModelParams params_for(int n, double step) const;

  /// Throws ConfigError naming the offending field.
  void validate() const;

  nlohmann::json to_json() const;
};

struct ConvergenceLevel {
  double h = 0.0;
  double err = 0.0;
  double stderr_ = 0.0;
  int n_realizations = 0;
  std::vector<double> samples;
};

struct ConvergenceResult {
  std::vector<ConvergenceLevel> levels;
  OrderFit fit;
  nlohmann::json derived;
  std::vector<std::uint64_t> seeds;
};

/// M-H at each dt against the SDE at dt_ref = min(dt)/ref_factor on the
/// same Brownian path; rms error at T averaged over realizations.
ConvergenceResult run_conv_dt(const ExperimentConfig& config);

/// M-H at (N, dt = 1/N⁴, β) against the PDE at the same N; fit in δx = 1/N.
ConvergenceResult run_conv_dx(const ExperimentConfig& config);

struct DynamicsResult {
  TrajectoryRecord mh, sde, pde;
  std::vector<double> times;
  std::vector<double> mh_pde, sde_pde, mh_sde;  // mean rms errors over realizations
  std::vector<double> mh_pde_se, sde_pde_se, mh_sde_se;
  nlohmann::json derived;
  std::vector<std::uint64_t> seeds;
};

DynamicsResult run_dynamics(const ExperimentConfig& config);

struct ValidateResult {
  std::vector<ValidatorReport> reports;
  bool passed = false;
  nlohmann::json derived;
};

ValidateResult run_validate(const ExperimentConfig& config);

/// M-H realizations at the energy-bound parameters; returns the trajectories.
std::vector<TrajectoryRecord> energy_bound_trajectories(const ExperimentConfig& config);

/// Runs the scenario, writes CSVs, reports, plot script and metadata into
/// config.output_dir, and returns the process exit code (0 or 4).
int run_experiment(const ExperimentConfig& config, std::ostream& log);

std::string sha256_hex(const std::filesystem::path& file);

}  // namespace spinflow
