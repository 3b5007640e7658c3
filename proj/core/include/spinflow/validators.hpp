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
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "spinflow/lattice.hpp"
#include "spinflow/metrics.hpp"
#include "spinflow/mh_sampler.hpp"
#include "spinflow/trajectory.hpp"

namespace spinflow {

/// One pass/fail line: passes when lo <= value <= hi.
struct Check {
  std::string name;
  double value = 0.0;
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  bool passed = false;
};

Check check_at_most(std::string name, double value, double hi);
Check check_at_least(std::string name, double value, double lo);
Check check_within(std::string name, double value, double lo, double hi);

struct ValidatorReport {
  std::string name;
  bool passed = true;
  std::vector<Check> checks;
  nlohmann::json details = nlohmann::json::object();

  void add(Check check);
};

nlohmann::json to_json(const ValidatorReport& report);
std::string render_text(std::span<const ValidatorReport> reports);

struct ValidatorOptions {
  std::int64_t n_trials = 100'000;
  std::uint64_t seed = 0;
  ProposalKind kind = ProposalKind::Normalized;
  unsigned workers = 1;
  double n_sigma = 4.0;
  double min_slope = 2.7;
};

/// −½βε² P_σi(∂H/∂σ_i) − (m/2)ε² σ_i for every site.
std::vector<Vec3> predicted_drift(const SpinConfiguration& config, double beta, double eps);

/// 10(1 + βG)² with G the lattice norm of the projected energy gradient;
/// scales the ε³ allowance of the one-step tests.
double allowance_constant(const SpinConfiguration& config, double beta);

struct DriftLevel {
  double eps = 0.0;
  std::vector<Vec3> mean;
  std::vector<Vec3> predicted;
  std::vector<double> residual;
  std::vector<double> stderr_;
  double allowance = 0.0;
  double max_residual = 0.0;
  // Single-sided Bernoulli estimator, for reference.
  double plain_max_residual = 0.0;
  double plain_max_stderr = 0.0;
  bool within_tolerance = false;
};

struct DriftResult {
  std::vector<DriftLevel> levels;
  OrderFit fit;
  double allowance_constant = 0.0;
  bool passed = false;
  ValidatorReport report() const;
};

/// Monte Carlo mean of the one-step M-H displacement against the predicted
/// drift, for each proposal size in eps_list.
DriftResult validate_drift(const SpinConfiguration& config, const ModelParams& params,
                           std::span<const double> eps_list, const ValidatorOptions& options);

struct DiffusionLevel {
  double eps = 0.0;
  std::vector<std::array<double, 9>> covariance;
  std::vector<double> residual;  // Frobenius norm of cov − ε²P
  std::vector<double> stderr_;
  std::vector<double> radial;    // σᵀ cov σ
  std::vector<double> lag1_mean;
  std::vector<double> lag1_stderr;
  double allowance = 0.0;
  double max_residual = 0.0;
  double max_lag1_z = 0.0;
  bool within_tolerance = false;
  bool radial_ok = false;
  bool lag1_ok = false;
};

struct DiffusionResult {
  std::vector<DiffusionLevel> levels;
  OrderFit fit;
  double allowance_constant = 0.0;
  bool passed = false;
  ValidatorReport report() const;
};

DiffusionResult validate_diffusion(const SpinConfiguration& config, const ModelParams& params,
                                   std::span<const double> eps_list, const ValidatorOptions& options);

enum class ProjectionKind { Tangent, Cross };

struct MomentEstimate {
  ProjectionKind kind = ProjectionKind::Tangent;
  std::vector<double> mean;        // E[σ_k]
  std::vector<double> mean_se;
  std::vector<double> second;      // E[σ_k σ_l], k <= l, row-major upper triangle
  std::vector<double> second_se;
  double max_z = 0.0;
};

struct UniformityResult {
  int m = 2;
  std::int64_t n_steps = 0;
  double dt = 0.0;
  int n_batches = 50;
  std::vector<MomentEstimate> runs;
  double max_kind_z = 0.0;
  bool passed = false;
  ValidatorReport report() const;
};

/// Single free spin driven by projected noise only. Both projections are
/// run for m = 2; time averages use batch means.
UniformityResult validate_sphere_uniformity(int m, std::int64_t n_steps, double dt, std::uint64_t seed,
                                            int n_batches = 50);

/// One step σ ← normalize(σ + Π_σ(√dt w)).
Vec3 projected_noise_step(const Vec3& sigma, const Vec3& w, double dt, ProjectionKind kind);

struct EnergyBoundResult {
  double b = 0.0;
  double T = 0.0;
  double eps_sq = 0.0;  // N/β
  double threshold_increment = 0.0;
  double bound = 0.0;
  std::int64_t realizations = 0;
  std::int64_t exceedances = 0;
  double allowed = 0.0;
  // Same event with ε² = N dt/β, the proposal variance.
  double proposal_eps_sq = 0.0;
  double proposal_bound = 0.0;
  std::int64_t proposal_exceedances = 0;
  bool passed = false;
  ValidatorReport report() const;
};

/// Counts realizations with sup_{t<=T} H > H(0) + 4JN(N/β)T + b and
/// compares the frequency with exp(−bN/(N/β)).
EnergyBoundResult energy_bound_monitor(std::span<const TrajectoryRecord> trajectories,
                                       const ModelParams& params, double T, double b);

struct TaylorLevel {
  double eps = 0.0;
  double max_a = 0.0;
  double max_c = 0.0;
  double max_d = 0.0;
};

struct TaylorResult {
  std::vector<TaylorLevel> levels;
  OrderFit fit_a, fit_c, fit_d;
  double tolerance = 0.1;
  bool passed = false;
  ValidatorReport report() const;
};

TaylorResult taylor_residual_sweep(Model model, std::span<const double> eps_list, int n_samples,
                                   std::uint64_t seed);

}  // namespace spinflow
