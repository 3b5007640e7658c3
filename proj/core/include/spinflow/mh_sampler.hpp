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

#include <cstdint>
#include <span>
#include <string_view>

#include "spinflow/lattice.hpp"
#include "spinflow/noise.hpp"
#include "spinflow/trajectory.hpp"

namespace spinflow {

enum class ProposalKind { Normalized, Exponential };

std::string_view to_string(ProposalKind kind);
ProposalKind parse_proposal_kind(std::string_view name);

/// Metropolis-Hastings chain state. The whole lattice is proposed at once
/// and accepted or rejected jointly.
struct MHState {
  SpinConfiguration config;
  std::int64_t step = 0;
  std::int64_t accept_count = 0;
  ProposalKind proposal_kind = ProposalKind::Normalized;
  /// H(config), updated by δH on acceptance and recomputed from scratch
  /// every kEnergyRefresh acceptances.
  double energy = 0.0;
  std::int64_t accepted_since_refresh = 0;

  static constexpr std::int64_t kEnergyRefresh = 10'000;

  static MHState start(SpinConfiguration initial, ProposalKind kind = ProposalKind::Normalized);
  double acceptance_rate() const { return step == 0 ? 1.0 : static_cast<double>(accept_count) / step; }
};

struct MHStepResult {
  bool accepted = false;
  double delta_h = 0.0;
  double acceptance_probability = 1.0;
};

/// Proposal from explicit standard-normal vectors w_i: ν_i = P_σi(w_i), then
/// σ̃_i = exp_σi(εν_i) or (σ_i + εν_i)/‖σ_i + εν_i‖.
SpinConfiguration propose_from_noise(const SpinConfiguration& config, double eps,
                                     std::span<const Vec3> w, ProposalKind kind);
void propose_from_noise(const SpinConfiguration& config, double eps, std::span<const Vec3> w,
                        ProposalKind kind, SpinConfiguration& out);

/// Proposal driven by the shared Brownian path: w_i = mh_noise(path, step, i).
SpinConfiguration propose(const MHState& state, double eps, const BrownianLattice& path);

/// min(1, exp(−β δH)), with β = 0 and β = inf handled exactly.
double acceptance_probability(double beta, double delta_h);

/// One step with an explicit accept uniform `u` (accepted iff u < α).
MHStepResult mh_step(MHState& state, const ModelParams& params, const BrownianLattice& path, double u);
/// One step; the uniform comes from accept_uniform(path.seed(), step).
MHStepResult mh_step(MHState& state, const ModelParams& params, const BrownianLattice& path);

/// n_steps of mh_step on `path` (coarsened to params.dt if it is finer).
/// The noise cursor advances on rejection too, keeping the chain aligned
/// with the SDE driven by the same path.
TrajectoryRecord run_mh(const SpinConfiguration& initial, const ModelParams& params,
                        const BrownianLattice& path, std::int64_t n_steps, const RecordOptions& options,
                        ProposalKind kind = ProposalKind::Normalized);

/// Brings `path` to resolution `dt` by coarsening; throws InvalidInput if
/// dt is not an integer multiple of path.dt().
BrownianLattice match_resolution(const BrownianLattice& path, double dt);

}  // namespace spinflow
