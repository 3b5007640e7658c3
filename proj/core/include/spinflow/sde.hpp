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

#include "spinflow/lattice.hpp"
#include "spinflow/noise.hpp"
#include "spinflow/trajectory.hpp"

namespace spinflow {

struct SDEState {
  SpinConfiguration config;
  double t = 0.0;
  double dt = 0.0;
  bool renormalize = true;
};

/// Coefficient c of the Itô correction −cσ in the drift: (m/2)·N/β, the
/// Itô–Stratonovich conversion term of the projected noise on S^m.
double ito_correction(const ModelParams& params);

/// μ_i = P_σi(Δ_N σ_i) − (m/2)(N/β) σ_i.
Vec3 drift(const SpinConfiguration& config, const ModelParams& params, std::size_t i);

/// Largest stable explicit step for the discrete Laplacian at resolution N
/// (1/(2N²)); steps above 1/(4N²) are accepted with a warning.
double max_stable_dt(int N);
double recommended_dt(int N);

/// σ_i ← σ_i + μ_i dt + P_σi(sqrt(N/β) ΔW_i), all sites from the same old
/// configuration, then renormalized when state.renormalize is set.
/// Throws StepSizeTooLarge if a pre-normalization norm leaves [0.5, 2].
void euler_step(SDEState& state, const ModelParams& params, std::span<const Vec3> dW);

/// Stochastic Heun step for the Stratonovich form (no Itô correction),
/// followed by renormalization.
void heun_step(SDEState& state, const ModelParams& params, std::span<const Vec3> dW);

enum class SDEScheme { ItoEuler, StratonovichHeun };

/// Integrates on [0, T] at resolution params.dt, coarsening `path` as
/// needed. T must be a multiple of dt.
TrajectoryRecord run_sde(const SpinConfiguration& initial, const ModelParams& params,
                         const BrownianLattice& path, double T, const RecordOptions& options,
                         SDEScheme scheme = SDEScheme::ItoEuler, bool renormalize = true);

/// round(T/dt), validated to be an integer within 1e-9 relative.
std::int64_t step_count(double T, double dt);

}  // namespace spinflow
