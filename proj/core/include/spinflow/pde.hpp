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

#include "spinflow/lattice.hpp"
#include "spinflow/trajectory.hpp"

namespace spinflow {

/// σ_i ← normalize(σ_i + P_σi(Δ_N σ_i) dt). Throws InvalidInput when
/// dt > 1/(2N²).
SpinConfiguration pde_step(const SpinConfiguration& config, double dt);
void pde_step_inplace(SpinConfiguration& config, double dt);

/// Explicit integration of the projected heat flow on [0, T]. The energy
/// trace holds the Dirichlet energy; the accept_rate column is 1.
TrajectoryRecord run_pde(const SpinConfiguration& initial, double T, double dt,
                         const RecordOptions& options);

}  // namespace spinflow
