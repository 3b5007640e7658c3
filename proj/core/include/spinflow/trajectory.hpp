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
#include <iosfwd>
#include <limits>
#include <string>
#include <vector>

#include "spinflow/lattice.hpp"

namespace spinflow {

/// Snapshot and scalar cadence for a run. Values <= 0 disable a stream;
/// the initial state is always recorded, and so is the final snapshot
/// when `final_snapshot` is set.
struct RecordOptions {
  std::int64_t snapshot_every = 0;
  std::int64_t scalar_every = 1;
  bool final_snapshot = true;
};

/// Time series produced by one run of a sampler or integrator.
///
/// Snapshots use piecewise-constant semantics: the configuration recorded
/// at time t is the state on [t, t + dt).
struct TrajectoryRecord {
  std::string source;  // "mh", "sde" or "pde"
  Model model = Model::XY;
  int N = 0;
  double dt = 0.0;
  std::uint64_t seed = 0;

  std::vector<double> snapshot_times;
  std::vector<SpinConfiguration> snapshots;

  std::vector<double> scalar_times;
  std::vector<double> energy;
  std::vector<double> accept_rate;

  /// sup over every step (recorded or not) of the energy.
  double max_energy = -std::numeric_limits<double>::infinity();
  std::int64_t steps = 0;
  std::int64_t accepted = 0;

  const SpinConfiguration& final_state() const { return snapshots.back(); }
};

/// `t,site,x,y[,z]`, one row per site and snapshot.
void write_trajectory_csv(std::ostream& out, const TrajectoryRecord& record);
/// `t,H,accept_rate`.
void write_scalar_csv(std::ostream& out, const TrajectoryRecord& record);

}  // namespace spinflow
