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

#include "spinflow/trajectory.hpp"

#include <fmt/format.h>

#include <ostream>

namespace spinflow {

void write_trajectory_csv(std::ostream& out, const TrajectoryRecord& record) {
  const bool three = components(record.model) == 3;
  out << (three ? "t,site,x,y,z\n" : "t,site,x,y\n");
  for (std::size_t k = 0; k < record.snapshots.size(); ++k) {
    const double t = record.snapshot_times[k];
    const auto& config = record.snapshots[k];
    for (std::size_t i = 0; i < config.size(); ++i) {
      const Vec3& s = config[i];
      if (three) {
        out << fmt::format("{:.17g},{},{:.17g},{:.17g},{:.17g}\n", t, i, s.x, s.y, s.z);
      } else {
        out << fmt::format("{:.17g},{},{:.17g},{:.17g}\n", t, i, s.x, s.y);
      }
    }
  }
}

void write_scalar_csv(std::ostream& out, const TrajectoryRecord& record) {
  out << "t,H,accept_rate\n";
  for (std::size_t k = 0; k < record.scalar_times.size(); ++k) {
    out << fmt::format("{:.17g},{:.17g},{:.17g}\n", record.scalar_times[k], record.energy[k],
                       record.accept_rate[k]);
  }
}

}  // namespace spinflow
