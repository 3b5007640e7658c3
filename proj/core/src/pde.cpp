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

#include "spinflow/pde.hpp"

#include <fmt/format.h>

#include <cmath>
#include <vector>

#include "spinflow/errors.hpp"
#include "spinflow/sde.hpp"
#include "spinflow/sphere.hpp"

namespace spinflow {

namespace {

thread_local std::vector<Vec3> tls_next;

void check_dt(double dt, int N) {
  if (!(dt > 0.0)) throw InvalidInput(fmt::format("dt must be positive, got {}", dt));
  if (dt > max_stable_dt(N) * (1.0 + 1e-12)) {
    throw InvalidInput(fmt::format("dt = {} exceeds the stability limit 1/(2N^2) = {}", dt,
                                   max_stable_dt(N)));
  }
}

}  // namespace

void pde_step_inplace(SpinConfiguration& config, double dt) {
  check_dt(dt, config.N());
  const std::size_t M = config.size();
  const double n2 = static_cast<double>(config.N()) * config.N();
  auto& next = tls_next;
  next.resize(M);
  // Same arithmetic as euler_step with zero noise and no Itô term.
  for (std::size_t i = 0; i < M; ++i) {
    const Vec3& s = config[i];
    const Vec3 lap = n2 * (config[config.next(i)] + config[config.prev(i)] - 2.0 * s);
    const Vec3 mu = kernel::project(s, lap) - 0.0 * s;
    next[i] = s + mu * dt + kernel::project(s, Vec3{});
  }
  for (std::size_t i = 0; i < M; ++i) {
    const double len = norm(next[i]);
    if (!(len >= 0.5 && len <= 2.0)) throw StepSizeTooLarge(fmt::format("spin {} left the sphere (norm {})", i, len));
    config[i] = (1.0 / len) * next[i];
  }
}

SpinConfiguration pde_step(const SpinConfiguration& config, double dt) {
  SpinConfiguration out = config;
  pde_step_inplace(out, dt);
  return out;
}

TrajectoryRecord run_pde(const SpinConfiguration& initial, double T, double dt,
                         const RecordOptions& options) {
  check_dt(dt, initial.N());
  const std::int64_t n_steps = step_count(T, dt);
  TrajectoryRecord rec;
  rec.source = "pde";
  rec.model = initial.model();
  rec.N = initial.N();
  rec.dt = dt;

  SpinConfiguration config = initial;
  auto record_scalars = [&](std::int64_t n) {
    rec.scalar_times.push_back(static_cast<double>(n) * dt);
    rec.energy.push_back(dirichlet_energy(config));
    rec.accept_rate.push_back(1.0);
  };
  rec.snapshot_times.push_back(0.0);
  rec.snapshots.push_back(config);
  record_scalars(0);
  rec.max_energy = rec.energy.back();

  for (std::int64_t n = 1; n <= n_steps; ++n) {
    pde_step_inplace(config, dt);
    if (options.scalar_every > 0 && n % options.scalar_every == 0) {
      record_scalars(n);
      rec.max_energy = std::max(rec.max_energy, rec.energy.back());
    }
    if ((options.snapshot_every > 0 && n % options.snapshot_every == 0) ||
        (n == n_steps && options.final_snapshot)) {
      rec.snapshot_times.push_back(static_cast<double>(n) * dt);
      rec.snapshots.push_back(config);
    }
  }
  rec.steps = n_steps;
  rec.accepted = n_steps;
  return rec;
}

}  // namespace spinflow
