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

#include "spinflow/sde.hpp"

#include <fmt/format.h>

#include <cmath>
#include <iostream>
#include <vector>

#include "spinflow/errors.hpp"
#include "spinflow/mh_sampler.hpp"
#include "spinflow/sphere.hpp"

namespace spinflow {

double ito_correction(const ModelParams& params) {
  if (std::isinf(params.beta)) return 0.0;
  return 0.5 * sphere_dim(params.model) * params.N / params.beta;
}

Vec3 drift(const SpinConfiguration& config, const ModelParams& params, std::size_t i) {
  const Vec3 lap = discrete_laplacian(config, i);
  return kernel::project(config[i], lap) - ito_correction(params) * config[i];
}

double max_stable_dt(int N) { return 1.0 / (2.0 * N * N); }
double recommended_dt(int N) { return 1.0 / (4.0 * N * N); }

std::int64_t step_count(double T, double dt) {
  if (T < 0.0) throw InvalidInput("negative integration time");
  const double ratio = T / dt;
  const auto n = static_cast<std::int64_t>(std::llround(ratio));
  if (std::fabs(ratio - static_cast<double>(n)) > 1e-9 * std::max(1.0, ratio)) {
    throw InvalidInput(fmt::format("T = {} is not a multiple of dt = {}", T, dt));
  }
  return n;
}

namespace {

void check_step_size(double dt, int N) {
  if (dt > max_stable_dt(N) * (1.0 + 1e-12)) {
    throw InvalidInput(fmt::format("dt = {} exceeds the explicit stability limit 1/(2N^2) = {}", dt,
                                   max_stable_dt(N)));
  }
}

thread_local std::vector<Vec3> tls_next;
thread_local std::vector<Vec3> tls_predict;

}  // namespace

void euler_step(SDEState& state, const ModelParams& params, std::span<const Vec3> dW) {
  auto& config = state.config;
  const std::size_t M = config.size();
  if (dW.size() != M) throw InvalidInput("euler_step: increment span has the wrong size");
  const double n2 = static_cast<double>(config.N()) * config.N();
  const double amp = params.noise_amplitude();
  const double ito = ito_correction(params);
  const double dt = state.dt;

  auto& next = tls_next;
  next.resize(M);
  for (std::size_t i = 0; i < M; ++i) {
    const Vec3& s = config[i];
    const Vec3 lap = n2 * (config[config.next(i)] + config[config.prev(i)] - 2.0 * s);
    const Vec3 mu = kernel::project(s, lap) - ito * s;
    next[i] = s + mu * dt + kernel::project(s, amp * dW[i]);
  }
  for (std::size_t i = 0; i < M; ++i) {
    const double len = norm(next[i]);
    if (!(len >= 0.5 && len <= 2.0)) {
      throw StepSizeTooLarge(fmt::format("spin {} left the sphere (norm {}) at t = {}", i, len, state.t));
    }
    config[i] = state.renormalize ? (1.0 / len) * next[i] : next[i];
  }
  state.t += dt;
}

void heun_step(SDEState& state, const ModelParams& params, std::span<const Vec3> dW) {
  auto& config = state.config;
  const std::size_t M = config.size();
  if (dW.size() != M) throw InvalidInput("heun_step: increment span has the wrong size");
  const double n2 = static_cast<double>(config.N()) * config.N();
  const double amp = params.noise_amplitude();
  const double dt = state.dt;

  auto increment = [&](const auto& spins, std::size_t i) {
    const Vec3& s = spins[i];
    const std::size_t ip = i + 1 == M ? 0 : i + 1;
    const std::size_t im = i == 0 ? M - 1 : i - 1;
    const Vec3 lap = n2 * (spins[ip] + spins[im] - 2.0 * s);
    return kernel::project(s, lap) * dt + kernel::project(s, amp * dW[i]);
  };

  auto& predict = tls_predict;
  predict.resize(M);
  for (std::size_t i = 0; i < M; ++i) predict[i] = config[i] + increment(config, i);
  auto& next = tls_next;
  next.resize(M);
  for (std::size_t i = 0; i < M; ++i) {
    next[i] = config[i] + 0.5 * (increment(config, i) + increment(predict, i));
  }
  for (std::size_t i = 0; i < M; ++i) {
    const double len = norm(next[i]);
    if (!(len >= 0.5 && len <= 2.0)) {
      throw StepSizeTooLarge(fmt::format("spin {} left the sphere (norm {}) at t = {}", i, len, state.t));
    }
    config[i] = (1.0 / len) * next[i];
  }
  state.t += dt;
}

TrajectoryRecord run_sde(const SpinConfiguration& initial, const ModelParams& params,
                         const BrownianLattice& path, double T, const RecordOptions& options,
                         SDEScheme scheme, bool renormalize) {
  params.validate();
  if (initial.size() != static_cast<std::size_t>(params.M) || initial.model() != params.model) {
    throw InvalidInput("initial configuration does not match the model parameters");
  }
  check_step_size(params.dt, params.N);
  if (params.dt > recommended_dt(params.N)) {
    std::cerr << fmt::format("warning: dt = {} is above 1/(4N^2) = {}; energy decay is not guaranteed\n",
                             params.dt, recommended_dt(params.N));
  }
  const std::int64_t n_steps = step_count(T, params.dt);
  const BrownianLattice noise = match_resolution(path, params.dt);
  if (n_steps > noise.n_steps()) {
    throw InvalidInput(fmt::format("path holds {} steps, {} requested", noise.n_steps(), n_steps));
  }

  TrajectoryRecord rec;
  rec.source = "sde";
  rec.model = params.model;
  rec.N = params.N;
  rec.dt = params.dt;
  rec.seed = path.seed();

  SDEState state{initial, 0.0, params.dt, renormalize};
  std::vector<Vec3> dW(initial.size());
  auto now = [&](std::int64_t n) { return static_cast<double>(n) * params.dt; };
  auto record_scalars = [&](std::int64_t n) {
    rec.scalar_times.push_back(now(n));
    rec.energy.push_back(hamiltonian(state.config));
    rec.accept_rate.push_back(1.0);
  };
  rec.snapshot_times.push_back(0.0);
  rec.snapshots.push_back(state.config);
  record_scalars(0);
  rec.max_energy = rec.energy.back();

  for (std::int64_t n = 1; n <= n_steps; ++n) {
    noise.increments(n - 1, dW);
    if (scheme == SDEScheme::ItoEuler) {
      euler_step(state, params, dW);
    } else {
      heun_step(state, params, dW);
    }
    const bool scalar_due = options.scalar_every > 0 && n % options.scalar_every == 0;
    if (scalar_due) {
      record_scalars(n);
      rec.max_energy = std::max(rec.max_energy, rec.energy.back());
    }
    if ((options.snapshot_every > 0 && n % options.snapshot_every == 0) ||
        (n == n_steps && options.final_snapshot)) {
      rec.snapshot_times.push_back(now(n));
      rec.snapshots.push_back(state.config);
    }
  }
  rec.steps = n_steps;
  rec.accepted = n_steps;
  return rec;
}

}  // namespace spinflow
