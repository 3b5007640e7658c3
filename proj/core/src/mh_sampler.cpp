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

#include "spinflow/mh_sampler.hpp"

#include <fmt/format.h>

#include <cmath>
#include <vector>

#include "spinflow/errors.hpp"
#include "spinflow/sphere.hpp"

namespace spinflow {

std::string_view to_string(ProposalKind kind) {
  return kind == ProposalKind::Normalized ? "normalized" : "exponential";
}

ProposalKind parse_proposal_kind(std::string_view name) {
  if (name == "normalized") return ProposalKind::Normalized;
  if (name == "exponential" || name == "exp") return ProposalKind::Exponential;
  throw ConfigError("unknown proposal kind '" + std::string(name) + "'");
}

MHState MHState::start(SpinConfiguration initial, ProposalKind kind) {
  MHState s;
  s.energy = hamiltonian(initial);
  s.config = std::move(initial);
  s.proposal_kind = kind;
  return s;
}

void propose_from_noise(const SpinConfiguration& config, double eps, std::span<const Vec3> w,
                        ProposalKind kind, SpinConfiguration& out) {
  if (w.size() != config.size()) throw InvalidInput("proposal noise has the wrong number of sites");
  if (!out.same_lattice(config)) out = config;
  for (std::size_t i = 0; i < config.size(); ++i) {
    const Vec3& s = config[i];
    const Vec3 kick = eps * kernel::project(s, w[i]);
    out[i] = kind == ProposalKind::Exponential ? kernel::exp_step(s, kick) : kernel::normalize(s + kick);
  }
}

SpinConfiguration propose_from_noise(const SpinConfiguration& config, double eps,
                                     std::span<const Vec3> w, ProposalKind kind) {
  SpinConfiguration out = config;
  propose_from_noise(config, eps, w, kind, out);
  return out;
}

SpinConfiguration propose(const MHState& state, double eps, const BrownianLattice& path) {
  std::vector<Vec3> w(state.config.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = mh_noise(path, state.step, i);
  return propose_from_noise(state.config, eps, w, state.proposal_kind);
}

double acceptance_probability(double beta, double delta_h) {
  if (beta == 0.0 || delta_h <= 0.0) return 1.0;
  if (std::isinf(beta)) return 0.0;
  return std::exp(-beta * delta_h);
}

namespace {

struct StepScratch {
  std::vector<Vec3> w;
  SpinConfiguration proposal;
};

StepScratch& scratch() {
  thread_local StepScratch s;
  return s;
}

}  // namespace

MHStepResult mh_step(MHState& state, const ModelParams& params, const BrownianLattice& path, double u) {
  auto& buf = scratch();
  const std::size_t M = state.config.size();
  buf.w.resize(M);
  const double inv_sqrt_dt = 1.0 / std::sqrt(path.dt());
  path.increments(state.step, buf.w);
  for (auto& v : buf.w) v *= inv_sqrt_dt;
  propose_from_noise(state.config, params.eps, buf.w, state.proposal_kind, buf.proposal);

  MHStepResult result;
  result.delta_h = delta_hamiltonian(state.config, buf.proposal);
  if (!std::isfinite(result.delta_h)) {
    throw NumericalFailure(fmt::format("non-finite energy difference at step {}", state.step));
  }
  result.acceptance_probability = acceptance_probability(params.beta, result.delta_h);
  result.accepted = u < result.acceptance_probability;
  if (result.accepted) {
    std::swap(state.config, buf.proposal);
    ++state.accept_count;
    state.energy += result.delta_h;
    if (++state.accepted_since_refresh >= MHState::kEnergyRefresh) {
      state.energy = hamiltonian(state.config);
      state.accepted_since_refresh = 0;
    }
  }
  ++state.step;
  return result;
}

MHStepResult mh_step(MHState& state, const ModelParams& params, const BrownianLattice& path) {
  return mh_step(state, params, path, accept_uniform(path.seed(), state.step));
}

BrownianLattice match_resolution(const BrownianLattice& path, double dt) {
  const double ratio = dt / path.dt();
  const auto factor = static_cast<std::int64_t>(std::llround(ratio));
  if (factor < 1 || std::fabs(ratio - static_cast<double>(factor)) > 1e-9 * ratio) {
    throw InvalidInput(fmt::format("time step {} is not a multiple of the path resolution {}", dt, path.dt()));
  }
  return coarsen(path, factor);
}

TrajectoryRecord run_mh(const SpinConfiguration& initial, const ModelParams& params,
                        const BrownianLattice& path, std::int64_t n_steps, const RecordOptions& options,
                        ProposalKind kind) {
  params.validate();
  if (initial.size() != static_cast<std::size_t>(params.M) || initial.model() != params.model) {
    throw InvalidInput("initial configuration does not match the model parameters");
  }
  const BrownianLattice noise = match_resolution(path, params.dt);
  if (n_steps > noise.n_steps()) {
    throw InvalidInput(fmt::format("path holds {} steps, {} requested", noise.n_steps(), n_steps));
  }
  if (noise.sites() != initial.size()) throw InvalidInput("path and lattice have different site counts");

  TrajectoryRecord rec;
  rec.source = "mh";
  rec.model = params.model;
  rec.N = params.N;
  rec.dt = params.dt;
  rec.seed = path.seed();

  MHState state = MHState::start(initial, kind);
  auto record_scalars = [&] {
    rec.scalar_times.push_back(static_cast<double>(state.step) * params.dt);
    rec.energy.push_back(state.energy);
    rec.accept_rate.push_back(state.acceptance_rate());
  };
  auto record_snapshot = [&] {
    rec.snapshot_times.push_back(static_cast<double>(state.step) * params.dt);
    rec.snapshots.push_back(state.config);
  };
  record_snapshot();
  record_scalars();
  rec.max_energy = state.energy;

  for (std::int64_t n = 0; n < n_steps; ++n) {
    mh_step(state, params, noise);
    rec.max_energy = std::max(rec.max_energy, state.energy);
    const bool last = state.step == n_steps;
    if (options.scalar_every > 0 && state.step % options.scalar_every == 0) record_scalars();
    if ((options.snapshot_every > 0 && state.step % options.snapshot_every == 0) ||
        (last && options.final_snapshot)) {
      if (rec.snapshot_times.back() != static_cast<double>(state.step) * params.dt) record_snapshot();
    }
  }
  rec.steps = state.step;
  rec.accepted = state.accept_count;
  return rec;
}

}  // namespace spinflow
