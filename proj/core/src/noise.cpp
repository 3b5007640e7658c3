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

#include "spinflow/noise.hpp"

#include <fmt/format.h>

#include <cmath>

#include "spinflow/errors.hpp"

namespace spinflow {

std::int64_t BrownianLattice::factor() const {
  std::int64_t f = 1;
  for (auto k : factors_) f *= k;
  return f;
}

Vec3 BrownianLattice::fine_increment(std::int64_t k, std::size_t site) const {
  const CounterRng rng(seed_);
  const double scale = std::sqrt(dt_ref_);
  const auto idx = static_cast<std::uint64_t>(k);
  const auto lane = static_cast<std::uint32_t>(site);
  Vec3 v;
  for (int c = 0; c < components_; ++c) {
    v[static_cast<std::size_t>(c)] = scale * rng.normal(Stream::kBrownian, idx, lane, static_cast<std::uint32_t>(c));
  }
  return v;
}

// Increment `step` of the lattice obtained after `level` coarsenings.
Vec3 BrownianLattice::stream_increment(std::size_t level, std::int64_t step, std::size_t site) const {
  if (level == 0) return fine_increment(step, site);
  const std::int64_t f = factors_[level - 1];
  Vec3 acc;
  for (std::int64_t j = 0; j < f; ++j) acc += stream_increment(level - 1, step * f + j, site);
  return acc;
}

Vec3 BrownianLattice::increment(std::int64_t step, std::size_t site) const {
  if (step < 0 || step >= n_steps_ || site >= sites_) {
    throw InvalidInput(fmt::format("Brownian increment ({}, {}) out of range [0, {}) x [0, {})", step,
                                   site, n_steps_, sites_));
  }
  if (materialized()) return data_[static_cast<std::size_t>(step) * sites_ + site];
  return stream_increment(factors_.size(), step, site);
}

void BrownianLattice::increments(std::int64_t step, std::span<Vec3> out) const {
  if (out.size() != sites_) throw InvalidInput("increments: output span has wrong size");
  if (step < 0 || step >= n_steps_) {
    throw InvalidInput(fmt::format("Brownian step {} out of range [0, {})", step, n_steps_));
  }
  if (materialized()) {
    const Vec3* row = data_.data() + static_cast<std::size_t>(step) * sites_;
    std::copy(row, row + sites_, out.begin());
    return;
  }
  for (std::size_t i = 0; i < sites_; ++i) out[i] = stream_increment(factors_.size(), step, i);
}

BrownianLattice generate(std::uint64_t seed, std::size_t sites, int components, double dt_ref,
                         std::int64_t n_steps, std::size_t memory_cap) {
  if (!(dt_ref > 0.0)) throw InvalidInput("generate: dt_ref must be positive");
  if (n_steps < 0) throw InvalidInput("generate: negative step count");
  if (components != 2 && components != 3) throw InvalidInput("generate: components must be 2 or 3");
  BrownianLattice path;
  path.seed_ = seed;
  path.sites_ = sites;
  path.components_ = components;
  path.dt_ref_ = dt_ref;
  path.dt_ = dt_ref;
  path.n_steps_ = n_steps;
  const auto entries = static_cast<std::size_t>(n_steps) * sites * static_cast<std::size_t>(components);
  if (entries <= memory_cap) {
    path.data_.resize(static_cast<std::size_t>(n_steps) * sites);
    for (std::int64_t k = 0; k < n_steps; ++k) {
      for (std::size_t i = 0; i < sites; ++i) {
        path.data_[static_cast<std::size_t>(k) * sites + i] = path.fine_increment(k, i);
      }
    }
  }
  return path;
}

BrownianLattice coarsen(const BrownianLattice& path, std::int64_t factor) {
  if (factor <= 0) throw InvalidInput("coarsen: factor must be positive");
  if (path.n_steps_ % factor != 0) {
    throw InvalidInput(fmt::format("coarsen: factor {} does not divide {} steps", factor, path.n_steps_));
  }
  if (factor == 1) return path;
  BrownianLattice out;
  out.seed_ = path.seed_;
  out.sites_ = path.sites_;
  out.components_ = path.components_;
  out.dt_ref_ = path.dt_ref_;
  out.dt_ = path.dt_ * static_cast<double>(factor);
  out.n_steps_ = path.n_steps_ / factor;
  out.factors_ = path.factors_;
  out.factors_.push_back(factor);
  if (path.materialized()) {
    const std::size_t M = path.sites_;
    out.data_.resize(static_cast<std::size_t>(out.n_steps_) * M);
    for (std::int64_t n = 0; n < out.n_steps_; ++n) {
      Vec3* dst = out.data_.data() + static_cast<std::size_t>(n) * M;
      for (std::int64_t j = 0; j < factor; ++j) {
        const Vec3* src = path.data_.data() + static_cast<std::size_t>(n * factor + j) * M;
        for (std::size_t i = 0; i < M; ++i) dst[i] += src[i];
      }
    }
  }
  return out;
}

Vec3 mh_noise(const BrownianLattice& path, std::int64_t step, std::size_t site) {
  return (1.0 / std::sqrt(path.dt())) * path.increment(step, site);
}

double accept_uniform(std::uint64_t seed, std::int64_t step) {
  return CounterRng(seed).uniform(Stream::kAccept, static_cast<std::uint64_t>(step), 0);
}

std::uint64_t realization_seed(std::uint64_t base_seed, std::uint64_t realization) {
  // splitmix64 finalizer
  std::uint64_t z = base_seed + 0x9E3779B97F4A7C15ull * (realization + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

}  // namespace spinflow
