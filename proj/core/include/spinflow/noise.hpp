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

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "spinflow/philox.hpp"
#include "spinflow/vec3.hpp"

namespace spinflow {

/// Default cap on materialized increments (doubles): 2^26, i.e. 512 MiB.
inline constexpr std::size_t kDefaultMemoryCap = std::size_t{1} << 26;

/// Per-site, per-component Wiener increments on a uniform time grid.
///
/// Fine increment (k, i, c) is sqrt(dt_ref)·Φ⁻¹(U(seed, k, i, c)) with U a
/// counter-based uniform. A coarsened lattice sums consecutive blocks of
/// its parent, so both describe the same Brownian path. Storage is either
/// materialized or regenerated on demand; the two agree bit-for-bit.
class BrownianLattice {
 public:
  std::uint64_t seed() const { return seed_; }
  std::size_t sites() const { return sites_; }
  int components() const { return components_; }
  /// Time step of one increment of this lattice.
  double dt() const { return dt_; }
  /// Time step of the underlying fine increments.
  double dt_ref() const { return dt_ref_; }
  std::int64_t n_steps() const { return n_steps_; }
  /// Fine increments per increment of this lattice.
  std::int64_t factor() const;
  bool materialized() const { return !data_.empty(); }

  /// W_i((n+1)dt) − W_i(n dt). Throws InvalidInput when out of range.
  Vec3 increment(std::int64_t step, std::size_t site) const;
  /// All sites of one step.
  void increments(std::int64_t step, std::span<Vec3> out) const;

  friend BrownianLattice generate(std::uint64_t seed, std::size_t sites, int components,
                                  double dt_ref, std::int64_t n_steps, std::size_t memory_cap);
  friend BrownianLattice coarsen(const BrownianLattice& path, std::int64_t factor);

 private:
  BrownianLattice() = default;
  Vec3 fine_increment(std::int64_t k, std::size_t site) const;
  Vec3 stream_increment(std::size_t level, std::int64_t step, std::size_t site) const;

  std::uint64_t seed_ = 0;
  std::size_t sites_ = 0;
  int components_ = 0;
  double dt_ref_ = 0.0;
  double dt_ = 0.0;
  std::int64_t n_steps_ = 0;
  // Coarsening chain, innermost first; empty for a fine lattice.
  std::vector<std::int64_t> factors_;
  std::vector<Vec3> data_;
};

/// Fine Brownian increments. Materialized when n_steps·sites·components
/// fits under `memory_cap` doubles, otherwise streamed from the generator.
BrownianLattice generate(std::uint64_t seed, std::size_t sites, int components, double dt_ref,
                         std::int64_t n_steps, std::size_t memory_cap = kDefaultMemoryCap);

/// Sums blocks of `factor` consecutive increments. `factor` must divide
/// n_steps.
BrownianLattice coarsen(const BrownianLattice& path, std::int64_t factor);

/// Standard-normal proposal noise w_i^n = ΔW_i^n / sqrt(dt).
Vec3 mh_noise(const BrownianLattice& path, std::int64_t step, std::size_t site);

/// Uniform used for the Metropolis accept/reject of step `step`. Drawn
/// from a stream disjoint from the Brownian increments.
double accept_uniform(std::uint64_t seed, std::int64_t step);

/// Decorrelated per-realization seed.
std::uint64_t realization_seed(std::uint64_t base_seed, std::uint64_t realization);

}  // namespace spinflow
