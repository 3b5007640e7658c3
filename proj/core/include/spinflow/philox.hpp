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

#include <array>
#include <cstdint>

namespace spinflow {

/// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
///
/// Stateless: the output is a pure function of (key, counter), so any
/// random number in a simulation can be regenerated from its coordinates
/// without replaying a stream.
class Philox4x32 {
 public:
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  explicit constexpr Philox4x32(std::uint64_t seed)
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)} {}
  explicit constexpr Philox4x32(Key key) : key_(key) {}

  Counter operator()(Counter ctr) const;

  constexpr Key key() const { return key_; }

 private:
  Key key_;
};

/// Independent substreams of one seed. Values are baked into the counter
/// layout, so changing them changes every realization.
enum class Stream : std::uint32_t {
  kBrownian = 0,
  kAccept = 1,
  kValidator = 2,
  kValidatorAccept = 3,
  kInitialCondition = 4,
  kTest = 15,
};

/// Map 52 high bits of `bits` to the open interval (0, 1); the extreme
/// values are 2^-53 and 1 - 2^-53.
constexpr double to_open_unit(std::uint64_t bits) {
  return (static_cast<double>(bits >> 12) + 0.5) * 0x1.0p-52;
}

/// Standard normal quantile function, Wichura's AS241 (PPND16); relative
/// accuracy about 1e-16 on (0, 1).
double normal_quantile(double p);

/// Counter-addressed uniforms and Gaussians for one seed.
///
/// A draw is addressed by (stream, index, lane, component). `index` is
/// usually a time step, `lane` a lattice site or trial.
class CounterRng {
 public:
  explicit constexpr CounterRng(std::uint64_t seed) : philox_(seed) {}

  double uniform(Stream stream, std::uint64_t index, std::uint32_t lane,
                 std::uint32_t component = 0) const {
    const auto out = philox_(counter(stream, index, lane, component));
    const std::uint64_t bits = (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
    return to_open_unit(bits);
  }

  double normal(Stream stream, std::uint64_t index, std::uint32_t lane,
                std::uint32_t component = 0) const {
    return normal_quantile(uniform(stream, index, lane, component));
  }

 private:
  static constexpr Philox4x32::Counter counter(Stream stream, std::uint64_t index,
                                               std::uint32_t lane, std::uint32_t component) {
    return {static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32), lane,
            (static_cast<std::uint32_t>(stream) << 24) | (component & 0xFFFFFFu)};
  }

  Philox4x32 philox_;
};

}  // namespace spinflow
