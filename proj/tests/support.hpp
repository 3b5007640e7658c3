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

#include <cmath>
#include <random>
#include <vector>

#include "spinflow/lattice.hpp"
#include "spinflow/vec3.hpp"

namespace spinflow::testing {

inline Vec3 random_unit(int components, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  Vec3 v{g(rng), g(rng), components == 3 ? g(rng) : 0.0};
  return (1.0 / norm(v)) * v;
}

inline Vec3 random_vec(int components, std::mt19937_64& rng, double scale = 1.0) {
  std::normal_distribution<double> g(0.0, scale);
  return {g(rng), g(rng), components == 3 ? g(rng) : 0.0};
}

inline SpinConfiguration random_config(Model model, int N, std::size_t M, std::mt19937_64& rng) {
  std::vector<Vec3> s(M);
  for (auto& v : s) v = random_unit(components(model), rng);
  return SpinConfiguration(model, N, std::move(s));
}

/// Brute-force H straight from the definition, no shared code with the library.
inline double brute_hamiltonian(const SpinConfiguration& c) {
  long double h = 0.0L;
  const std::size_t M = c.size();
  for (std::size_t i = 0; i < M; ++i) {
    const std::size_t j = (i + 1) % M;
    for (int k = 0; k < 3; ++k) {
      const long double d = static_cast<long double>(c[i][k]) - c[j][k];
      h += d * d;
    }
  }
  return static_cast<double>(h * c.N());
}

/// Rotation about axis `u` by angle `a`, row-major.
inline std::array<double, 9> rotation(Vec3 u, double a) {
  u = (1.0 / norm(u)) * u;
  const double c = std::cos(a), s = std::sin(a), t = 1.0 - c;
  return {t * u.x * u.x + c,       t * u.x * u.y - s * u.z, t * u.x * u.z + s * u.y,
          t * u.x * u.y + s * u.z, t * u.y * u.y + c,       t * u.y * u.z - s * u.x,
          t * u.x * u.z - s * u.y, t * u.y * u.z + s * u.x, t * u.z * u.z + c};
}

inline std::array<double, 9> planar_rotation(double a) { return rotation({0, 0, 1}, a); }

}  // namespace spinflow::testing
