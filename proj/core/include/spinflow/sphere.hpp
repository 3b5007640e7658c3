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
#include <limits>

#include "spinflow/vec3.hpp"

namespace spinflow {

/// Unit vector in R^{m+1}, m = 1 (XY, two components) or m = 2
/// (Heisenberg, three components). Two-component spins keep z == 0.
class SpinVector {
 public:
  /// Accepts `v` if its norm is within 1e-9 of one and rescales it to unit
  /// norm; throws InvalidInput otherwise.
  SpinVector(const Vec3& v, int components);

  /// Projects any non-degenerate vector onto the sphere; throws
  /// DegenerateStep if ‖v‖ <= 1e-12.
  static SpinVector normalize(const Vec3& v, int components);

  /// Skips validation. Caller guarantees the invariant.
  static SpinVector trusted(const Vec3& v, int components) { return SpinVector(v, components, Trusted{}); }

  const Vec3& vec() const { return v_; }
  int components() const { return components_; }
  int sphere_dim() const { return components_ - 1; }

  double operator[](int k) const { return v_[static_cast<std::size_t>(k)]; }

 private:
  struct Trusted {};
  SpinVector(const Vec3& v, int components, Trusted) : v_(v), components_(components) {}

  Vec3 v_;
  int components_;
};

/// v − (v·σ)σ.
Vec3 tangent_project(const SpinVector& sigma, const Vec3& v);

/// σ × v; three-component spins only (UnsupportedModel otherwise).
Vec3 cross_project(const SpinVector& sigma, const Vec3& v);

/// Great-circle step cos(‖v‖)σ + sin(‖v‖)v/‖v‖. `v` must be tangent to σ
/// (|v·σ| <= 1e-9‖v‖). Returns σ verbatim for ‖v‖ < 1e-15.
SpinVector exp_map(const SpinVector& sigma, const Vec3& v);

/// (σ + w)/‖σ + w‖.
SpinVector normalized_step(const SpinVector& sigma, const Vec3& w);

/// Differences between the exact geodesic proposal and its cheaper
/// approximations, for a tangent kick εν:
///   a = exp − normalized,  c = exp − (σ + εν),
///   d = exp − (σ + εν − ½‖εν‖²σ).
struct TaylorResiduals {
  Vec3 a;
  Vec3 c;
  Vec3 d;
};

TaylorResiduals taylor_residuals(const SpinVector& sigma, const Vec3& eps_nu);

// Unchecked kernels for the inner loops of the samplers and integrators.
namespace kernel {

inline Vec3 project(const Vec3& sigma, const Vec3& v) { return v - dot(v, sigma) * sigma; }

inline Vec3 exp_step(const Vec3& sigma, const Vec3& v) {
  const double len = norm(v);
  if (len < 1e-15) return sigma;
  return std::cos(len) * sigma + (std::sin(len) / len) * v;
}

inline Vec3 normalize(const Vec3& v) {
  const double len = norm(v);
  return std::fabs(len - 1.0) <= 4 * std::numeric_limits<double>::epsilon() ? v : (1.0 / len) * v;
}

}  // namespace kernel

}  // namespace spinflow
