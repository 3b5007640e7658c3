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

#include "spinflow/sphere.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "spinflow/errors.hpp"

namespace spinflow {
namespace {

constexpr double kUnitTolerance = 1e-9;
constexpr double kTangentTolerance = 1e-9;

void check_components(const Vec3& v, int components) {
  if (components != 2 && components != 3) {
    throw InvalidInput("spin must have 2 or 3 components, got " + std::to_string(components));
  }
  if (components == 2 && v.z != 0.0) {
    throw InvalidInput("two-component spin has a non-zero z entry");
  }
}

}  // namespace

SpinVector::SpinVector(const Vec3& v, int components) : components_(components) {
  check_components(v, components);
  const double len = norm(v);
  if (!(std::fabs(len - 1.0) <= kUnitTolerance)) {
    throw InvalidInput("spin is not a unit vector: |sigma| = " + std::to_string(len));
  }
  // Already unit to rounding: rescaling would only shuffle the last bits.
  v_ = std::fabs(len - 1.0) <= 4 * std::numeric_limits<double>::epsilon() ? v : (1.0 / len) * v;
}

SpinVector SpinVector::normalize(const Vec3& v, int components) {
  check_components(v, components);
  const double len = norm(v);
  if (!(len > 1e-12)) throw DegenerateStep("cannot normalize a vector of norm " + std::to_string(len));
  return trusted(std::fabs(len - 1.0) <= 4 * std::numeric_limits<double>::epsilon() ? v : (1.0 / len) * v,
                 components);
}

Vec3 tangent_project(const SpinVector& sigma, const Vec3& v) {
  if (sigma.components() == 2 && v.z != 0.0) {
    throw InvalidInput("two-component projection given a vector with z != 0");
  }
  return kernel::project(sigma.vec(), v);
}

Vec3 cross_project(const SpinVector& sigma, const Vec3& v) {
  if (sigma.components() != 3) {
    throw UnsupportedModel("cross-product projection is only defined on S^2");
  }
  return cross(sigma.vec(), v);
}

SpinVector exp_map(const SpinVector& sigma, const Vec3& v) {
  const double len = norm(v);
  if (std::fabs(dot(v, sigma.vec())) > kTangentTolerance * len) {
    throw InvalidInput("exp_map: vector is not tangent to sigma");
  }
  if (sigma.components() == 2 && v.z != 0.0) {
    throw InvalidInput("exp_map: two-component spin given a vector with z != 0");
  }
  return SpinVector::trusted(kernel::exp_step(sigma.vec(), v), sigma.components());
}

SpinVector normalized_step(const SpinVector& sigma, const Vec3& w) {
  return SpinVector::normalize(sigma.vec() + w, sigma.components());
}

TaylorResiduals taylor_residuals(const SpinVector& sigma, const Vec3& eps_nu) {
  const Vec3 geodesic = exp_map(sigma, eps_nu).vec();
  const Vec3 normalized = normalized_step(sigma, eps_nu).vec();
  const Vec3& s = sigma.vec();
  const Vec3 linear = s + eps_nu;
  const Vec3 quadratic = linear - (0.5 * norm2(eps_nu)) * s;
  return {geodesic - normalized, geodesic - linear, geodesic - quadratic};
}

}  // namespace spinflow
