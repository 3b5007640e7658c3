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

#include <stdexcept>
#include <string>

namespace spinflow {

/// Bad argument: wrong sizes, out-of-range index, non-unit spin, ...
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Operation not defined for the requested model (e.g. cross product on S^1).
class UnsupportedModel : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Normalization of a (near) zero vector.
class DegenerateStep : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-finite energy differences and similar numerical breakdowns.
class NumericalFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An explicit step moved a spin norm outside [0.5, 2]; dt is too large.
class StepSizeTooLarge : public NumericalFailure {
 public:
  using NumericalFailure::NumericalFailure;
};

/// Experiment configuration could not be resolved.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace spinflow
