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
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "spinflow/sphere.hpp"
#include "spinflow/vec3.hpp"

namespace spinflow {

enum class Model { XY, Heisenberg };

/// Number of ambient components of a spin: m + 1.
constexpr int components(Model model) { return model == Model::XY ? 2 : 3; }
/// Dimension m of the target sphere S^m.
constexpr int sphere_dim(Model model) { return components(model) - 1; }

std::string_view to_string(Model model);
Model parse_model(std::string_view name);

/// Physical and numerical parameters of a one-dimensional periodic chain.
///
/// Everything except (model, N, L, beta, dt) is derived: M = round(L·N),
/// J = N, eps = sqrt(N·dt/beta). beta may be +inf (noise off, eps = 0).
struct ModelParams {
  Model model = Model::XY;
  int N = 10;
  double L = 2.0;
  int M = 20;
  double J = 10.0;
  double beta = 1.0;
  std::optional<double> gamma;
  double dt = 1e-3;
  double eps = 0.0;

  static ModelParams make(Model model, int N, double L, double beta, double dt);
  static ModelParams with_gamma(Model model, int N, double L, double gamma, double dt);

  double spacing() const { return 1.0 / N; }
  /// Noise amplitude sqrt(N/beta) of the Langevin system; 0 when beta = inf.
  double noise_amplitude() const;
  /// Throws InvalidInput when the derived quantities are inconsistent.
  void validate() const;
};

/// Periodic chain of M unit spins with lattice spacing 1/N.
class SpinConfiguration {
 public:
  SpinConfiguration() = default;
  /// Validates unit norms (1e-9) and renormalizes to machine precision.
  SpinConfiguration(Model model, int N, std::vector<Vec3> spins);

  static SpinConfiguration trusted(Model model, int N, std::vector<Vec3> spins);

  Model model() const { return model_; }
  int N() const { return N_; }
  int components() const { return spinflow::components(model_); }
  std::size_t size() const { return spins_.size(); }
  double spacing() const { return 1.0 / N_; }
  double length() const { return static_cast<double>(spins_.size()) / N_; }

  const Vec3& operator[](std::size_t i) const { return spins_[i]; }
  Vec3& operator[](std::size_t i) { return spins_[i]; }
  SpinVector spin(std::size_t i) const { return SpinVector::trusted(spins_[i], components()); }

  std::size_t next(std::size_t i) const { return i + 1 == spins_.size() ? 0 : i + 1; }
  std::size_t prev(std::size_t i) const { return i == 0 ? spins_.size() - 1 : i - 1; }

  std::span<const Vec3> spins() const { return spins_; }
  std::span<Vec3> spins() { return spins_; }

  bool same_lattice(const SpinConfiguration& other) const {
    return model_ == other.model_ && N_ == other.N_ && spins_.size() == other.spins_.size();
  }

  /// Largest | ‖σ_i‖ − 1 | over the chain.
  double max_norm_defect() const;

 private:
  Model model_ = Model::XY;
  int N_ = 1;
  std::vector<Vec3> spins_;
};

/// H = J Σ_i ‖σ_i − σ_{i+1}‖² over the M periodic bonds, J = N.
double hamiltonian(const SpinConfiguration& config);

/// N²(σ_{i+1} + σ_{i−1} − 2σ_i).
Vec3 discrete_laplacian(const SpinConfiguration& config, std::size_t i);
/// N(σ_{i+1} − σ_i).
Vec3 forward_gradient(const SpinConfiguration& config, std::size_t i);
/// N(σ_i − σ_{i−1}).
Vec3 backward_gradient(const SpinConfiguration& config, std::size_t i);
/// ∂H/∂σ_i = 2J(2σ_i − σ_{i+1} − σ_{i−1}).
Vec3 hamiltonian_gradient(const SpinConfiguration& config, std::size_t i);

/// H(proposal) − H(config) through the exact quadratic expansion in the
/// displacements δ_j = proposal_j − config_j:
///   Σ ∂H/∂σ_j·δ_j + 2J Σ ‖δ_j‖² − J Σ δ_j·(δ_{j+1} + δ_{j−1}).
double delta_hamiltonian(const SpinConfiguration& config, const SpinConfiguration& proposal);

/// Σ_i ‖∇⁺σ_i‖² δx. Coincides with hamiltonian() for J = N.
double dirichlet_energy(const SpinConfiguration& config);

enum class InitialCondition { Aligned, NearEquilibrium, OutOfEquilibrium };

std::string_view to_string(InitialCondition kind);
InitialCondition parse_initial_condition(std::string_view name);
/// 0.1 near equilibrium, π/2 out of equilibrium, 0 for aligned.
double default_amplitude(InitialCondition kind);

/// Smooth periodic sine profile in angle coordinates.
///   XY:         θ_i = A sin(2π i δx / L)
///   Heisenberg: azimuth A sin(2π i δx / L), polar π/2 + (A/2) cos(2π i δx / L)
/// Aligned puts every spin at e_1.
SpinConfiguration make_initial_condition(InitialCondition kind, const ModelParams& params,
                                         std::optional<double> amplitude = std::nullopt);

/// Rotates every spin by the same orthogonal matrix (row-major 3x3).
SpinConfiguration rotate(const SpinConfiguration& config, const std::array<double, 9>& rotation);

/// `site,x,y[,z]` rows with 17 significant digits.
void write_snapshot_csv(std::ostream& out, const SpinConfiguration& config);
SpinConfiguration read_snapshot_csv(std::istream& in, Model model, int N);

}  // namespace spinflow
