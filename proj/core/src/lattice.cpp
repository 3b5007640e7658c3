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

#include "spinflow/lattice.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>

#include "spinflow/errors.hpp"
#include "spinflow/numerics.hpp"

namespace spinflow {

std::string_view to_string(Model model) { return model == Model::XY ? "xy" : "heisenberg"; }

Model parse_model(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  if (lower == "xy") return Model::XY;
  if (lower == "heisenberg") return Model::Heisenberg;
  throw ConfigError("unknown model '" + std::string(name) + "' (expected xy or heisenberg)");
}

ModelParams ModelParams::make(Model model, int N, double L, double beta, double dt) {
  ModelParams p;
  p.model = model;
  p.N = N;
  p.L = L;
  p.M = static_cast<int>(std::lround(L * N));
  p.J = N;
  p.beta = beta;
  p.dt = dt;
  if (std::isinf(beta)) {
    p.eps = 0.0;
  } else if (beta == 0.0) {
    p.eps = std::numeric_limits<double>::infinity();
  } else {
    p.eps = std::sqrt(N * dt / beta);
  }
  p.validate();
  return p;
}

ModelParams ModelParams::with_gamma(Model model, int N, double L, double gamma, double dt) {
  ModelParams p = make(model, N, L, std::pow(static_cast<double>(N), gamma), dt);
  p.gamma = gamma;
  return p;
}

double ModelParams::noise_amplitude() const {
  if (std::isinf(beta)) return 0.0;
  return std::sqrt(N / beta);
}

void ModelParams::validate() const {
  if (N <= 0) throw InvalidInput("N must be positive");
  if (!(L > 0.0)) throw InvalidInput("L must be positive");
  if (M < 3) throw InvalidInput("lattice needs at least 3 sites, got M = " + std::to_string(M));
  if (J != N) throw InvalidInput("J must equal N on a one-dimensional lattice");
  if (!(beta >= 0.0)) throw InvalidInput("beta must be non-negative");
  if (!(dt > 0.0)) throw InvalidInput("dt must be positive");
  if (std::isfinite(beta) && beta > 0.0) {
    const double target = N * dt;
    if (std::fabs(beta * eps * eps - target) > 1e-12 * target) {
      throw InvalidInput("proposal scaling beta*eps^2 = N*dt violated");
    }
  }
}

SpinConfiguration::SpinConfiguration(Model model, int N, std::vector<Vec3> spins)
    : model_(model), N_(N), spins_(std::move(spins)) {
  if (N <= 0) throw InvalidInput("N must be positive");
  if (spins_.size() < 3) throw InvalidInput("configuration needs at least 3 sites");
  for (auto& s : spins_) s = SpinVector(s, components()).vec();
}

SpinConfiguration SpinConfiguration::trusted(Model model, int N, std::vector<Vec3> spins) {
  SpinConfiguration c;
  c.model_ = model;
  c.N_ = N;
  c.spins_ = std::move(spins);
  return c;
}

double SpinConfiguration::max_norm_defect() const {
  double worst = 0.0;
  for (const auto& s : spins_) worst = std::max(worst, std::fabs(norm(s) - 1.0));
  return worst;
}

double hamiltonian(const SpinConfiguration& config) {
  CompensatedSum sum;
  for (std::size_t i = 0; i < config.size(); ++i) {
    sum += norm2(config[i] - config[config.next(i)]);
  }
  return config.N() * sum.value();
}

namespace {

void check_site(const SpinConfiguration& config, std::size_t i) {
  if (i >= config.size()) {
    throw InvalidInput(fmt::format("site index {} out of range [0, {})", i, config.size()));
  }
}

}  // namespace

Vec3 discrete_laplacian(const SpinConfiguration& config, std::size_t i) {
  check_site(config, i);
  const double n2 = static_cast<double>(config.N()) * config.N();
  return n2 * (config[config.next(i)] + config[config.prev(i)] - 2.0 * config[i]);
}

Vec3 forward_gradient(const SpinConfiguration& config, std::size_t i) {
  check_site(config, i);
  return static_cast<double>(config.N()) * (config[config.next(i)] - config[i]);
}

Vec3 backward_gradient(const SpinConfiguration& config, std::size_t i) {
  check_site(config, i);
  return static_cast<double>(config.N()) * (config[i] - config[config.prev(i)]);
}

Vec3 hamiltonian_gradient(const SpinConfiguration& config, std::size_t i) {
  check_site(config, i);
  const double J = config.N();
  return (2.0 * J) * (2.0 * config[i] - config[config.next(i)] - config[config.prev(i)]);
}

double delta_hamiltonian(const SpinConfiguration& config, const SpinConfiguration& proposal) {
  if (!config.same_lattice(proposal)) {
    throw InvalidInput("delta_hamiltonian: configurations live on different lattices");
  }
  const std::size_t M = config.size();
  const double J = config.N();
  CompensatedSum linear;
  CompensatedSum quadratic;
  for (std::size_t j = 0; j < M; ++j) {
    const std::size_t jn = config.next(j);
    const std::size_t jp = config.prev(j);
    const Vec3 grad = (2.0 * J) * (2.0 * config[j] - config[jn] - config[jp]);
    const Vec3 dj = proposal[j] - config[j];
    const Vec3 dn = proposal[jn] - config[jn];
    const Vec3 dp = proposal[jp] - config[jp];
    linear += dot(grad, dj);
    quadratic += 2.0 * J * norm2(dj) - J * dot(dj, dn + dp);
  }
  return linear.value() + quadratic.value();
}

double dirichlet_energy(const SpinConfiguration& config) {
  CompensatedSum sum;
  for (std::size_t i = 0; i < config.size(); ++i) sum += norm2(forward_gradient(config, i));
  return sum.value() * config.spacing();
}

std::string_view to_string(InitialCondition kind) {
  switch (kind) {
    case InitialCondition::Aligned:
      return "aligned";
    case InitialCondition::NearEquilibrium:
      return "near_equilibrium";
    case InitialCondition::OutOfEquilibrium:
      return "out_of_equilibrium";
  }
  return "?";
}

InitialCondition parse_initial_condition(std::string_view name) {
  if (name == "aligned") return InitialCondition::Aligned;
  if (name == "near_equilibrium" || name == "near") return InitialCondition::NearEquilibrium;
  if (name == "out_of_equilibrium" || name == "out") return InitialCondition::OutOfEquilibrium;
  throw ConfigError("unknown initial condition '" + std::string(name) + "'");
}

double default_amplitude(InitialCondition kind) {
  switch (kind) {
    case InitialCondition::Aligned:
      return 0.0;
    case InitialCondition::NearEquilibrium:
      return 0.1;
    case InitialCondition::OutOfEquilibrium:
      return std::numbers::pi / 2.0;
  }
  return 0.0;
}

SpinConfiguration make_initial_condition(InitialCondition kind, const ModelParams& params,
                                         std::optional<double> amplitude) {
  params.validate();
  const int M = params.M;
  std::vector<Vec3> spins(static_cast<std::size_t>(M), Vec3{1.0, 0.0, 0.0});
  if (kind != InitialCondition::Aligned) {
    const double A = amplitude.value_or(default_amplitude(kind));
    const double dx = params.spacing();
    for (int i = 0; i < M; ++i) {
      const double phase = 2.0 * std::numbers::pi * i * dx / params.L;
      if (params.model == Model::XY) {
        const double theta = A * std::sin(phase);
        spins[i] = {std::cos(theta), std::sin(theta), 0.0};
      } else {
        // An ellipse around e_x; a circle of radius π/2 would sit on a great
        // circle, which is a stationary point of the flow.
        const double azimuth = A * std::sin(phase);
        const double polar = std::numbers::pi / 2.0 + 0.5 * A * std::cos(phase);
        spins[i] = {std::sin(polar) * std::cos(azimuth), std::sin(polar) * std::sin(azimuth),
                    std::cos(polar)};
      }
    }
  }
  return SpinConfiguration(params.model, params.N, std::move(spins));
}

SpinConfiguration rotate(const SpinConfiguration& config, const std::array<double, 9>& R) {
  std::vector<Vec3> out(config.size());
  for (std::size_t i = 0; i < config.size(); ++i) {
    const Vec3& s = config[i];
    out[i] = {R[0] * s.x + R[1] * s.y + R[2] * s.z, R[3] * s.x + R[4] * s.y + R[5] * s.z,
              R[6] * s.x + R[7] * s.y + R[8] * s.z};
  }
  return SpinConfiguration(config.model(), config.N(), std::move(out));
}

void write_snapshot_csv(std::ostream& out, const SpinConfiguration& config) {
  const bool three = config.components() == 3;
  out << (three ? "site,x,y,z\n" : "site,x,y\n");
  for (std::size_t i = 0; i < config.size(); ++i) {
    const Vec3& s = config[i];
    if (three) {
      out << fmt::format("{},{:.17g},{:.17g},{:.17g}\n", i, s.x, s.y, s.z);
    } else {
      out << fmt::format("{},{:.17g},{:.17g}\n", i, s.x, s.y);
    }
  }
}

SpinConfiguration read_snapshot_csv(std::istream& in, Model model, int N) {
  std::string line;
  if (!std::getline(in, line)) throw InvalidInput("snapshot CSV is empty");
  const std::string expected = components(model) == 3 ? "site,x,y,z" : "site,x,y";
  if (line != expected) throw InvalidInput("snapshot CSV header '" + line + "', expected '" + expected + "'");
  std::vector<Vec3> spins;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream row(line);
    std::size_t site = 0;
    Vec3 s;
    row >> site >> s.x >> s.y;
    if (components(model) == 3) row >> s.z;
    if (!row) throw InvalidInput("malformed snapshot row: " + line);
    if (site != spins.size()) throw InvalidInput("snapshot rows are not in site order");
    spins.push_back(s);
  }
  return SpinConfiguration(model, N, std::move(spins));
}

}  // namespace spinflow
