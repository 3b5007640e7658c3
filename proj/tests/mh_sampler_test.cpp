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

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "spinflow/errors.hpp"
#include "support.hpp"

namespace spinflow {
namespace {

using testing::brute_hamiltonian;
using testing::random_config;

TEST(AcceptanceProbability, Cases) {
  EXPECT_EQ(acceptance_probability(10.0, -1.0), 1.0);
  EXPECT_EQ(acceptance_probability(10.0, 0.0), 1.0);
  EXPECT_EQ(acceptance_probability(0.0, 1e300), 1.0);
  EXPECT_EQ(acceptance_probability(std::numeric_limits<double>::infinity(), 1e-300), 0.0);
  EXPECT_EQ(acceptance_probability(std::numeric_limits<double>::infinity(), -1.0), 1.0);
  EXPECT_DOUBLE_EQ(acceptance_probability(2.0, 0.5), std::exp(-1.0));
}

TEST(Propose, ZeroEpsIsIdentity) {
  std::mt19937_64 rng(1);
  const auto c = random_config(Model::Heisenberg, 10, 20, rng);
  std::vector<Vec3> w(20);
  for (auto& v : w) v = testing::random_vec(3, rng);
  for (auto kind : {ProposalKind::Normalized, ProposalKind::Exponential}) {
    const auto p = propose_from_noise(c, 0.0, w, kind);
    for (std::size_t i = 0; i < 20; ++i) EXPECT_EQ(p[i], c[i]);
  }
}

TEST(Propose, RadialNoiseIsKilled) {
  std::mt19937_64 rng(2);
  const auto c = random_config(Model::Heisenberg, 10, 20, rng);
  std::vector<Vec3> w(20);
  for (std::size_t i = 0; i < 20; ++i) w[i] = (1.0 + i) * c[i];
  for (auto kind : {ProposalKind::Normalized, ProposalKind::Exponential}) {
    const auto p = propose_from_noise(c, 0.3, w, kind);
    for (std::size_t i = 0; i < 20; ++i) EXPECT_NEAR(norm(p[i] - c[i]), 0.0, 1e-14);
  }
}

TEST(Propose, KindsAgreeToThirdOrder) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const Model model = trial % 2 ? Model::Heisenberg : Model::XY;
    const auto c = random_config(model, 10, 20, rng);
    std::vector<Vec3> w(20);
    for (auto& v : w) v = testing::random_vec(components(model), rng);
    const double eps = 0.005 * (1 + trial % 10);
    const auto pn = propose_from_noise(c, eps, w, ProposalKind::Normalized);
    const auto pe = propose_from_noise(c, eps, w, ProposalKind::Exponential);
    for (std::size_t i = 0; i < 20; ++i) {
      const double step = eps * norm(kernel::project(c[i], w[i]));
      EXPECT_LE(norm(pn[i] - pe[i]), std::pow(step, 3) + 1e-16);
    }
  }
}

TEST(Propose, UsesSharedPathNoise) {
  const auto params = ModelParams::with_gamma(Model::Heisenberg, 10, 2.0, 1.5, 1e-3);
  const auto c = make_initial_condition(InitialCondition::OutOfEquilibrium, params);
  const auto path = generate(9, 20, 3, 1e-3, 5);
  auto state = MHState::start(c);
  state.step = 3;
  const auto p = propose(state, params.eps, path);
  for (std::size_t i = 0; i < 20; ++i) {
    const Vec3 want = kernel::normalize(c[i] + params.eps * kernel::project(c[i], mh_noise(path, 3, i)));
    EXPECT_NEAR(norm(p[i] - want), 0.0, 1e-15);
  }
}

TEST(MhStep, ZeroBetaAlwaysAccepts) {
  auto params = ModelParams::make(Model::XY, 10, 2.0, 0.0, 1e-3);
  params.eps = 0.3;  // β = 0 leaves ε free; pick a large one
  const auto path = generate(4, 20, 2, 1e-3, 200);
  auto state = MHState::start(make_initial_condition(InitialCondition::OutOfEquilibrium, params));
  for (int k = 0; k < 200; ++k) EXPECT_TRUE(mh_step(state, params, path).accepted);
  EXPECT_EQ(state.accept_count, 200);
}

TEST(MhStep, DownhillMovesAlwaysAccepted) {
  const auto params = ModelParams::make(Model::Heisenberg, 10, 2.0, 1e6, 1e-3);
  const auto path = generate(5, 20, 3, 1e-3, 500);
  auto state = MHState::start(make_initial_condition(InitialCondition::OutOfEquilibrium, params));
  int downhill = 0;
  for (int k = 0; k < 500; ++k) {
    const auto r = mh_step(state, params, path, 1.0 - 1e-16);
    if (r.delta_h <= 0) {
      ++downhill;
      EXPECT_TRUE(r.accepted);
    } else {
      EXPECT_FALSE(r.accepted);
    }
  }
  EXPECT_GT(downhill, 0);
}

// Hand replay on a 4-site XY chain: proposal, brute-force δH and the
// recorded uniform decide each step.
TEST(MhStep, ScriptedReplay) {
  const auto params = ModelParams::make(Model::XY, 2, 2.0, 0.5, 0.05);
  ASSERT_EQ(params.M, 4);
  const double r = 1.0 / std::sqrt(2.0);
  const SpinConfiguration init(Model::XY, 2, {{1, 0, 0}, {r, r, 0}, {0, 1, 0}, {-r, r, 0}});
  const std::uint64_t seed = 31337;
  const auto path = generate(seed, 4, 2, params.dt, 200);
  auto state = MHState::start(init);
  std::vector<Vec3> oracle(init.spins().begin(), init.spins().end());
  int accepted = 0, rejected = 0;
  for (std::int64_t n = 0; n < 200; ++n) {
    std::vector<Vec3> prop(4);
    for (std::size_t i = 0; i < 4; ++i) {
      const Vec3 w = path.increment(n, i) * (1.0 / std::sqrt(params.dt));
      const Vec3 nu = w - dot(w, oracle[i]) * oracle[i];
      const Vec3 y = oracle[i] + params.eps * nu;
      prop[i] = (1.0 / std::sqrt(y.x * y.x + y.y * y.y)) * y;
    }
    const double dh = brute_hamiltonian(SpinConfiguration::trusted(Model::XY, 2, prop)) -
                      brute_hamiltonian(SpinConfiguration::trusted(Model::XY, 2, oracle));
    const double u = accept_uniform(seed, n);
    const bool accept = u < std::min(1.0, std::exp(-params.beta * dh));
    const auto res = mh_step(state, params, path);
    ASSERT_EQ(res.accepted, accept) << "step " << n;
    EXPECT_NEAR(res.delta_h, dh, 1e-10 * std::max(1.0, std::fabs(dh)));
    if (accept) {
      oracle = prop;
      ++accepted;
    } else {
      ++rejected;
    }
    for (std::size_t i = 0; i < 4; ++i) ASSERT_NEAR(norm(state.config[i] - oracle[i]), 0.0, 1e-12);
  }
  EXPECT_GT(accepted, 0);
  EXPECT_GT(rejected, 0);
  EXPECT_EQ(state.step, 200);
}

TEST(MhStep, UnitNormEveryStep) {
  for (auto kind : {ProposalKind::Normalized, ProposalKind::Exponential}) {
    for (Model model : {Model::XY, Model::Heisenberg}) {
      const auto params = ModelParams::make(model, 10, 2.0, 5.0, 1e-2);
      const auto path = generate(6, 20, components(model), params.dt, 2000);
      auto state = MHState::start(make_initial_condition(InitialCondition::OutOfEquilibrium, params), kind);
      for (int k = 0; k < 2000; ++k) {
        mh_step(state, params, path);
        ASSERT_LE(state.config.max_norm_defect(), 1e-12);
        ASSERT_LE(state.accept_count, state.step);
      }
    }
  }
}

TEST(MhStep, TrackedEnergyStaysExact) {
  const auto params = ModelParams::make(Model::Heisenberg, 10, 2.0, 2.0, 1e-2);
  const auto path = generate(7, 20, 3, params.dt, 20000, 0);
  auto state = MHState::start(make_initial_condition(InitialCondition::OutOfEquilibrium, params));
  for (int k = 0; k < 20000; ++k) mh_step(state, params, path);
  EXPECT_NEAR(state.energy, hamiltonian(state.config), 1e-9 * hamiltonian(state.config));
}

TEST(RunMh, ZeroStepsRecordsInitialOnly) {
  const auto params = ModelParams::with_gamma(Model::XY, 10, 2.0, 1.5, 1e-3);
  const auto init = make_initial_condition(InitialCondition::OutOfEquilibrium, params);
  const auto rec = run_mh(init, params, generate(1, 20, 2, 1e-3, 10), 0, {});
  ASSERT_EQ(rec.snapshots.size(), 1u);
  EXPECT_EQ(rec.snapshot_times[0], 0.0);
  EXPECT_EQ(rec.steps, 0);
  for (std::size_t i = 0; i < 20; ++i) EXPECT_EQ(rec.snapshots[0][i], init[i]);
}

TEST(RunMh, RejectedStepsAdvanceTheNoiseClock) {
  // With β = inf every uphill proposal is rejected, yet step n still reads
  // increment n of the path.
  auto params = ModelParams::make(Model::XY, 10, 2.0, 1e12, 1e-3);
  const auto init = make_initial_condition(InitialCondition::OutOfEquilibrium, params);
  const auto path = generate(3, 20, 2, 1e-3, 100);
  const auto rec = run_mh(init, params, path, 100, {});
  EXPECT_EQ(rec.steps, 100);
  EXPECT_LT(rec.accepted, 100);
  auto state = MHState::start(init);
  for (int n = 0; n < 100; ++n) mh_step(state, params, path);
  for (std::size_t i = 0; i < 20; ++i) EXPECT_EQ(rec.final_state()[i], state.config[i]);
}

TEST(RunMh, CoarsensFinerPath) {
  const auto params = ModelParams::with_gamma(Model::XY, 10, 2.0, 1.5, 1e-3);
  const auto init = make_initial_condition(InitialCondition::OutOfEquilibrium, params);
  const auto fine = generate(8, 20, 2, 1e-3 / 16, 16 * 50);
  const auto a = run_mh(init, params, fine, 50, {});
  const auto b = run_mh(init, params, coarsen(fine, 16), 50, {});
  for (std::size_t i = 0; i < 20; ++i) EXPECT_EQ(a.final_state()[i], b.final_state()[i]);
  EXPECT_THROW(run_mh(init, params, generate(8, 20, 2, 3e-4, 1000), 10, {}), InvalidInput);
  EXPECT_THROW(run_mh(init, params, fine, 51, {}), InvalidInput);
}

TEST(RunMh, RecordingCadence) {
  const auto params = ModelParams::with_gamma(Model::Heisenberg, 10, 2.0, 1.5, 1e-3);
  const auto init = make_initial_condition(InitialCondition::OutOfEquilibrium, params);
  RecordOptions opt;
  opt.snapshot_every = 10;
  opt.scalar_every = 5;
  const auto rec = run_mh(init, params, generate(2, 20, 3, 1e-3, 100), 95, opt);
  EXPECT_EQ(rec.snapshots.size(), 11u);  // 0, 10, ..., 90, final 95
  EXPECT_NEAR(rec.snapshot_times.back(), 0.095, 1e-15);
  EXPECT_EQ(rec.scalar_times.size(), 20u);
  for (double a : rec.accept_rate) {
    EXPECT_GE(a, 0.0);
    EXPECT_LE(a, 1.0);
  }
  double sup = 0;
  for (double h : rec.energy) sup = std::max(sup, h);
  EXPECT_GE(rec.max_energy, sup);
}

TEST(RunMh, AcceptanceRateApproachesOneAsEpsShrinks) {
  const double beta = std::pow(10.0, 1.5);
  double prev = 0.0;
  // Rejection scales like β ε |∇H|, which is large out of equilibrium.
  for (double eps : {1e-2, 1e-3, 1e-4}) {
    const double dt = beta * eps * eps / 10.0;
    const auto params = ModelParams::make(Model::Heisenberg, 10, 2.0, beta, dt);
    const auto init = make_initial_condition(InitialCondition::OutOfEquilibrium, params);
    const auto rec = run_mh(init, params, generate(5, 20, 3, dt, 2000), 2000, {});
    const double rate = static_cast<double>(rec.accepted) / rec.steps;
    EXPECT_GT(rate, prev) << eps;
    prev = rate;
  }
  EXPECT_GT(prev, 0.97);
}

// Independent M-H on a 3-site XY ring: angle representation, std::mt19937
// noise, full H recomputed every step.
std::vector<double> oracle_bond_histogram(double beta, double eps, std::int64_t steps, int bins) {
  std::mt19937_64 rng(2718);
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> u01;
  auto energy = [](const std::array<double, 3>& th) {
    double h = 0;
    for (int i = 0; i < 3; ++i) h += 3.0 * (2.0 - 2.0 * std::cos(th[i] - th[(i + 1) % 3]));
    return h;
  };
  std::array<double, 3> th{0.0, 0.0, 0.0};
  std::vector<double> hist(bins, 0.0);
  for (std::int64_t n = 0; n < steps; ++n) {
    std::array<double, 3> prop;
    for (int i = 0; i < 3; ++i) prop[i] = th[i] + std::atan(eps * g(rng));
    if (u01(rng) < std::exp(-beta * (energy(prop) - energy(th)))) th = prop;
    const double c = std::cos(th[0] - th[1]);
    hist[std::min(bins - 1, static_cast<int>((c + 1) / 2 * bins))] += 1.0 / steps;
  }
  return hist;
}

// Exact Gibbs law of cos(θ0 − θ1) by quadrature over the two relative angles.
std::vector<double> exact_bond_histogram(double beta, int bins) {
  const int n = 2000;
  std::vector<double> hist(bins, 0.0);
  double z = 0;
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      const double x = 2 * std::numbers::pi * (a + 0.5) / n, y = 2 * std::numbers::pi * (b + 0.5) / n;
      const double h = 3.0 * (6.0 - 2.0 * std::cos(x) - 2.0 * std::cos(y) - 2.0 * std::cos(x + y));
      const double w = std::exp(-beta * h);
      const double c = std::cos(x);
      hist[std::min(bins - 1, static_cast<int>((c + 1) / 2 * bins))] += w;
      z += w;
    }
  }
  for (auto& v : hist) v /= z;
  return hist;
}

double total_variation(const std::vector<double>& p, const std::vector<double>& q) {
  double tv = 0;
  for (std::size_t k = 0; k < p.size(); ++k) tv += std::fabs(p[k] - q[k]);
  return 0.5 * tv;
}

TEST(RunMh, GibbsBalanceOnThreeSiteRing) {
  const double beta = 0.2, eps = 0.7;
  const std::int64_t steps = 1'000'000;
  const int bins = 10;
  const auto params = ModelParams::make(Model::XY, 3, 1.0, beta, beta * eps * eps / 3.0);
  const SpinConfiguration init(Model::XY, 3, std::vector<Vec3>(3, Vec3{1, 0, 0}));
  const auto path = generate(99, 3, 2, params.dt, steps, 0);
  auto state = MHState::start(init);
  std::vector<double> hist(bins, 0.0);
  for (std::int64_t n = 0; n < steps; ++n) {
    mh_step(state, params, path);
    const double c = dot(state.config[0], state.config[1]);
    hist[std::min(bins - 1, static_cast<int>((c + 1) / 2 * bins))] += 1.0 / steps;
  }
  const auto oracle = oracle_bond_histogram(beta, eps, steps, bins);
  const auto exact = exact_bond_histogram(beta, bins);
  EXPECT_LT(total_variation(hist, oracle), 0.02);
  EXPECT_LT(total_variation(hist, exact), 0.02);
  EXPECT_LT(total_variation(oracle, exact), 0.02);
}

}  // namespace
}  // namespace spinflow
