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

#include "spinflow/metrics.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "spinflow/errors.hpp"
#include "support.hpp"

namespace spinflow {
namespace {

using testing::random_config;

TrajectoryRecord record_of(std::vector<SpinConfiguration> snaps, double dt = 0.1) {
  TrajectoryRecord r;
  for (std::size_t k = 0; k < snaps.size(); ++k) r.snapshot_times.push_back(k * dt);
  r.snapshots = std::move(snaps);
  return r;
}

TEST(RmsConfigError, Examples) {
  std::mt19937_64 rng(1);
  const auto a = random_config(Model::Heisenberg, 10, 20, rng);
  EXPECT_EQ(rms_config_error(a, a), 0.0);
  auto b = a;
  for (std::size_t i = 0; i < b.size(); ++i) b[i] = -a[i];
  EXPECT_DOUBLE_EQ(rms_config_error(a, b), 2.0);
}

TEST(RmsConfigError, FourSiteHandComputed) {
  const double r = 1.0 / std::sqrt(2.0);
  const SpinConfiguration a(Model::XY, 2, {{1, 0, 0}, {0, 1, 0}, {-1, 0, 0}, {r, r, 0}});
  const SpinConfiguration b(Model::XY, 2, {{1, 0, 0}, {1, 0, 0}, {1, 0, 0}, {r, -r, 0}});
  // squared distances 0, 2, 4, 2
  EXPECT_NEAR(rms_config_error(a, b), std::sqrt(8.0 / 4.0), 1e-12);
  EXPECT_NEAR(max_sq_site_error(a, b), 4.0, 1e-12);
}

TEST(RmsConfigError, SymmetricAndShapeChecked) {
  std::mt19937_64 rng(2);
  const auto a = random_config(Model::Heisenberg, 10, 20, rng);
  const auto b = random_config(Model::Heisenberg, 10, 20, rng);
  EXPECT_EQ(rms_config_error(a, b), rms_config_error(b, a));
  EXPECT_GT(rms_config_error(a, b), 0.0);
  EXPECT_THROW(rms_config_error(a, random_config(Model::Heisenberg, 10, 21, rng)), InvalidInput);
}

TEST(ScaledErrorE, Definitions) {
  std::mt19937_64 rng(3);
  std::vector<SpinConfiguration> sa, sb;
  for (int k = 0; k < 5; ++k) {
    sa.push_back(random_config(Model::Heisenberg, 10, 20, rng));
    sb.push_back(random_config(Model::Heisenberg, 10, 20, rng));
  }
  const auto a = record_of(sa), b = record_of(sb);
  const auto same = scaled_error_e(a, a, 0.4, 0.1);
  for (double v : same.values) EXPECT_EQ(v, 0.0);
  const auto p0 = scaled_error_e(a, b, 0.0, 0.1);
  const auto p4 = scaled_error_e(a, b, 0.4, 0.1);
  EXPECT_EQ(p4.metric_kind, MetricKind::ScaledE);
  ASSERT_EQ(p4.p.value(), 0.4);
  for (std::size_t k = 0; k < 5; ++k) {
    const double r = rms_config_error(sa[k], sb[k]);
    EXPECT_NEAR(p0.values[k], r * r, 1e-14);
    EXPECT_NEAR(p4.values[k], std::pow(0.1, -0.8) * r * r, 1e-12);
  }
}

TEST(ScaledErrorE, GridMismatch) {
  std::mt19937_64 rng(4);
  const auto c = random_config(Model::XY, 10, 20, rng);
  EXPECT_THROW(scaled_error_e(record_of({c, c}), record_of({c}), 0.0, 1.0), InvalidInput);
  EXPECT_THROW(scaled_error_e(record_of({c, c}, 0.1), record_of({c, c}, 0.2), 0.0, 1.0), InvalidInput);
}

TEST(SupError, RunningMaximumMatchesBruteForce) {
  std::mt19937_64 rng(5);
  std::vector<SpinConfiguration> sa, sb;
  for (int k = 0; k < 10; ++k) {
    sa.push_back(random_config(Model::Heisenberg, 10, 20, rng));
    sb.push_back(random_config(Model::Heisenberg, 10, 20, rng));
  }
  const auto e = sup_error(record_of(sa), record_of(sb));
  EXPECT_EQ(e.metric_kind, MetricKind::SupToT);
  double run = 0;
  for (int k = 0; k < 10; ++k) {
    for (std::size_t i = 0; i < 20; ++i) {
      const Vec3 d = sa[k][i] - sb[k][i];
      run = std::max(run, d.x * d.x + d.y * d.y + d.z * d.z);
    }
    EXPECT_EQ(e.values[k], run);
    if (k > 0) {
      EXPECT_GE(e.values[k], e.values[k - 1]);
    }
  }
  const auto z = sup_error(record_of(sa), record_of(sa));
  for (double v : z.values) EXPECT_EQ(v, 0.0);
}

TEST(FitOrder, ExactPowerLaws) {
  for (double q : {0.5, 0.25, 1.0, 2.0}) {
    std::vector<std::pair<double, double>> pts;
    for (double h : {1e-3, 1e-4, 1e-5}) pts.emplace_back(h, 3.0 * std::pow(h, q));
    const auto f = fit_order(pts);
    EXPECT_NEAR(f.slope, q, 1e-12);
    EXPECT_NEAR(f.intercept, std::log(3.0), 1e-10);
    EXPECT_NEAR(f.r_squared, 1.0, 1e-12);
    EXPECT_NEAR(f.predict(1e-4), 3.0 * std::pow(1e-4, q), 1e-10 * std::pow(1e-4, q));
  }
}

TEST(FitOrder, NoisyPowerLaw) {
  std::mt19937_64 rng(6);
  std::normal_distribution<double> g(0.0, 0.05);
  std::vector<std::pair<double, double>> pts;
  for (int k = 0; k < 12; ++k) {
    const double h = std::pow(2.0, -k);
    pts.emplace_back(h, 3.0 * std::sqrt(h) * (1.0 + g(rng)));
  }
  EXPECT_NEAR(fit_order(pts).slope, 0.5, 0.05);
}

TEST(FitOrder, Preconditions) {
  const std::vector<std::pair<double, double>> two{{1e-3, 1.0}, {1e-4, 0.5}};
  EXPECT_THROW(fit_order(two), InvalidInput);
  const std::vector<std::pair<double, double>> neg{{1e-3, 1.0}, {1e-4, 0.0}, {1e-5, 0.1}};
  EXPECT_THROW(fit_order(neg), InvalidInput);
  const std::vector<std::pair<double, double>> flat{{1e-3, 1.0}, {1e-3, 0.5}, {1e-3, 0.1}};
  EXPECT_THROW(fit_order(flat), InvalidInput);
}

TEST(MeanStderr, KnownSample) {
  const std::vector<double> xs{1, 2, 3, 4};
  const auto ms = mean_stderr(xs);
  EXPECT_DOUBLE_EQ(ms.mean, 2.5);
  EXPECT_NEAR(ms.stderr_, std::sqrt(5.0 / 3.0 / 4.0), 1e-15);
  EXPECT_EQ(ms.n, 4u);
}

TEST(MeanStderr, ShrinksLikeInverseRootN) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g;
  std::vector<double> a(4000), b(16000);
  for (auto& x : a) x = g(rng);
  for (auto& x : b) x = g(rng);
  EXPECT_NEAR(mean_stderr(a).stderr_ / mean_stderr(b).stderr_, 2.0, 0.1);
}

}  // namespace
}  // namespace spinflow
