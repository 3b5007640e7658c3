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

#include "spinflow/experiment.hpp"

#include <gtest/gtest.h>

#include <nlohmann/json.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "spinflow/errors.hpp"

namespace spinflow {
namespace {

namespace fs = std::filesystem;

fs::path scratch_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("spinflow_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

TEST(ExperimentConfig, DynamicsDefaultsMirrorFirstFigure) {
  const auto c = ExperimentConfig::defaults(Scenario::Dynamics);
  EXPECT_EQ(c.N, 10);
  EXPECT_EQ(c.L, 2.0);
  EXPECT_EQ(c.dt, 1e-3);
  const auto p = c.params_for(c.N, c.dt);
  EXPECT_EQ(p.M, 20);
  EXPECT_NEAR(p.beta, 31.6227766, 1e-6);
  EXPECT_NEAR(p.eps, 0.0177827941, 1e-9);
  EXPECT_NO_THROW(c.validate());
}

TEST(ExperimentConfig, SweepDefaults) {
  const auto dt = ExperimentConfig::defaults(Scenario::ConvDt);
  EXPECT_EQ(dt.dt_sweep, (std::vector<double>{1e-3, 5e-4, 2.5e-4, 1.25e-4}));
  EXPECT_EQ(dt.realizations, 200);
  EXPECT_EQ(dt.ref_factor, 16);
  const auto dx = ExperimentConfig::defaults(Scenario::ConvDx);
  EXPECT_EQ(dx.N_sweep, (std::vector<int>{10, 20, 40}));
  EXPECT_EQ(dx.realizations, 100);
  const auto v = ExperimentConfig::defaults(Scenario::Validate);
  EXPECT_EQ(v.n_trials, 100000);
  for (auto s : {Scenario::Dynamics, Scenario::ConvDt, Scenario::ConvDx, Scenario::Validate}) {
    EXPECT_NO_THROW(ExperimentConfig::defaults(s).validate()) << to_string(s);
    EXPECT_EQ(parse_scenario(to_string(s)), s);
  }
  EXPECT_EQ(parse_scenario("conv_dt"), Scenario::ConvDt);
}

std::string config_error_of(const ExperimentConfig& c) {
  try {
    c.validate();
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

TEST(ExperimentConfig, FieldDiagnostics) {
  auto c = ExperimentConfig::defaults(Scenario::ConvDt);
  c.dt_sweep = {1e-3, 5e-4, 3e-4, 1.25e-4};
  EXPECT_EQ(config_error_of(c).rfind("dt_sweep:", 0), 0u) << config_error_of(c);
  c.dt_sweep = {1e-3, 5e-4, 2.5e-4};
  EXPECT_EQ(config_error_of(c).rfind("dt_sweep:", 0), 0u);
  c.dt_sweep = {1e-3, 5e-4, 5e-4, 2.5e-4};
  EXPECT_EQ(config_error_of(c).rfind("dt_sweep:", 0), 0u);

  auto d = ExperimentConfig::defaults(Scenario::ConvDx);
  d.N_sweep = {10};
  EXPECT_EQ(config_error_of(d).rfind("N_sweep:", 0), 0u);

  auto e = ExperimentConfig::defaults(Scenario::Dynamics);
  e.dt = 0.01;
  EXPECT_EQ(config_error_of(e).rfind("dt:", 0), 0u);
  e = ExperimentConfig::defaults(Scenario::Dynamics);
  e.T = 0.0105;
  EXPECT_EQ(config_error_of(e).rfind("T:", 0), 0u);
  e = ExperimentConfig::defaults(Scenario::Dynamics);
  e.L = 0.1;
  EXPECT_EQ(config_error_of(e).rfind("N:", 0), 0u);
  e = ExperimentConfig::defaults(Scenario::Dynamics);
  e.realizations = 0;
  EXPECT_EQ(config_error_of(e).rfind("realizations:", 0), 0u);
}

TEST(ParseBeta, AcceptsInfinity) {
  EXPECT_EQ(parse_beta("inf"), std::numeric_limits<double>::infinity());
  EXPECT_EQ(parse_beta("2.5"), 2.5);
  EXPECT_THROW(parse_beta("warm"), ConfigError);
}

TEST(ExperimentConfig, JsonEchoesDerivedInputs) {
  const auto j = ExperimentConfig::defaults(Scenario::ConvDt).to_json();
  EXPECT_EQ(j["scenario"], "conv-dt");
  EXPECT_EQ(j["seed"], 0);
  EXPECT_FALSE(j.contains("workers"));
}

ExperimentConfig tiny_conv_dt() {
  auto c = ExperimentConfig::defaults(Scenario::ConvDt);
  c.T = 0.01;
  c.realizations = 6;
  c.ref_factor = 4;
  c.seed = 3;
  return c;
}

TEST(RunConvDt, DeterministicAcrossWorkerCounts) {
  auto c = tiny_conv_dt();
  c.workers = 1;
  const auto a = run_conv_dt(c);
  c.workers = 3;
  const auto b = run_conv_dt(c);
  ASSERT_EQ(a.levels.size(), 4u);
  for (std::size_t l = 0; l < 4; ++l) {
    EXPECT_EQ(a.levels[l].err, b.levels[l].err);
    EXPECT_EQ(a.levels[l].samples, b.levels[l].samples);
    EXPECT_EQ(a.levels[l].n_realizations, 6);
  }
  EXPECT_EQ(a.fit.slope, b.fit.slope);
  EXPECT_EQ(a.seeds, b.seeds);
}

TEST(RunConvDt, ErrorShrinksWithStep) {
  auto c = tiny_conv_dt();
  c.realizations = 20;
  const auto r = run_conv_dt(c);
  EXPECT_GT(r.levels.front().err, r.levels.back().err);
  EXPECT_GT(r.fit.slope, 0.0);
}

TEST(RunConvDx, StandardErrorShrinksWithRealizations) {
  auto c = ExperimentConfig::defaults(Scenario::ConvDx);
  c.N_sweep = {4, 8, 16};
  c.T = 0.0625;
  c.seed = 5;
  c.realizations = 100;
  ASSERT_NO_THROW(c.validate());
  const auto a = run_conv_dx(c);
  c.realizations = 200;
  const auto b = run_conv_dx(c);
  for (std::size_t l = 0; l < 3; ++l) {
    const double ratio = a.levels[l].stderr_ / b.levels[l].stderr_;
    EXPECT_GT(ratio, 1.2) << l;
    EXPECT_LT(ratio, 1.7) << l;
  }
}

TEST(RunDynamics, InfiniteBetaSdeEqualsPde) {
  auto c = ExperimentConfig::defaults(Scenario::Dynamics);
  c.beta = std::numeric_limits<double>::infinity();
  c.T = 0.1;
  const auto r = run_dynamics(c);
  ASSERT_EQ(r.sde.snapshots.size(), r.pde.snapshots.size());
  for (std::size_t k = 0; k < r.sde.snapshots.size(); ++k) {
    for (std::size_t i = 0; i < r.sde.snapshots[k].size(); ++i) {
      EXPECT_LE(norm(r.sde.snapshots[k][i] - r.pde.snapshots[k][i]), 1e-12);
    }
  }
}

TEST(RunExperiment, RerunsAreByteIdenticalAndHashed) {
  auto c = ExperimentConfig::defaults(Scenario::Dynamics);
  c.T = 0.1;
  c.seed = 11;
  std::vector<std::map<std::string, std::string>> runs;
  for (unsigned workers : {1u, 2u}) {
    c.workers = workers;
    c.output_dir = scratch_dir("dyn" + std::to_string(workers)).string();
    std::ostringstream log;
    ASSERT_EQ(run_experiment(c, log), 0);
    std::map<std::string, std::string> files;
    for (const auto& e : fs::recursive_directory_iterator(c.output_dir)) {
      if (e.is_regular_file()) files[fs::relative(e.path(), c.output_dir).string()] = slurp(e.path());
    }
    runs.push_back(std::move(files));
  }
  ASSERT_EQ(runs[0].size(), runs[1].size());
  for (const auto& [name, body] : runs[0]) EXPECT_EQ(body, runs[1].at(name)) << name;

  const auto meta = nlohmann::json::parse(runs[0].at("metadata.json"));
  EXPECT_EQ(meta["config"]["seed"], 11);
  EXPECT_EQ(meta["derived"]["M"], 20);
  EXPECT_TRUE(meta["derived"].contains("eps"));
  EXPECT_TRUE(meta["derived"].contains("J"));
  for (const auto& [name, hash] : meta["artifacts"].items()) {
    EXPECT_EQ(hash.get<std::string>(), sha256_hex(fs::path(c.output_dir) / name)) << name;
  }
  EXPECT_TRUE(runs[0].count("plot_dynamics.py"));
  EXPECT_TRUE(runs[0].count("mh_scalars.csv"));
  EXPECT_EQ(runs[0].at("mh_scalars.csv").substr(0, 16), "t,H,accept_rate\n");
}

TEST(RunExperiment, MhLagsBehindAtMidTime) {
  auto c = ExperimentConfig::defaults(Scenario::Dynamics);
  c.seed = 1;
  const auto r = run_dynamics(c);
  const std::size_t mid = r.times.size() / 2;
  EXPECT_GT(r.mh_pde[mid], r.sde_pde[mid]);
}

TEST(Sha256, KnownDigest) {
  const auto p = scratch_dir("sha");
  fs::create_directories(p);
  std::ofstream(p / "abc.txt", std::ios::binary) << "abc";
  EXPECT_EQ(sha256_hex(p / "abc.txt"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

}  // namespace
}  // namespace spinflow
