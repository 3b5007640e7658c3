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

#include "cli.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "spinflow/errors.hpp"
#include "spinflow/experiment.hpp"

namespace spinflow::cli {

namespace {

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<int> realizations;
  std::optional<unsigned> workers;
  std::optional<std::string> model;
  std::optional<int> N;
  std::vector<int> N_sweep;
  std::optional<double> L;
  std::optional<double> gamma;
  std::optional<std::string> beta;
  std::optional<double> dt;
  std::vector<double> dt_sweep;
  std::optional<int> ref_factor;
  std::optional<double> T;
  std::optional<std::string> ic;
  std::optional<double> amplitude;
  std::optional<std::string> proposal;
  std::optional<double> snapshot_interval;
  std::vector<double> eps_list;
  std::optional<std::int64_t> n_trials;
  std::optional<double> validator_beta;
  std::optional<std::int64_t> uniformity_steps;
  std::optional<double> uniformity_dt;
  std::optional<int> energy_realizations;
  std::optional<double> energy_T;
  std::optional<double> energy_b;
  std::optional<std::string> energy_ic;
  std::vector<double> taylor_eps;
  std::optional<int> taylor_samples;
};

void register_options(CLI::App& app, Overrides& o) {
  app.add_option("--seed", o.seed, "Base seed (u64)");
  app.add_option("--out", o.out, "Output directory");
  app.add_option("--realizations", o.realizations, "Independent realizations");
  app.add_option("--workers", o.workers, "Worker threads (0 = all cores)");
  app.add_option("--model", o.model, "xy or heisenberg");
  app.add_option("--N", o.N, "Sites per unit length");
  app.add_option("--N-sweep", o.N_sweep, "Resolutions for conv-dx");
  app.add_option("--L", o.L, "Lattice length");
  app.add_option("--gamma", o.gamma, "beta = N^gamma");
  app.add_option("--beta", o.beta, "Explicit inverse temperature, or inf");
  app.add_option("--dt", o.dt, "Time step");
  app.add_option("--dt-sweep", o.dt_sweep, "Dyadic time steps for conv-dt");
  app.add_option("--ref-factor", o.ref_factor, "Reference refinement below the finest dt");
  app.add_option("--T", o.T, "Final time");
  app.add_option("--ic", o.ic, "aligned, near-equilibrium or out-of-equilibrium");
  app.add_option("--amplitude", o.amplitude, "Initial condition amplitude");
  app.add_option("--proposal", o.proposal, "normalized or exponential");
  app.add_option("--snapshot-interval", o.snapshot_interval, "Time between snapshots");
  app.add_option("--eps-list", o.eps_list, "Proposal sizes for the one-step validators");
  app.add_option("--n-trials", o.n_trials, "One-step trials per proposal size");
  app.add_option("--validator-beta", o.validator_beta, "beta of the one-step validators");
  app.add_option("--uniformity-steps", o.uniformity_steps, "Steps of the sphere random walk");
  app.add_option("--uniformity-dt", o.uniformity_dt, "Time step of the sphere random walk");
  app.add_option("--energy-realizations", o.energy_realizations, "Realizations of the energy-bound monitor");
  app.add_option("--energy-T", o.energy_T, "Horizon of the energy-bound monitor");
  app.add_option("--energy-b", o.energy_b, "Level b of the energy-bound monitor");
  app.add_option("--energy-ic", o.energy_ic, "Initial condition of the energy-bound monitor");
  app.add_option("--taylor-eps", o.taylor_eps, "Step sizes of the Taylor-residual sweep");
  app.add_option("--taylor-samples", o.taylor_samples, "Samples of the Taylor-residual sweep");
}

template <class T>
void apply(const std::optional<T>& v, T& field) {
  if (v) field = *v;
}

template <class T>
void apply(const std::vector<T>& v, std::vector<T>& field) {
  if (!v.empty()) field = v;
}

ExperimentConfig resolve(Scenario scenario, const Overrides& o) {
  ExperimentConfig c = ExperimentConfig::defaults(scenario);
  apply(o.seed, c.seed);
  apply(o.out, c.output_dir);
  apply(o.realizations, c.realizations);
  apply(o.workers, c.workers);
  if (o.model) c.model = parse_model(*o.model);
  apply(o.N, c.N);
  apply(o.N_sweep, c.N_sweep);
  apply(o.L, c.L);
  apply(o.gamma, c.gamma);
  if (o.beta) c.beta = parse_beta(*o.beta);
  apply(o.dt, c.dt);
  apply(o.dt_sweep, c.dt_sweep);
  apply(o.ref_factor, c.ref_factor);
  apply(o.T, c.T);
  if (o.ic) c.ic = parse_initial_condition(*o.ic);
  if (o.amplitude) c.amplitude = *o.amplitude;
  if (o.proposal) c.proposal = parse_proposal_kind(*o.proposal);
  apply(o.snapshot_interval, c.snapshot_interval);
  apply(o.eps_list, c.eps_list);
  apply(o.n_trials, c.n_trials);
  apply(o.validator_beta, c.validator_beta);
  apply(o.uniformity_steps, c.uniformity_steps);
  apply(o.uniformity_dt, c.uniformity_dt);
  apply(o.energy_realizations, c.energy_realizations);
  apply(o.energy_T, c.energy_T);
  apply(o.energy_b, c.energy_b);
  if (o.energy_ic) c.energy_ic = parse_initial_condition(*o.energy_ic);
  apply(o.taylor_eps, c.taylor_eps);
  apply(o.taylor_samples, c.taylor_samples);
  c.validate();
  return c;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Metropolis-Hastings, Langevin and heat-flow dynamics of lattice spin chains", "spinflow"};
  app.set_config("--config", "", "Flat key = value config file; flags override file values");
  app.require_subcommand(1, 1);
  app.allow_config_extras(CLI::config_extras_mode::error);
  Overrides o;
  register_options(app, o);

  Scenario scenario = Scenario::Dynamics;
  const std::pair<const char*, Scenario> subs[] = {
      {"dynamics", Scenario::Dynamics},
      {"conv-dt", Scenario::ConvDt},
      {"conv-dx", Scenario::ConvDx},
      {"validate", Scenario::Validate},
  };
  const char* help[] = {"M-H, SDE and PDE from one initial condition",
                        "M-H to SDE convergence in the time step",
                        "M-H to PDE convergence in the lattice spacing",
                        "Statistical validators of the one-step expansions"};
  for (std::size_t k = 0; k < 4; ++k) {
    auto* sub = app.add_subcommand(subs[k].first, help[k]);
    sub->fallthrough();
    sub->callback([&scenario, s = subs[k].second] { scenario = s; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kSuccess;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  }

  ExperimentConfig config;
  try {
    config = resolve(scenario, o);
  } catch (const std::invalid_argument& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  }

  try {
    const int code = run_experiment(config, out);
    if (code == 4) err << "one or more validators failed; see " << config.output_dir << "/report.txt\n";
    return code;
  } catch (const std::invalid_argument& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const NumericalFailure& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kNumericalFailure;
  } catch (const DegenerateStep& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kNumericalFailure;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kUnexpected;
  }
}

}  // namespace spinflow::cli
