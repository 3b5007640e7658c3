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

#include <fmt/format.h>
#include <openssl/evp.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "spinflow/errors.hpp"
#include "spinflow/noise.hpp"
#include "spinflow/pde.hpp"
#include "spinflow/sde.hpp"
#include "spinflow/workers.hpp"

namespace spinflow {

namespace fs = std::filesystem;

std::string_view to_string(Scenario s) {
  switch (s) {
    case Scenario::Dynamics:
      return "dynamics";
    case Scenario::ConvDt:
      return "conv-dt";
    case Scenario::ConvDx:
      return "conv-dx";
    case Scenario::Validate:
      return "validate";
  }
  return "?";
}

Scenario parse_scenario(std::string_view name) {
  if (name == "dynamics") return Scenario::Dynamics;
  if (name == "conv_dt" || name == "conv-dt") return Scenario::ConvDt;
  if (name == "conv_dx" || name == "conv-dx") return Scenario::ConvDx;
  if (name == "validate") return Scenario::Validate;
  throw ConfigError(fmt::format("unknown scenario '{}'", name));
}

double parse_beta(std::string_view text) {
  std::string s(text);
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  if (s == "inf" || s == "infinity") return std::numeric_limits<double>::infinity();
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw ConfigError(fmt::format("beta: '{}' is not a number or 'inf'", text));
  }
  if (used != s.size()) throw ConfigError(fmt::format("beta: '{}' is not a number or 'inf'", text));
  if (!(v >= 0.0)) throw ConfigError(fmt::format("beta: must be >= 0, got {}", v));
  return v;
}

ExperimentConfig ExperimentConfig::defaults(Scenario scenario) {
  ExperimentConfig c;
  c.scenario = scenario;
  switch (scenario) {
    case Scenario::Dynamics:
      c.T = 0.5;
      c.dt = 1e-3;
      c.ic = InitialCondition::OutOfEquilibrium;
      c.realizations = 1;
      break;
    case Scenario::ConvDt:
      c.T = 0.2;
      c.dt_sweep = {1e-3, 5e-4, 2.5e-4, 1.25e-4};
      c.ic = InitialCondition::NearEquilibrium;
      c.realizations = 200;
      break;
    case Scenario::ConvDx:
      c.T = 0.2;
      c.N_sweep = {10, 20, 40};
      c.ic = InitialCondition::OutOfEquilibrium;
      c.realizations = 100;
      break;
    case Scenario::Validate:
      // A strongly twisted profile: the one-step expansions converge once
      // ε times the quadratic part of ΔH is small against |P∇H|.
      c.ic = InitialCondition::OutOfEquilibrium;
      c.amplitude = 8.0;
      break;
  }
  return c;
}

double ExperimentConfig::beta_for(int n) const {
  if (beta) return *beta;
  return std::pow(static_cast<double>(n), gamma);
}

ModelParams ExperimentConfig::params_for(int n, double step) const {
  ModelParams p = ModelParams::make(model, n, L, beta_for(n), step);
  if (!beta) p.gamma = gamma;
  return p;
}

namespace {

[[noreturn]] void config_error(std::string_view field, const std::string& what) {
  throw ConfigError(fmt::format("{}: {}", field, what));
}

bool is_multiple(double T, double dt) {
  const double r = T / dt;
  return std::fabs(r - std::round(r)) <= 1e-9 * std::max(1.0, r);
}

void check_lattice(const ExperimentConfig& c, int n, std::string_view field) {
  if (n <= 0) config_error(field, fmt::format("must be positive, got {}", n));
  if (std::lround(c.L * n) < 3) config_error(field, fmt::format("L*N = {} gives fewer than 3 sites", c.L * n));
}

}  // namespace

void ExperimentConfig::validate() const {
  if (!(L > 0.0) || !std::isfinite(L)) config_error("L", fmt::format("must be positive, got {}", L));
  if (!std::isfinite(gamma)) config_error("gamma", "must be finite");
  if (beta && !(*beta >= 0.0)) config_error("beta", fmt::format("must be >= 0 or inf, got {}", *beta));
  if (!(T >= 0.0) || !std::isfinite(T)) config_error("T", fmt::format("must be >= 0, got {}", T));
  if (realizations < 1) config_error("realizations", fmt::format("must be >= 1, got {}", realizations));
  if (amplitude && !std::isfinite(*amplitude)) config_error("amplitude", "must be finite");
  if (output_dir.empty()) config_error("out", "must not be empty");

  auto check_sde_dt = [&](int n, double step, std::string_view field) {
    if (!(step > 0.0)) config_error(field, fmt::format("must be positive, got {}", step));
    if (step > 1.0 / (2.0 * n * n)) {
      config_error(field, fmt::format("{} exceeds the stability limit 1/(2N^2) = {} at N = {}", step,
                                      1.0 / (2.0 * n * n), n));
    }
    if (!is_multiple(T, step)) config_error("T", fmt::format("{} is not a multiple of dt = {}", T, step));
  };

  switch (scenario) {
    case Scenario::Dynamics:
      check_lattice(*this, N, "N");
      check_sde_dt(N, dt, "dt");
      if (!(snapshot_interval > 0.0) || !is_multiple(snapshot_interval, dt)) {
        config_error("snapshot_interval", fmt::format("{} must be a positive multiple of dt = {}", snapshot_interval, dt));
      }
      break;
    case Scenario::ConvDt: {
      check_lattice(*this, N, "N");
      if (dt_sweep.size() < 4) {
        config_error("dt_sweep", fmt::format("needs at least 4 levels, got {}", dt_sweep.size()));
      }
      if (ref_factor < 1) config_error("ref_factor", "must be >= 1");
      const double finest = *std::min_element(dt_sweep.begin(), dt_sweep.end());
      for (double h : dt_sweep) {
        if (!(h > 0.0)) config_error("dt_sweep", fmt::format("must be positive, got {}", h));
        const double r = h / finest;
        const double lg = std::log2(r);
        if (std::fabs(lg - std::round(lg)) > 1e-9) {
          config_error("dt_sweep", fmt::format("{} is not a power-of-two multiple of {}", h, finest));
        }
      }
      std::vector<double> sorted = dt_sweep;
      std::sort(sorted.begin(), sorted.end());
      if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        config_error("dt_sweep", "contains duplicate step sizes");
      }
      for (double h : dt_sweep) check_sde_dt(N, h, "dt_sweep");
      check_sde_dt(N, finest / ref_factor, "ref_factor");
      break;
    }
    case Scenario::ConvDx: {
      if (N_sweep.size() < 3) {
        config_error("N_sweep", fmt::format("an order fit needs at least 3 resolutions, got {}", N_sweep.size()));
      }
      std::vector<int> sorted = N_sweep;
      std::sort(sorted.begin(), sorted.end());
      if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
        config_error("N_sweep", "contains duplicate resolutions");
      }
      for (int n : N_sweep) {
        check_lattice(*this, n, "N_sweep");
        check_sde_dt(n, std::pow(static_cast<double>(n), -4.0), "N_sweep");
      }
      break;
    }
    case Scenario::Validate:
      check_lattice(*this, N, "N");
      if (eps_list.empty()) config_error("eps_list", "must not be empty");
      for (double e : eps_list) {
        if (!(e > 0.0)) config_error("eps_list", fmt::format("entries must be positive, got {}", e));
      }
      if (n_trials < 2) config_error("n_trials", "must be >= 2");
      if (!(validator_beta >= 0.0) || !std::isfinite(validator_beta)) {
        config_error("validator_beta", "must be finite and >= 0");
      }
      if (uniformity_steps < 100) config_error("uniformity_steps", "must be >= 100");
      if (!(uniformity_dt > 0.0)) config_error("uniformity_dt", "must be positive");
      if (energy_realizations < 1) config_error("energy_realizations", "must be >= 1");
      if (!(energy_b > 0.0)) config_error("energy_b", "must be positive");
      if (!std::isfinite(beta_for(N)) || !(beta_for(N) > 0.0)) {
        config_error("beta", "the energy-bound monitor needs a finite positive beta");
      }
      check_sde_dt(N, dt, "dt");
      if (!is_multiple(energy_T, dt)) config_error("energy_T", "must be a multiple of dt");
      if (taylor_eps.empty()) config_error("taylor_eps", "must not be empty");
      if (taylor_samples < 1) config_error("taylor_samples", "must be >= 1");
      break;
  }
}

nlohmann::json ExperimentConfig::to_json() const {
  nlohmann::json j;
  j["scenario"] = to_string(scenario);
  j["model"] = to_string(model);
  j["L"] = L;
  j["gamma"] = gamma;
  j["beta"] = beta ? (std::isinf(*beta) ? nlohmann::json("inf") : nlohmann::json(*beta)) : nlohmann::json(nullptr);
  j["T"] = T;
  j["ic"] = to_string(ic);
  j["amplitude"] = amplitude.value_or(default_amplitude(ic));
  j["realizations"] = realizations;
  j["seed"] = seed;
  j["proposal"] = to_string(proposal);
  switch (scenario) {
    case Scenario::Dynamics:
      j["N"] = N;
      j["dt"] = dt;
      j["snapshot_interval"] = snapshot_interval;
      break;
    case Scenario::ConvDt:
      j["N"] = N;
      j["dt_sweep"] = dt_sweep;
      j["ref_factor"] = ref_factor;
      break;
    case Scenario::ConvDx:
      j["N_sweep"] = N_sweep;
      break;
    case Scenario::Validate:
      j["N"] = N;
      j["dt"] = dt;
      j["eps_list"] = eps_list;
      j["n_trials"] = n_trials;
      j["validator_beta"] = validator_beta;
      j["uniformity_steps"] = uniformity_steps;
      j["uniformity_dt"] = uniformity_dt;
      j["energy_realizations"] = energy_realizations;
      j["energy_T"] = energy_T;
      j["energy_b"] = energy_b;
      j["energy_ic"] = to_string(energy_ic);
      j["taylor_eps"] = taylor_eps;
      j["taylor_samples"] = taylor_samples;
      break;
  }
  return j;
}

namespace {

nlohmann::json params_json(const ModelParams& p) {
  nlohmann::json j;
  j["N"] = p.N;
  j["M"] = p.M;
  j["J"] = p.J;
  j["beta"] = std::isinf(p.beta) ? nlohmann::json("inf") : nlohmann::json(p.beta);
  j["dt"] = p.dt;
  j["eps"] = p.eps;
  j["noise_amplitude"] = p.noise_amplitude();
  return j;
}

RecordOptions final_only() {
  RecordOptions o;
  o.scalar_every = 0;
  o.final_snapshot = true;
  return o;
}

ConvergenceLevel summarize(double h, std::vector<double> samples) {
  ConvergenceLevel lev;
  lev.h = h;
  const auto ms = mean_stderr(samples);
  lev.err = ms.mean;
  lev.stderr_ = ms.stderr_;
  lev.n_realizations = static_cast<int>(samples.size());
  lev.samples = std::move(samples);
  return lev;
}

std::vector<std::pair<double, double>> fit_points(const std::vector<ConvergenceLevel>& levels) {
  std::vector<std::pair<double, double>> pts;
  for (const auto& l : levels) pts.emplace_back(l.h, l.err);
  return pts;
}

}  // namespace

ConvergenceResult run_conv_dt(const ExperimentConfig& config) {
  config.validate();
  const double finest = *std::min_element(config.dt_sweep.begin(), config.dt_sweep.end());
  const double dt_ref = finest / config.ref_factor;
  const ModelParams ref = config.params_for(config.N, dt_ref);
  const SpinConfiguration initial = make_initial_condition(config.ic, ref, config.amplitude);
  const std::int64_t n_ref = step_count(config.T, dt_ref);
  const int comps = components(config.model);

  ConvergenceResult res;
  for (int r = 0; r < config.realizations; ++r) {
    res.seeds.push_back(realization_seed(config.seed, static_cast<std::uint64_t>(r)));
  }
  auto one = [&](std::size_t r) {
    const BrownianLattice path = generate(res.seeds[r], initial.size(), comps, dt_ref, n_ref);
    const auto sde = run_sde(initial, ref, path, config.T, final_only());
    std::vector<double> errs;
    for (double h : config.dt_sweep) {
      const ModelParams p = config.params_for(config.N, h);
      const auto mh = run_mh(initial, p, path, step_count(config.T, h), final_only(), config.proposal);
      errs.push_back(rms_config_error(mh.final_state(), sde.final_state()));
    }
    return errs;
  };
  const auto per_real = parallel_map(static_cast<std::size_t>(config.realizations), config.workers, one);

  nlohmann::json levels = nlohmann::json::array();
  for (std::size_t k = 0; k < config.dt_sweep.size(); ++k) {
    std::vector<double> samples;
    for (const auto& e : per_real) samples.push_back(e[k]);
    res.levels.push_back(summarize(config.dt_sweep[k], std::move(samples)));
    levels.push_back(params_json(config.params_for(config.N, config.dt_sweep[k])));
  }
  res.fit = fit_order(fit_points(res.levels));
  res.derived = {{"reference", params_json(ref)}, {"dt_ref", dt_ref}, {"reference_steps", n_ref}, {"levels", levels}};
  return res;
}

ConvergenceResult run_conv_dx(const ExperimentConfig& config) {
  config.validate();
  ConvergenceResult res;
  nlohmann::json levels = nlohmann::json::array();
  for (int n : config.N_sweep) {
    const double step = std::pow(static_cast<double>(n), -4.0);
    const ModelParams p = config.params_for(n, step);
    const SpinConfiguration initial = make_initial_condition(config.ic, p, config.amplitude);
    const std::int64_t steps = step_count(config.T, step);
    const auto pde = run_pde(initial, config.T, step, final_only());
    const std::uint64_t level_seed = realization_seed(config.seed, 1'000'000u + static_cast<std::uint64_t>(n));
    std::vector<std::uint64_t> seeds;
    for (int r = 0; r < config.realizations; ++r) {
      seeds.push_back(realization_seed(level_seed, static_cast<std::uint64_t>(r)));
    }
    auto one = [&](std::size_t r) {
      const BrownianLattice path = generate(seeds[r], initial.size(), components(config.model), step, steps);
      const auto mh = run_mh(initial, p, path, steps, final_only(), config.proposal);
      return rms_config_error(mh.final_state(), pde.final_state());
    };
    auto samples = parallel_map(seeds.size(), config.workers, one);
    res.levels.push_back(summarize(1.0 / n, std::move(samples)));
    res.seeds.insert(res.seeds.end(), seeds.begin(), seeds.end());
    auto lj = params_json(p);
    lj["steps"] = steps;
    lj["level_seed"] = level_seed;
    levels.push_back(lj);
  }
  res.fit = fit_order(fit_points(res.levels));
  res.derived = {{"levels", levels}};
  return res;
}

DynamicsResult run_dynamics(const ExperimentConfig& config) {
  config.validate();
  const ModelParams p = config.params_for(config.N, config.dt);
  const SpinConfiguration initial = make_initial_condition(config.ic, p, config.amplitude);
  const std::int64_t steps = step_count(config.T, config.dt);
  RecordOptions opts;
  opts.snapshot_every = std::max<std::int64_t>(1, step_count(config.snapshot_interval, config.dt));
  opts.scalar_every = 1;

  DynamicsResult res;
  res.pde = run_pde(initial, config.T, config.dt, opts);
  for (int r = 0; r < config.realizations; ++r) {
    res.seeds.push_back(realization_seed(config.seed, static_cast<std::uint64_t>(r)));
  }
  struct Run {
    TrajectoryRecord mh, sde;
  };
  auto one = [&](std::size_t r) {
    const BrownianLattice path = generate(res.seeds[r], initial.size(), components(config.model), config.dt, steps);
    Run run;
    run.mh = run_mh(initial, p, path, steps, opts, config.proposal);
    run.sde = run_sde(initial, p, path, config.T, opts);
    return run;
  };
  auto runs = parallel_map(res.seeds.size(), config.workers, one);

  res.times = res.pde.snapshot_times;
  const std::size_t K = res.times.size();
  for (std::size_t k = 0; k < K; ++k) {
    std::vector<double> a, b, c;
    for (const auto& run : runs) {
      a.push_back(rms_config_error(run.mh.snapshots[k], res.pde.snapshots[k]));
      b.push_back(rms_config_error(run.sde.snapshots[k], res.pde.snapshots[k]));
      c.push_back(rms_config_error(run.mh.snapshots[k], run.sde.snapshots[k]));
    }
    const auto ma = mean_stderr(a), mb = mean_stderr(b), mc = mean_stderr(c);
    res.mh_pde.push_back(ma.mean);
    res.mh_pde_se.push_back(ma.stderr_);
    res.sde_pde.push_back(mb.mean);
    res.sde_pde_se.push_back(mb.stderr_);
    res.mh_sde.push_back(mc.mean);
    res.mh_sde_se.push_back(mc.stderr_);
  }
  res.mh = std::move(runs.front().mh);
  res.sde = std::move(runs.front().sde);
  res.derived = params_json(p);
  res.derived["steps"] = steps;
  res.derived["snapshot_every"] = opts.snapshot_every;
  return res;
}

std::vector<TrajectoryRecord> energy_bound_trajectories(const ExperimentConfig& config) {
  const ModelParams p = config.params_for(config.N, config.dt);
  const SpinConfiguration initial = make_initial_condition(config.energy_ic, p, config.amplitude);
  const std::int64_t steps = step_count(config.energy_T, config.dt);
  const std::uint64_t base = realization_seed(config.seed, 2'000'000u);
  RecordOptions opts;
  opts.scalar_every = 0;
  auto one = [&](std::size_t r) {
    const BrownianLattice path = generate(realization_seed(base, r), initial.size(), components(config.model),
                                          config.dt, steps);
    return run_mh(initial, p, path, steps, opts, config.proposal);
  };
  return parallel_map(static_cast<std::size_t>(config.energy_realizations), config.workers, one);
}

ValidateResult run_validate(const ExperimentConfig& config) {
  config.validate();
  ValidateResult res;
  const ModelParams vp = ModelParams::make(config.model, config.N, config.L, config.validator_beta, config.dt);
  const SpinConfiguration vconfig = make_initial_condition(config.ic, vp, config.amplitude);
  ValidatorOptions vo;
  vo.n_trials = config.n_trials;
  vo.kind = config.proposal;
  vo.workers = config.workers;

  vo.seed = realization_seed(config.seed, 3'000'001u);
  res.reports.push_back(validate_drift(vconfig, vp, config.eps_list, vo).report());
  vo.seed = realization_seed(config.seed, 3'000'002u);
  res.reports.push_back(validate_diffusion(vconfig, vp, config.eps_list, vo).report());

  const int m = sphere_dim(config.model);
  res.reports.push_back(validate_sphere_uniformity(m, config.uniformity_steps, config.uniformity_dt,
                                                   realization_seed(config.seed, 3'000'003u))
                            .report());

  const ModelParams ep = config.params_for(config.N, config.dt);
  const auto trajs = energy_bound_trajectories(config);
  res.reports.push_back(energy_bound_monitor(trajs, ep, config.energy_T, config.energy_b).report());

  res.reports.push_back(
      taylor_residual_sweep(config.model, config.taylor_eps, config.taylor_samples,
                            realization_seed(config.seed, 3'000'004u))
          .report());

  res.passed = std::all_of(res.reports.begin(), res.reports.end(), [](const auto& r) { return r.passed; });
  res.derived = {{"validator_params", params_json(vp)},
                 {"allowance_constant", allowance_constant(vconfig, vp.beta)},
                 {"energy_params", params_json(ep)}};
  return res;
}

std::string sha256_hex(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + file.string());
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof buf);
    if (in.gcount() > 0) EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(in.gcount()));
  }
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, md, &len);
  EVP_MD_CTX_free(ctx);
  std::string hex;
  for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", md[i]);
  return hex;
}

namespace {

class ArtifactWriter {
 public:
  explicit ArtifactWriter(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }

  template <class Fn>
  void write(const std::string& name, Fn&& fn) {
    const fs::path path = dir_ / name;
    fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    fn(out);
    out.close();
    names_.push_back(name);
  }

  void text(const std::string& name, const std::string& body) {
    write(name, [&](std::ostream& o) { o << body; });
  }

  nlohmann::json hashes() const {
    nlohmann::json h = nlohmann::json::object();
    for (const auto& n : names_) h[n] = sha256_hex(dir_ / n);
    return h;
  }

 private:
  fs::path dir_;
  std::vector<std::string> names_;
};

void write_convergence_csv(std::ostream& out, const ConvergenceResult& res) {
  out << "h,err,stderr,n_realizations\n";
  for (const auto& l : res.levels) {
    out << fmt::format("{:.17g},{:.17g},{:.17g},{}\n", l.h, l.err, l.stderr_, l.n_realizations);
  }
}

nlohmann::json fit_to_json(const OrderFit& f) {
  nlohmann::json pts = nlohmann::json::array();
  for (const auto& [h, e] : f.points) pts.push_back({h, e});
  return {{"slope", f.slope}, {"intercept", f.intercept}, {"r_squared", f.r_squared}, {"points", pts}};
}

std::string convergence_text(const ConvergenceResult& res, std::string_view label) {
  std::string s = fmt::format("{:>14}  {:>14}  {:>14}  {:>6}\n", label, "err", "stderr", "n");
  for (const auto& l : res.levels) {
    s += fmt::format("{:>14.6e}  {:>14.6e}  {:>14.6e}  {:>6}\n", l.h, l.err, l.stderr_, l.n_realizations);
  }
  s += fmt::format("slope {:.4f}  intercept {:.4f}  r^2 {:.4f}\n", res.fit.slope, res.fit.intercept,
                   res.fit.r_squared);
  return s;
}

constexpr const char* kConvergencePlot = R"(import csv
import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

rows = list(csv.DictReader(open("convergence.csv")))
h = [float(r["h"]) for r in rows]
err = [float(r["err"]) for r in rows]
se = [float(r["stderr"]) for r in rows]
fig, ax = plt.subplots()
ax.errorbar(h, err, yerr=se, marker="o", capsize=3, label="mean rms error")
ref = [err[0] * (x / h[0]) ** {slope:.6f} for x in h]
ax.plot(h, ref, "k--", label="fit, slope {slope:.3f}")
ax.set_xscale("log")
ax.set_yscale("log")
ax.set_xlabel("{xlabel}")
ax.set_ylabel("error at T")
ax.legend()
fig.savefig("convergence.png", dpi=150)
)";

constexpr const char* kDynamicsPlot = R"(import csv
from collections import defaultdict
import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

def load(name):
    snaps = defaultdict(list)
    for r in csv.DictReader(open(name)):
        snaps[float(r["t"])].append((float(r["x"]), float(r["y"])))
    return snaps

sources = [("mh_trajectory.csv", "ro", "M-H"), ("sde_trajectory.csv", "k*", "SDE"),
           ("pde_trajectory.csv", "b-", "PDE")]
data = [(load(f), style, label) for f, style, label in sources]
times = sorted(data[0][0])
cols = min(4, len(times))
rows = (len(times) + cols - 1) // cols
fig, axes = plt.subplots(rows, cols, figsize=(3 * cols, 3 * rows), squeeze=False)
for ax, t in zip(axes.flat, times):
    for snaps, style, label in data:
        xs = [i for i in range(len(snaps[t]))]
        ax.plot(xs, [p[1] for p in snaps[t]], style, label=label, markersize=4)
    ax.set_title(f"t = {t:.3f}")
    ax.set_ylim(-1.05, 1.05)
axes.flat[0].legend()
fig.tight_layout()
fig.savefig("dynamics.png", dpi=150)

fig, ax = plt.subplots()
for name, label in [("mh_scalars.csv", "M-H"), ("sde_scalars.csv", "SDE"), ("pde_scalars.csv", "PDE")]:
    rows_ = list(csv.DictReader(open(name)))
    ax.plot([float(r["t"]) for r in rows_], [float(r["H"]) for r in rows_], label=label)
ax.set_xlabel("t")
ax.set_ylabel("energy")
ax.legend()
fig.savefig("energy.png", dpi=150)
)";

std::string fill_convergence_plot(double slope, std::string_view xlabel) {
  std::string s = kConvergencePlot;
  auto replace = [&](std::string_view key, const std::string& value) {
    for (auto pos = s.find(key); pos != std::string::npos; pos = s.find(key, pos + value.size())) {
      s.replace(pos, key.size(), value);
    }
  };
  replace("{slope:.6f}", fmt::format("{:.6f}", slope));
  replace("{slope:.3f}", fmt::format("{:.3f}", slope));
  replace("{xlabel}", std::string(xlabel));
  return s;
}

}  // namespace

int run_experiment(const ExperimentConfig& config, std::ostream& log) {
  config.validate();
  ArtifactWriter out(config.output_dir);
  nlohmann::json meta;
  meta["config"] = config.to_json();
  int code = 0;

  switch (config.scenario) {
    case Scenario::Dynamics: {
      const auto res = run_dynamics(config);
      out.write("mh_trajectory.csv", [&](std::ostream& o) { write_trajectory_csv(o, res.mh); });
      out.write("sde_trajectory.csv", [&](std::ostream& o) { write_trajectory_csv(o, res.sde); });
      out.write("pde_trajectory.csv", [&](std::ostream& o) { write_trajectory_csv(o, res.pde); });
      out.write("mh_scalars.csv", [&](std::ostream& o) { write_scalar_csv(o, res.mh); });
      out.write("sde_scalars.csv", [&](std::ostream& o) { write_scalar_csv(o, res.sde); });
      out.write("pde_scalars.csv", [&](std::ostream& o) { write_scalar_csv(o, res.pde); });
      for (std::size_t k = 0; k < res.times.size(); ++k) {
        const std::string stamp = fmt::format("{:.6f}", res.times[k]);
        out.write("snapshots/mh_t" + stamp + ".csv", [&](std::ostream& o) { write_snapshot_csv(o, res.mh.snapshots[k]); });
        out.write("snapshots/sde_t" + stamp + ".csv", [&](std::ostream& o) { write_snapshot_csv(o, res.sde.snapshots[k]); });
        out.write("snapshots/pde_t" + stamp + ".csv", [&](std::ostream& o) { write_snapshot_csv(o, res.pde.snapshots[k]); });
      }
      out.write("errors.csv", [&](std::ostream& o) {
        o << "t,mh_pde,mh_pde_stderr,sde_pde,sde_pde_stderr,mh_sde,mh_sde_stderr\n";
        for (std::size_t k = 0; k < res.times.size(); ++k) {
          o << fmt::format("{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{:.17g}\n", res.times[k], res.mh_pde[k],
                           res.mh_pde_se[k], res.sde_pde[k], res.sde_pde_se[k], res.mh_sde[k], res.mh_sde_se[k]);
        }
      });
      const std::size_t mid = res.times.size() / 2;
      nlohmann::json report = {{"scenario", "dynamics"},
                               {"mid_time", res.times[mid]},
                               {"mh_pde_mid", res.mh_pde[mid]},
                               {"sde_pde_mid", res.sde_pde[mid]},
                               {"mh_lags", res.mh_pde[mid] > res.sde_pde[mid]},
                               {"mh_accept_rate", res.mh.steps ? static_cast<double>(res.mh.accepted) / res.mh.steps : 1.0}};
      out.text("report.json", report.dump(2) + "\n");
      std::string txt = fmt::format("{:>10}  {:>14}  {:>14}  {:>14}\n", "t", "rms(MH,PDE)", "rms(SDE,PDE)", "rms(MH,SDE)");
      for (std::size_t k = 0; k < res.times.size(); ++k) {
        txt += fmt::format("{:>10.4f}  {:>14.6e}  {:>14.6e}  {:>14.6e}\n", res.times[k], res.mh_pde[k], res.sde_pde[k],
                           res.mh_sde[k]);
      }
      out.text("report.txt", txt);
      out.text("plot_dynamics.py", kDynamicsPlot);
      log << txt;
      meta["derived"] = res.derived;
      meta["seeds"] = res.seeds;
      break;
    }
    case Scenario::ConvDt:
    case Scenario::ConvDx: {
      const bool dt_sweep = config.scenario == Scenario::ConvDt;
      const auto res = dt_sweep ? run_conv_dt(config) : run_conv_dx(config);
      out.write("convergence.csv", [&](std::ostream& o) { write_convergence_csv(o, res); });
      out.write("samples.csv", [&](std::ostream& o) {
        o << "h,realization,err\n";
        for (const auto& l : res.levels) {
          for (std::size_t r = 0; r < l.samples.size(); ++r) o << fmt::format("{:.17g},{},{:.17g}\n", l.h, r, l.samples[r]);
        }
      });
      nlohmann::json report = {{"scenario", to_string(config.scenario)}, {"fit", fit_to_json(res.fit)}};
      out.text("report.json", report.dump(2) + "\n");
      const std::string txt = convergence_text(res, dt_sweep ? "dt" : "dx");
      out.text("report.txt", txt);
      out.text("plot_convergence.py", fill_convergence_plot(res.fit.slope, dt_sweep ? "time step dt" : "lattice spacing dx"));
      log << txt;
      meta["derived"] = res.derived;
      meta["seeds"] = res.seeds;
      break;
    }
    case Scenario::Validate: {
      const auto res = run_validate(config);
      nlohmann::json reports = nlohmann::json::array();
      for (const auto& r : res.reports) reports.push_back(to_json(r));
      nlohmann::json report = {{"scenario", "validate"}, {"passed", res.passed}, {"validators", reports}};
      out.text("report.json", report.dump(2) + "\n");
      const std::string txt = render_text(res.reports) + fmt::format("overall [{}]\n", res.passed ? "PASS" : "FAIL");
      out.text("report.txt", txt);
      for (const auto& r : res.reports) {
        if (!r.details.contains("fit")) continue;
        out.write(r.name + "_residuals.csv", [&](std::ostream& o) {
          o << "h,err,stderr,n_realizations\n";
          for (const auto& l : r.details["levels"]) {
            o << fmt::format("{:.17g},{:.17g},{:.17g},{}\n", l["eps"].get<double>(), l["max_residual"].get<double>(),
                             l["max_stderr"].get<double>(), config.n_trials);
          }
        });
      }
      log << txt;
      meta["derived"] = res.derived;
      meta["seeds"] = {{"base", config.seed}};
      code = res.passed ? 0 : 4;
      break;
    }
  }

  meta["artifacts"] = out.hashes();
  std::ofstream m(fs::path(config.output_dir) / "metadata.json");
  m << meta.dump(2) << "\n";
  return code;
}

}  // namespace spinflow
