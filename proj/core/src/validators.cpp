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

#include "spinflow/validators.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <cmath>

#include "spinflow/errors.hpp"
#include "spinflow/philox.hpp"
#include "spinflow/sphere.hpp"
#include "spinflow/workers.hpp"

namespace spinflow {

Check check_at_most(std::string name, double value, double hi) {
  Check c{std::move(name), value};
  c.hi = hi;
  c.passed = value <= hi;
  return c;
}

Check check_at_least(std::string name, double value, double lo) {
  Check c{std::move(name), value};
  c.lo = lo;
  c.passed = value >= lo;
  return c;
}

Check check_within(std::string name, double value, double lo, double hi) {
  Check c{std::move(name), value, lo, hi};
  c.passed = value >= lo && value <= hi;
  return c;
}

void ValidatorReport::add(Check check) {
  passed = passed && check.passed;
  checks.push_back(std::move(check));
}

namespace {

nlohmann::json finite_or_null(double v) {
  return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

std::string bound_text(const Check& c) {
  const bool has_lo = std::isfinite(c.lo);
  const bool has_hi = std::isfinite(c.hi);
  if (has_lo && has_hi) return fmt::format("in [{:.4g}, {:.4g}]", c.lo, c.hi);
  if (has_hi) return fmt::format("<= {:.4g}", c.hi);
  if (has_lo) return fmt::format(">= {:.4g}", c.lo);
  return "";
}

}  // namespace

nlohmann::json to_json(const ValidatorReport& report) {
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& c : report.checks) {
    checks.push_back({{"name", c.name},
                      {"value", finite_or_null(c.value)},
                      {"lo", finite_or_null(c.lo)},
                      {"hi", finite_or_null(c.hi)},
                      {"passed", c.passed}});
  }
  return {{"name", report.name}, {"passed", report.passed}, {"checks", checks}, {"details", report.details}};
}

std::string render_text(std::span<const ValidatorReport> reports) {
  std::size_t width = 10;
  for (const auto& r : reports) {
    for (const auto& c : r.checks) width = std::max(width, c.name.size());
  }
  std::string out;
  for (const auto& r : reports) {
    out += fmt::format("{} [{}]\n", r.name, r.passed ? "PASS" : "FAIL");
    for (const auto& c : r.checks) {
      out += fmt::format("  {:<{}}  {:>14.6e}  {:<28} {}\n", c.name, width, c.value, bound_text(c),
                         c.passed ? "ok" : "FAIL");
    }
  }
  return out;
}

std::vector<Vec3> predicted_drift(const SpinConfiguration& config, double beta, double eps) {
  const double e2 = eps * eps;
  const double m = config.components() - 1;
  std::vector<Vec3> out(config.size());
  for (std::size_t i = 0; i < config.size(); ++i) {
    const Vec3 pg = kernel::project(config[i], hamiltonian_gradient(config, i));
    out[i] = (-0.5 * beta * e2) * pg - (0.5 * m * e2) * config[i];
  }
  return out;
}

double allowance_constant(const SpinConfiguration& config, double beta) {
  double g2 = 0.0;
  for (std::size_t i = 0; i < config.size(); ++i) {
    g2 += norm2(kernel::project(config[i], hamiltonian_gradient(config, i)));
  }
  const double t = 1.0 + beta * std::sqrt(g2);
  return 10.0 * t * t;
}

namespace {

constexpr std::uint64_t kPurposes = 4;

Vec3 draw(const CounterRng& rng, Stream stream, std::uint64_t index, std::uint32_t lane, int comps) {
  Vec3 v{};
  for (int k = 0; k < comps; ++k) v[static_cast<std::size_t>(k)] = rng.normal(stream, index, lane, k);
  return v;
}

struct LevelAcc {
  std::vector<std::array<double, 3>> r_sum, r_sq;  // variance-reduced drift residual
  std::vector<std::array<double, 3>> p_sum, p_sq;  // plain Bernoulli drift residual
  std::vector<std::array<double, 9>> z_sum, z_sq;  // second moment minus ε²P
  std::vector<double> l_sum, l_sq;                 // lag-1 products

  explicit LevelAcc(std::size_t M = 0)
      : r_sum(M), r_sq(M), p_sum(M), p_sq(M), z_sum(M), z_sq(M), l_sum(M), l_sq(M) {}

  void merge(const LevelAcc& o) {
    auto add = [](auto& a, const auto& b) {
      for (std::size_t i = 0; i < a.size(); ++i) {
        for (std::size_t k = 0; k < a[i].size(); ++k) a[i][k] += b[i][k];
      }
    };
    add(r_sum, o.r_sum);
    add(r_sq, o.r_sq);
    add(p_sum, o.p_sum);
    add(p_sq, o.p_sq);
    add(z_sum, o.z_sum);
    add(z_sq, o.z_sq);
    for (std::size_t i = 0; i < l_sum.size(); ++i) {
      l_sum[i] += o.l_sum[i];
      l_sq[i] += o.l_sq[i];
    }
  }
};

struct Moments {
  std::vector<LevelAcc> levels;
  std::vector<std::vector<Vec3>> predicted;
  std::int64_t n = 0;
};

void require_finite_beta(const ModelParams& params) {
  if (!std::isfinite(params.beta) || params.beta < 0.0) {
    throw InvalidInput(fmt::format("one-step validators need a finite beta >= 0, got {}", params.beta));
  }
}

Moments one_step_moments(const SpinConfiguration& config, const ModelParams& params,
                         std::span<const double> eps_list, const ValidatorOptions& options, bool with_lag) {
  require_finite_beta(params);
  if (options.n_trials < 2) throw InvalidInput("validators need at least two trials");
  if (eps_list.empty()) throw InvalidInput("empty eps list");
  const std::size_t M = config.size();
  const int comps = config.components();
  const double m = comps - 1;
  const double beta = params.beta;
  const std::size_t L = eps_list.size();

  std::vector<Vec3> grad(M), pgrad(M);
  for (std::size_t i = 0; i < M; ++i) {
    grad[i] = hamiltonian_gradient(config, i);
    pgrad[i] = kernel::project(config[i], grad[i]);
  }
  Moments out;
  out.n = options.n_trials;
  for (double eps : eps_list) out.predicted.push_back(predicted_drift(config, beta, eps));

  const std::int64_t n_chunks = std::min<std::int64_t>(64, options.n_trials);
  const CounterRng rng(options.seed);

  auto run_chunk = [&](std::size_t c) {
    const std::int64_t lo = options.n_trials * static_cast<std::int64_t>(c) / n_chunks;
    const std::int64_t hi = options.n_trials * static_cast<std::int64_t>(c + 1) / n_chunks;
    std::vector<LevelAcc> acc(L, LevelAcc(M));
    std::vector<Vec3> w(M), nu(M), w1(M), w2(M), dp(M), dm(M), g1(M), g2(M);
    SpinConfiguration plus = config, minus = config, s1 = config, s2 = config;

    for (std::int64_t t = lo; t < hi; ++t) {
      const auto trial = static_cast<std::uint64_t>(t);
      for (std::size_t i = 0; i < M; ++i) {
        w[i] = draw(rng, Stream::kValidator, trial * kPurposes, static_cast<std::uint32_t>(i), comps);
        nu[i] = kernel::project(config[i], w[i]);
        if (with_lag) {
          w1[i] = draw(rng, Stream::kValidator, trial * kPurposes + 1, static_cast<std::uint32_t>(i), comps);
          w2[i] = draw(rng, Stream::kValidator, trial * kPurposes + 2, static_cast<std::uint32_t>(i), comps);
        }
      }
      double g_dot_nu = 0.0;
      for (std::size_t i = 0; i < M; ++i) g_dot_nu += dot(grad[i], nu[i]);
      const double u0 = rng.uniform(Stream::kValidatorAccept, trial * kPurposes, 0);
      const double u1 = rng.uniform(Stream::kValidatorAccept, trial * kPurposes + 1, 0);
      const double u2 = rng.uniform(Stream::kValidatorAccept, trial * kPurposes + 2, 0);

      for (std::size_t l = 0; l < L; ++l) {
        const double eps = eps_list[l];
        const double e2 = eps * eps;
        const auto& pred = out.predicted[l];
        auto& a = acc[l];

        propose_from_noise(config, eps, w, options.kind, plus);
        propose_from_noise(config, -eps, w, options.kind, minus);
        const double ap = acceptance_probability(beta, delta_hamiltonian(config, plus));
        const double am = acceptance_probability(beta, delta_hamiltonian(config, minus));
        const bool plain_accept = u0 < ap;

        for (std::size_t i = 0; i < M; ++i) {
          const Vec3& s = config[i];
          dp[i] = plus[i] - s;
          dm[i] = minus[i] - s;
          // Antithetic, Rao-Blackwellized mean with two zero-mean control variates.
          const Vec3 x = 0.5 * (ap * dp[i] + am * dm[i]) + (0.5 * e2 * (norm2(nu[i]) - m)) * s +
                         (0.5 * beta * e2) * (g_dot_nu * nu[i] - pgrad[i]);
          const Vec3 r = x - pred[i];
          const Vec3 pr = (plain_accept ? dp[i] : Vec3{}) - pred[i];
          for (std::size_t k = 0; k < 3; ++k) {
            a.r_sum[i][k] += r[k];
            a.r_sq[i][k] += r[k] * r[k];
            a.p_sum[i][k] += pr[k];
            a.p_sq[i][k] += pr[k] * pr[k];
          }
          for (std::size_t k = 0; k < 3; ++k) {
            for (std::size_t q = 0; q < 3; ++q) {
              const double z = 0.5 * (ap * dp[i][k] * dp[i][q] + am * dm[i][k] * dm[i][q]) -
                               e2 * nu[i][k] * nu[i][q];
              a.z_sum[i][3 * k + q] += z;
              a.z_sq[i][3 * k + q] += z * z;
            }
          }
        }

        if (with_lag) {
          propose_from_noise(config, eps, w1, options.kind, plus);
          const bool acc1 = u1 < acceptance_probability(beta, delta_hamiltonian(config, plus));
          s1 = acc1 ? plus : config;
          const auto pred1 = predicted_drift(s1, beta, eps);
          propose_from_noise(s1, eps, w2, options.kind, s2);
          const bool acc2 = u2 < acceptance_probability(beta, delta_hamiltonian(s1, s2));
          for (std::size_t i = 0; i < M; ++i) {
            g1[i] = s1[i] - config[i] - pred[i];
            g2[i] = (acc2 ? s2[i] - s1[i] : Vec3{}) - pred1[i];
            const double prod = dot(g1[i], g2[i]);
            a.l_sum[i] += prod;
            a.l_sq[i] += prod * prod;
          }
        }
      }
    }
    return acc;
  };

  auto chunks = parallel_map(static_cast<std::size_t>(n_chunks), options.workers, run_chunk);
  out.levels.assign(L, LevelAcc(M));
  for (const auto& chunk : chunks) {
    for (std::size_t l = 0; l < L; ++l) out.levels[l].merge(chunk[l]);
  }
  return out;
}

// Mean and standard error of the mean from a sum and a sum of squares.
std::pair<double, double> mean_se(double sum, double sq, std::int64_t n) {
  const double dn = static_cast<double>(n);
  const double mean = sum / dn;
  const double var = std::max(0.0, (sq / dn - mean * mean) * dn / (dn - 1.0));
  return {mean, std::sqrt(var / dn)};
}

OrderFit fit_levels(const std::vector<double>& eps, const std::vector<double>& err) {
  std::vector<std::pair<double, double>> pts;
  for (std::size_t l = 0; l < eps.size(); ++l) pts.emplace_back(eps[l], err[l]);
  if (pts.size() < 3) {
    // Not enough levels for a fit; report the two-point slope when possible.
    OrderFit f;
    f.points = pts;
    if (pts.size() == 2 && pts[0].second > 0 && pts[1].second > 0) {
      f.slope = std::log(pts[1].second / pts[0].second) / std::log(pts[1].first / pts[0].first);
      f.r_squared = 1.0;
    }
    return f;
  }
  for (const auto& p : pts) {
    if (!(p.second > 0.0)) {
      OrderFit f;
      f.points = pts;
      f.slope = std::numeric_limits<double>::quiet_NaN();
      return f;
    }
  }
  return fit_order(pts);
}

nlohmann::json vec_json(const Vec3& v, int comps) {
  nlohmann::json a = nlohmann::json::array();
  for (int k = 0; k < comps; ++k) a.push_back(v[static_cast<std::size_t>(k)]);
  return a;
}

nlohmann::json fit_json(const OrderFit& f) {
  nlohmann::json pts = nlohmann::json::array();
  for (const auto& [h, e] : f.points) pts.push_back({h, e});
  return {{"slope", finite_or_null(f.slope)},
          {"intercept", finite_or_null(f.intercept)},
          {"r_squared", finite_or_null(f.r_squared)},
          {"points", pts}};
}

}  // namespace

DriftResult validate_drift(const SpinConfiguration& config, const ModelParams& params,
                           std::span<const double> eps_list, const ValidatorOptions& options) {
  const Moments mom = one_step_moments(config, params, eps_list, options, false);
  DriftResult res;
  res.allowance_constant = allowance_constant(config, params.beta);
  const std::size_t M = config.size();
  std::vector<double> eps_v, err_v;
  bool all_within = true;
  for (std::size_t l = 0; l < eps_list.size(); ++l) {
    const double eps = eps_list[l];
    const auto& acc = mom.levels[l];
    DriftLevel lev;
    lev.eps = eps;
    lev.predicted = mom.predicted[l];
    lev.allowance = res.allowance_constant * eps * eps * eps;
    lev.within_tolerance = true;
    for (std::size_t i = 0; i < M; ++i) {
      Vec3 mean{}, se{}, pmean{}, pse{};
      for (std::size_t k = 0; k < 3; ++k) {
        std::tie(mean[k], se[k]) = mean_se(acc.r_sum[i][k], acc.r_sq[i][k], mom.n);
        std::tie(pmean[k], pse[k]) = mean_se(acc.p_sum[i][k], acc.p_sq[i][k], mom.n);
      }
      lev.mean.push_back(lev.predicted[i] + mean);
      lev.residual.push_back(norm(mean));
      lev.stderr_.push_back(norm(se));
      lev.max_residual = std::max(lev.max_residual, norm(mean));
      lev.plain_max_residual = std::max(lev.plain_max_residual, norm(pmean));
      lev.plain_max_stderr = std::max(lev.plain_max_stderr, norm(pse));
      if (norm(mean) > options.n_sigma * norm(se) + lev.allowance) lev.within_tolerance = false;
    }
    all_within = all_within && lev.within_tolerance;
    eps_v.push_back(eps);
    err_v.push_back(lev.max_residual);
    res.levels.push_back(std::move(lev));
  }
  res.fit = fit_levels(eps_v, err_v);
  res.passed = all_within && (eps_list.size() < 2 || res.fit.slope >= options.min_slope);
  return res;
}

namespace {
double max_of(const std::vector<double>& xs) {
  return xs.empty() ? 0.0 : *std::max_element(xs.begin(), xs.end());
}
}  // namespace

ValidatorReport DriftResult::report() const {
  ValidatorReport r;
  r.name = "drift";
  nlohmann::json lv = nlohmann::json::array();
  for (const auto& l : levels) {
    double worst = 0.0;
    for (std::size_t i = 0; i < l.residual.size(); ++i) {
      worst = std::max(worst, l.residual[i] / (4.0 * l.stderr_[i] + l.allowance));
    }
    r.add(check_at_most(fmt::format("eps={:.3g} residual/(4se+C eps^3)", l.eps), worst, 1.0));
    nlohmann::json sites = nlohmann::json::array();
    for (std::size_t i = 0; i < l.residual.size(); ++i) {
      sites.push_back({{"mean", vec_json(l.mean[i], 3)},
                       {"predicted", vec_json(l.predicted[i], 3)},
                       {"residual", l.residual[i]},
                       {"stderr", l.stderr_[i]}});
    }
    lv.push_back({{"eps", l.eps},
                  {"allowance", l.allowance},
                  {"max_residual", l.max_residual},
                  {"max_stderr", max_of(l.stderr_)},
                  {"plain_max_residual", l.plain_max_residual},
                  {"plain_max_stderr", l.plain_max_stderr},
                  {"within_tolerance", l.within_tolerance},
                  {"sites", sites}});
  }
  if (levels.size() >= 2) r.add(check_at_least("residual slope in eps", fit.slope, 2.7));
  r.details = {{"allowance_constant", allowance_constant}, {"fit", fit_json(fit)}, {"levels", lv}};
  return r;
}

DiffusionResult validate_diffusion(const SpinConfiguration& config, const ModelParams& params,
                                   std::span<const double> eps_list, const ValidatorOptions& options) {
  const Moments mom = one_step_moments(config, params, eps_list, options, true);
  const int comps = config.components();
  DiffusionResult res;
  res.allowance_constant = allowance_constant(config, params.beta);
  const std::size_t M = config.size();
  std::vector<double> eps_v, err_v;
  bool all_ok = true;
  for (std::size_t l = 0; l < eps_list.size(); ++l) {
    const double eps = eps_list[l];
    const double e2 = eps * eps;
    const auto& acc = mom.levels[l];
    DiffusionLevel lev;
    lev.eps = eps;
    lev.allowance = res.allowance_constant * eps * eps * eps;
    lev.within_tolerance = lev.radial_ok = lev.lag1_ok = true;
    for (std::size_t i = 0; i < M; ++i) {
      const Vec3& s = config[i];
      Vec3 dmean = mom.predicted[l][i];
      for (std::size_t k = 0; k < 3; ++k) dmean[k] += acc.r_sum[i][k] / static_cast<double>(mom.n);
      std::array<double, 9> cov{};
      double resid2 = 0.0, se2 = 0.0;
      for (std::size_t k = 0; k < 3; ++k) {
        for (std::size_t q = 0; q < 3; ++q) {
          const auto [zm, zse] = mean_se(acc.z_sum[i][3 * k + q], acc.z_sq[i][3 * k + q], mom.n);
          const double target = e2 * ((k == q && k < static_cast<std::size_t>(comps) ? 1.0 : 0.0) - s[k] * s[q]);
          cov[3 * k + q] = zm + target - dmean[k] * dmean[q];
          const double d = cov[3 * k + q] - target;
          resid2 += d * d;
          se2 += zse * zse;
        }
      }
      double radial = 0.0;
      for (std::size_t k = 0; k < 3; ++k) {
        for (std::size_t q = 0; q < 3; ++q) radial += s[k] * cov[3 * k + q] * s[q];
      }
      const auto [lm, lse] = mean_se(acc.l_sum[i], acc.l_sq[i], mom.n);
      lev.covariance.push_back(cov);
      lev.residual.push_back(std::sqrt(resid2));
      lev.stderr_.push_back(std::sqrt(se2));
      lev.radial.push_back(radial);
      lev.lag1_mean.push_back(lm);
      lev.lag1_stderr.push_back(lse);
      lev.max_residual = std::max(lev.max_residual, std::sqrt(resid2));
      const double z = lse > 0.0 ? std::fabs(lm) / lse : (lm == 0.0 ? 0.0 : INFINITY);
      lev.max_lag1_z = std::max(lev.max_lag1_z, z);
      if (std::sqrt(resid2) > options.n_sigma * std::sqrt(se2) + lev.allowance) lev.within_tolerance = false;
      if (std::fabs(radial) > options.n_sigma * std::sqrt(se2) + lev.allowance) lev.radial_ok = false;
    }
    lev.lag1_ok = lev.max_lag1_z <= options.n_sigma;
    all_ok = all_ok && lev.within_tolerance && lev.radial_ok && lev.lag1_ok;
    eps_v.push_back(eps);
    err_v.push_back(lev.max_residual);
    res.levels.push_back(std::move(lev));
  }
  res.fit = fit_levels(eps_v, err_v);
  res.passed = all_ok && (eps_list.size() < 2 || res.fit.slope >= options.min_slope);
  return res;
}

ValidatorReport DiffusionResult::report() const {
  ValidatorReport r;
  r.name = "diffusion";
  nlohmann::json lv = nlohmann::json::array();
  for (const auto& l : levels) {
    double worst = 0.0, worst_radial = 0.0;
    for (std::size_t i = 0; i < l.residual.size(); ++i) {
      worst = std::max(worst, l.residual[i] / (4.0 * l.stderr_[i] + l.allowance));
      worst_radial = std::max(worst_radial, std::fabs(l.radial[i]) / (4.0 * l.stderr_[i] + l.allowance));
    }
    r.add(check_at_most(fmt::format("eps={:.3g} cov residual/(4se+C eps^3)", l.eps), worst, 1.0));
    r.add(check_at_most(fmt::format("eps={:.3g} radial variance/(4se+C eps^3)", l.eps), worst_radial, 1.0));
    r.add(check_at_most(fmt::format("eps={:.3g} lag-1 |z| max over sites", l.eps), l.max_lag1_z, 4.0));
    lv.push_back({{"eps", l.eps},
                  {"allowance", l.allowance},
                  {"max_residual", l.max_residual},
                  {"max_stderr", max_of(l.stderr_)},
                  {"residual", l.residual},
                  {"stderr", l.stderr_},
                  {"radial", l.radial},
                  {"lag1_mean", l.lag1_mean},
                  {"lag1_stderr", l.lag1_stderr}});
  }
  if (levels.size() >= 2) r.add(check_at_least("residual slope in eps", fit.slope, 2.7));
  r.details = {{"allowance_constant", allowance_constant}, {"fit", fit_json(fit)}, {"levels", lv}};
  return r;
}

Vec3 projected_noise_step(const Vec3& sigma, const Vec3& w, double dt, ProjectionKind kind) {
  const Vec3 dw = std::sqrt(dt) * w;
  const Vec3 kick = kind == ProjectionKind::Tangent ? kernel::project(sigma, dw) : cross(sigma, dw);
  return kernel::normalize(sigma + kick);
}

namespace {

MomentEstimate sphere_walk(int m, std::int64_t n_steps, double dt, std::uint64_t seed, ProjectionKind kind,
                           std::uint32_t lane, int n_batches) {
  const int comps = m + 1;
  const CounterRng rng(seed);
  const std::int64_t burn_in = 1000;
  const std::int64_t batch = n_steps / n_batches;
  const std::size_t n_second = static_cast<std::size_t>(comps * (comps + 1) / 2);

  Vec3 s{1.0, 0.0, 0.0};
  std::uint64_t index = 0;
  for (std::int64_t k = 0; k < burn_in; ++k) s = projected_noise_step(s, draw(rng, Stream::kValidator, index++, lane, comps), dt, kind);

  std::vector<std::vector<double>> first(static_cast<std::size_t>(comps)), second(n_second);
  for (int b = 0; b < n_batches; ++b) {
    std::array<double, 3> f{};
    std::array<double, 6> q{};
    for (std::int64_t k = 0; k < batch; ++k) {
      s = projected_noise_step(s, draw(rng, Stream::kValidator, index++, lane, comps), dt, kind);
      std::size_t idx = 0;
      for (int a = 0; a < comps; ++a) {
        f[static_cast<std::size_t>(a)] += s[static_cast<std::size_t>(a)];
        for (int c = a; c < comps; ++c) q[idx++] += s[static_cast<std::size_t>(a)] * s[static_cast<std::size_t>(c)];
      }
    }
    for (int a = 0; a < comps; ++a) first[static_cast<std::size_t>(a)].push_back(f[static_cast<std::size_t>(a)] / batch);
    for (std::size_t j = 0; j < n_second; ++j) second[j].push_back(q[j] / batch);
  }

  MomentEstimate est;
  est.kind = kind;
  for (const auto& xs : first) {
    const auto ms = mean_stderr(xs);
    est.mean.push_back(ms.mean);
    est.mean_se.push_back(ms.stderr_);
    est.max_z = std::max(est.max_z, std::fabs(ms.mean) / ms.stderr_);
  }
  std::size_t idx = 0;
  for (int a = 0; a < comps; ++a) {
    for (int c = a; c < comps; ++c, ++idx) {
      const auto ms = mean_stderr(second[idx]);
      const double target = a == c ? 1.0 / comps : 0.0;
      est.second.push_back(ms.mean);
      est.second_se.push_back(ms.stderr_);
      est.max_z = std::max(est.max_z, std::fabs(ms.mean - target) / ms.stderr_);
    }
  }
  return est;
}

}  // namespace

UniformityResult validate_sphere_uniformity(int m, std::int64_t n_steps, double dt, std::uint64_t seed,
                                            int n_batches) {
  if (m != 1 && m != 2) throw UnsupportedModel(fmt::format("sphere dimension {} is not supported", m));
  if (n_batches < 2 || n_steps < n_batches) throw InvalidInput("need at least two batches of one step");
  if (!(dt > 0.0)) throw InvalidInput("dt must be positive");
  UniformityResult res;
  res.m = m;
  res.n_steps = n_steps;
  res.dt = dt;
  res.n_batches = n_batches;
  res.runs.push_back(sphere_walk(m, n_steps, dt, seed, ProjectionKind::Tangent, 0, n_batches));
  if (m == 2) res.runs.push_back(sphere_walk(m, n_steps, dt, seed, ProjectionKind::Cross, 1, n_batches));
  res.passed = true;
  for (const auto& run : res.runs) res.passed = res.passed && run.max_z <= 4.0;
  if (res.runs.size() == 2) {
    const auto& a = res.runs[0];
    const auto& b = res.runs[1];
    auto cmp = [&](const std::vector<double>& x, const std::vector<double>& xs, const std::vector<double>& y,
                   const std::vector<double>& ys) {
      for (std::size_t k = 0; k < x.size(); ++k) {
        res.max_kind_z = std::max(res.max_kind_z, std::fabs(x[k] - y[k]) / std::hypot(xs[k], ys[k]));
      }
    };
    cmp(a.mean, a.mean_se, b.mean, b.mean_se);
    cmp(a.second, a.second_se, b.second, b.second_se);
    res.passed = res.passed && res.max_kind_z <= 4.0;
  }
  return res;
}

ValidatorReport UniformityResult::report() const {
  ValidatorReport r;
  r.name = fmt::format("sphere_uniformity_m{}", m);
  nlohmann::json runs_json = nlohmann::json::array();
  for (const auto& run : runs) {
    const char* kind = run.kind == ProjectionKind::Tangent ? "tangent" : "cross";
    r.add(check_at_most(fmt::format("{} max |z| vs uniform moments", kind), run.max_z, 4.0));
    runs_json.push_back({{"projection", kind},
                         {"mean", run.mean},
                         {"mean_se", run.mean_se},
                         {"second", run.second},
                         {"second_se", run.second_se},
                         {"max_z", run.max_z}});
  }
  if (runs.size() == 2) r.add(check_at_most("tangent vs cross max |z|", max_kind_z, 4.0));
  r.details = {{"m", m}, {"n_steps", n_steps}, {"dt", dt}, {"n_batches", n_batches}, {"runs", runs_json}};
  return r;
}

EnergyBoundResult energy_bound_monitor(std::span<const TrajectoryRecord> trajectories,
                                       const ModelParams& params, double T, double b) {
  if (!(b > 0.0)) throw InvalidInput("energy bound level b must be positive");
  if (!(params.beta > 0.0) || std::isinf(params.beta)) {
    throw InvalidInput("energy bound needs a finite positive beta");
  }
  EnergyBoundResult res;
  res.b = b;
  res.T = T;
  res.eps_sq = params.N / params.beta;
  res.threshold_increment = 4.0 * params.J * params.N * res.eps_sq * T;
  res.bound = std::exp(-b * params.N / res.eps_sq);
  res.proposal_eps_sq = params.eps * params.eps;
  res.proposal_bound = std::exp(-b * params.N / res.proposal_eps_sq);
  const double proposal_increment = 4.0 * params.J * params.N * res.proposal_eps_sq * T;
  for (const auto& tr : trajectories) {
    if (tr.energy.empty()) throw InvalidInput("trajectory has no energy trace");
    const double h0 = tr.energy.front();
    if (tr.max_energy > h0 + res.threshold_increment + b) ++res.exceedances;
    if (tr.max_energy > h0 + proposal_increment + b) ++res.proposal_exceedances;
  }
  res.realizations = static_cast<std::int64_t>(trajectories.size());
  const double R = static_cast<double>(res.realizations);
  res.allowed = R * res.bound + 4.0 * std::sqrt(R * res.bound * (1.0 - res.bound));
  res.passed = static_cast<double>(res.exceedances) <= res.allowed;
  return res;
}

ValidatorReport EnergyBoundResult::report() const {
  ValidatorReport r;
  r.name = "energy_bound";
  r.add(check_at_most("exceedances of H(0)+4JN eps^2 T+b", static_cast<double>(exceedances), allowed));
  r.details = {{"b", b},
               {"T", T},
               {"eps_sq", eps_sq},
               {"threshold_increment", threshold_increment},
               {"bound", bound},
               {"realizations", realizations},
               {"exceedances", exceedances},
               {"allowed", allowed},
               {"proposal_eps_sq", proposal_eps_sq},
               {"proposal_bound", proposal_bound},
               {"proposal_exceedances", proposal_exceedances}};
  return r;
}

TaylorResult taylor_residual_sweep(Model model, std::span<const double> eps_list, int n_samples,
                                   std::uint64_t seed) {
  if (n_samples < 1) throw InvalidInput("taylor sweep needs at least one sample");
  const int comps = components(model);
  const CounterRng rng(seed);
  std::vector<Vec3> sigma, nu;
  for (int k = 0; k < n_samples; ++k) {
    const auto idx = static_cast<std::uint64_t>(k);
    const Vec3 s = kernel::normalize(draw(rng, Stream::kValidator, idx, 0, comps));
    sigma.push_back(s);
    nu.push_back(kernel::project(s, draw(rng, Stream::kValidator, idx, 1, comps)));
  }
  TaylorResult res;
  std::vector<double> e, a, c, d;
  for (double eps : eps_list) {
    TaylorLevel lev;
    lev.eps = eps;
    for (int k = 0; k < n_samples; ++k) {
      const auto sv = SpinVector::trusted(sigma[static_cast<std::size_t>(k)], comps);
      const auto t = taylor_residuals(sv, eps * nu[static_cast<std::size_t>(k)]);
      lev.max_a = std::max(lev.max_a, norm(t.a));
      lev.max_c = std::max(lev.max_c, norm(t.c));
      lev.max_d = std::max(lev.max_d, norm(t.d));
    }
    e.push_back(eps);
    a.push_back(lev.max_a);
    c.push_back(lev.max_c);
    d.push_back(lev.max_d);
    res.levels.push_back(lev);
  }
  res.fit_a = fit_levels(e, a);
  res.fit_c = fit_levels(e, c);
  res.fit_d = fit_levels(e, d);
  res.passed = std::fabs(res.fit_a.slope - 3.0) <= res.tolerance &&
               std::fabs(res.fit_c.slope - 2.0) <= res.tolerance &&
               std::fabs(res.fit_d.slope - 3.0) <= res.tolerance;
  return res;
}

ValidatorReport TaylorResult::report() const {
  ValidatorReport r;
  r.name = "taylor_residuals";
  r.add(check_within("slope max|a| (exp - normalized)", fit_a.slope, 3.0 - tolerance, 3.0 + tolerance));
  r.add(check_within("slope max|c| (exp - linear)", fit_c.slope, 2.0 - tolerance, 2.0 + tolerance));
  r.add(check_within("slope max|d| (exp - quadratic)", fit_d.slope, 3.0 - tolerance, 3.0 + tolerance));
  nlohmann::json lv = nlohmann::json::array();
  for (const auto& l : levels) lv.push_back({{"eps", l.eps}, {"max_a", l.max_a}, {"max_c", l.max_c}, {"max_d", l.max_d}});
  r.details = {{"levels", lv}, {"fit_a", fit_json(fit_a)}, {"fit_c", fit_json(fit_c)}, {"fit_d", fit_json(fit_d)}};
  return r;
}

}  // namespace spinflow
