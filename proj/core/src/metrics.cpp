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

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

#include "spinflow/errors.hpp"
#include "spinflow/numerics.hpp"

namespace spinflow {

std::string_view to_string(MetricKind kind) {
  switch (kind) {
    case MetricKind::RmsAtT:
      return "rms_at_T";
    case MetricKind::SupToT:
      return "sup_to_T";
    case MetricKind::ScaledE:
      return "scaled_e_of_t";
  }
  return "?";
}

double OrderFit::predict(double h) const { return std::exp(intercept + slope * std::log(h)); }

namespace {

void require_same(const SpinConfiguration& a, const SpinConfiguration& b) {
  if (!a.same_lattice(b)) {
    throw InvalidInput(fmt::format("configurations differ in shape ({} vs {} sites)", a.size(), b.size()));
  }
}

void require_aligned(const TrajectoryRecord& a, const TrajectoryRecord& b) {
  if (a.snapshot_times.size() != b.snapshot_times.size()) {
    throw InvalidInput(fmt::format("snapshot grids differ in length ({} vs {})", a.snapshot_times.size(),
                                   b.snapshot_times.size()));
  }
  for (std::size_t k = 0; k < a.snapshot_times.size(); ++k) {
    const double ta = a.snapshot_times[k];
    const double tb = b.snapshot_times[k];
    if (std::fabs(ta - tb) > 1e-9 * std::max(1.0, std::fabs(ta))) {
      throw InvalidInput(fmt::format("snapshot grids differ at index {} ({} vs {})", k, ta, tb));
    }
  }
}

}  // namespace

double rms_config_error(const SpinConfiguration& a, const SpinConfiguration& b) {
  require_same(a, b);
  CompensatedSum sum;
  for (std::size_t i = 0; i < a.size(); ++i) sum += norm2(a[i] - b[i]);
  return std::sqrt(sum.value() / static_cast<double>(a.size()));
}

double max_sq_site_error(const SpinConfiguration& a, const SpinConfiguration& b) {
  require_same(a, b);
  double best = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) best = std::max(best, norm2(a[i] - b[i]));
  return best;
}

ErrorSeries scaled_error_e(const TrajectoryRecord& sde, const TrajectoryRecord& pde, double p,
                           double eps) {
  require_aligned(sde, pde);
  if (!(eps > 0.0) && p != 0.0) throw InvalidInput("scaled error needs eps > 0 when p != 0");
  const double scale = p == 0.0 ? 1.0 : std::pow(eps, -2.0 * p);
  ErrorSeries out;
  out.metric_kind = MetricKind::ScaledE;
  out.p = p;
  for (std::size_t k = 0; k < sde.snapshots.size(); ++k) {
    const double rms = rms_config_error(sde.snapshots[k], pde.snapshots[k]);
    out.times.push_back(sde.snapshot_times[k]);
    out.values.push_back(scale * rms * rms);
  }
  return out;
}

ErrorSeries sup_error(const TrajectoryRecord& a, const TrajectoryRecord& b) {
  require_aligned(a, b);
  ErrorSeries out;
  out.metric_kind = MetricKind::SupToT;
  double running = 0.0;
  for (std::size_t k = 0; k < a.snapshots.size(); ++k) {
    running = std::max(running, max_sq_site_error(a.snapshots[k], b.snapshots[k]));
    out.times.push_back(a.snapshot_times[k]);
    out.values.push_back(running);
  }
  return out;
}

OrderFit fit_order(std::span<const std::pair<double, double>> points) {
  if (points.size() < 3) {
    throw InvalidInput(fmt::format("order fit needs at least 3 points, got {}", points.size()));
  }
  const double n = static_cast<double>(points.size());
  double sx = 0.0, sy = 0.0;
  for (const auto& [h, err] : points) {
    if (!(h > 0.0) || !(err > 0.0) || !std::isfinite(h) || !std::isfinite(err)) {
      throw InvalidInput(fmt::format("order fit needs positive finite points, got ({}, {})", h, err));
    }
    sx += std::log(h);
    sy += std::log(err);
  }
  const double mx = sx / n;
  const double my = sy / n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (const auto& [h, err] : points) {
    const double dx = std::log(h) - mx;
    const double dy = std::log(err) - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx == 0.0) throw InvalidInput("order fit needs at least two distinct step sizes");
  OrderFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r_squared = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  fit.points.assign(points.begin(), points.end());
  return fit;
}

MeanStderr mean_stderr(std::span<const double> xs) {
  MeanStderr out;
  out.n = xs.size();
  if (xs.empty()) return out;
  CompensatedSum sum;
  for (double x : xs) sum += x;
  out.mean = sum.value() / static_cast<double>(xs.size());
  if (xs.size() > 1) {
    CompensatedSum ss;
    for (double x : xs) ss += (x - out.mean) * (x - out.mean);
    out.stderr_ = std::sqrt(ss.value() / static_cast<double>(xs.size() - 1) / static_cast<double>(xs.size()));
  }
  return out;
}

}  // namespace spinflow
