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

#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "spinflow/lattice.hpp"
#include "spinflow/trajectory.hpp"

namespace spinflow {

enum class MetricKind { RmsAtT, SupToT, ScaledE };

std::string_view to_string(MetricKind kind);

struct ErrorSeries {
  std::vector<double> times;
  std::vector<double> values;
  MetricKind metric_kind = MetricKind::RmsAtT;
  std::optional<double> p;
};

struct OrderFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::vector<std::pair<double, double>> points;

  double predict(double h) const;
};

/// sqrt((1/M) Σ ‖a_i − b_i‖²).
double rms_config_error(const SpinConfiguration& a, const SpinConfiguration& b);

/// max_i ‖a_i − b_i‖².
double max_sq_site_error(const SpinConfiguration& a, const SpinConfiguration& b);

/// e(t) = (1/M) Σ ‖eps^{−p}(σ_i(t) − σ̃_i(t))‖² on the common snapshot grid.
ErrorSeries scaled_error_e(const TrajectoryRecord& sde, const TrajectoryRecord& pde, double p,
                           double eps);

/// Running maximum over s ≤ t of max_i ‖a_i(s) − b_i(s)‖².
ErrorSeries sup_error(const TrajectoryRecord& a, const TrajectoryRecord& b);

/// Least squares of log(err) on log(h). Needs ≥ 3 points, all positive.
OrderFit fit_order(std::span<const std::pair<double, double>> points);

struct MeanStderr {
  double mean = 0.0;
  double stderr_ = 0.0;
  std::size_t n = 0;
};

/// Sample mean and its standard error, summed in index order.
MeanStderr mean_stderr(std::span<const double> xs);

}  // namespace spinflow
