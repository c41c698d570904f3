// Copyright 2026 The dkrm Authors.
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

#include <cstdint>
#include <string>
#include <vector>

#include "dkrm/reward_model.hpp"

namespace dkrm {

struct InfluenceConfig {
  enum class Sampling { kMonteCarloUniform, kFullGrid };

  double delta = 0.1;
  std::size_t sample_count = 8192;  // Monte Carlo only
  Sampling sampling = Sampling::kMonteCarloUniform;
  std::size_t points_per_axis = 5;  // full grid only
  std::uint64_t seed = 0;
  std::size_t threads = 1;
};

struct InfluenceReport {
  std::vector<std::string> feature_names;
  std::vector<double> raw;         // mean symmetric difference quotient per feature
  std::vector<double> normalized;  // raw / sum |raw|
  std::size_t sample_count = 0;

  /// "feature,raw,normalized"
  std::string to_csv() const;
  /// Horizontal bar chart of normalized shares, one feature per line.
  std::string to_bar_chart(std::size_t width = 40) const;
};

/// Per feature i, averages (f(x + delta e_i) - f(x - delta e_i)) / (2 delta)
/// over evaluation points x drawn from [min + delta, max - delta] on every
/// axis, then normalizes by the sum of absolute values.
///
/// Evaluation is split over config.threads workers; per-point differences are
/// reduced in index order with compensated summation, so the result does not
/// depend on the thread count.
///
/// Throws DataError("delta out of range") unless 0 < delta < smallest range / 2,
/// DataError on sample_count == 0 or points_per_axis < 2, and
/// NumericalError("zero total influence") when every raw entry is zero.
InfluenceReport feature_influence(const RewardModel& model, const InfluenceConfig& config);

}  // namespace dkrm
