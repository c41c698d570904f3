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

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "dkrm/error.hpp"
#include "dkrm/influence.hpp"
#include "test_support.hpp"

namespace dkrm {
namespace {

using testing::default_schema;

RewardModel linear(const std::vector<double>& w) {
  Mlp net({7, 1}, Activation::kTanh);
  std::copy(w.begin(), w.end(), net.weights(0).begin());
  return RewardModel(default_schema(), std::move(net));
}

TEST(FeatureInfluence, LinearModelIsExactForEverySampling) {
  const std::vector<double> w{0.5, 0.25, 0.25, 0, 0, 0, 0};
  const auto m = linear(w);
  InfluenceConfig mc;
  mc.sample_count = 300;
  InfluenceConfig grid;
  grid.sampling = InfluenceConfig::Sampling::kFullGrid;
  grid.points_per_axis = 2;
  for (const auto& cfg : {mc, grid}) {
    const auto r = feature_influence(m, cfg);
    ASSERT_EQ(r.normalized.size(), 7u);
    for (std::size_t i = 0; i < 7; ++i) EXPECT_NEAR(r.normalized[i], w[i], 1e-9) << i;
    EXPECT_EQ(r.feature_names[0], "aspect-coverage");
  }
  EXPECT_EQ(feature_influence(m, grid).sample_count, 128u);
}

TEST(FeatureInfluence, NegativeWeightsKeepSignUnderAbsoluteNormalization) {
  const auto r = feature_influence(linear({0.5, -0.5, 0, 0, 0, 0, 0}), InfluenceConfig{});
  EXPECT_NEAR(r.normalized[0], 0.5, 1e-9);
  EXPECT_NEAR(r.normalized[1], -0.5, 1e-9);
}

TEST(FeatureInfluence, ConstantModelIsDegenerate) {
  const auto m = RewardModel::zeros(default_schema(), {4}, Activation::kTanh);
  try {
    feature_influence(m, InfluenceConfig{});
    FAIL();
  } catch (const NumericalError& e) {
    EXPECT_NE(std::string(e.what()).find("zero total influence"), std::string::npos);
  }
}

TEST(FeatureInfluence, RejectsBadConfig) {
  const auto m = linear({1, 1, 1, 1, 1, 1, 1});
  InfluenceConfig c;
  for (double d : {0.0, -0.1, 2.5, 3.0}) {
    c.delta = d;
    try {
      feature_influence(m, c);
      FAIL() << d;
    } catch (const DataError& e) {
      EXPECT_NE(std::string(e.what()).find("delta out of range"), std::string::npos);
    }
  }
  c = InfluenceConfig{};
  c.sample_count = 0;
  EXPECT_THROW(feature_influence(m, c), DataError);
  c = InfluenceConfig{};
  c.sampling = InfluenceConfig::Sampling::kFullGrid;
  c.points_per_axis = 1;
  EXPECT_THROW(feature_influence(m, c), DataError);
}

// Property: normalized shares sum to one in absolute value.
TEST(FeatureInfluence, NormalizedSharesSumToOne) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng(seed);
    const auto m = RewardModel::glorot(default_schema(), {16, 16}, Activation::kTanh, rng);
    InfluenceConfig c;
    c.sample_count = 256;
    c.seed = seed;
    const auto r = feature_influence(m, c);
    double s = 0.0;
    for (double v : r.normalized) s += std::abs(v);
    EXPECT_NEAR(s, 1.0, 1e-9);
  }
}

// Property: positive output scaling leaves the normalized report unchanged.
TEST(FeatureInfluence, InvariantUnderPositiveOutputScaling) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Rng rng(seed);
    auto m = RewardModel::glorot(default_schema(), {16, 16}, Activation::kTanh, rng);
    InfluenceConfig c;
    c.sample_count = 256;
    const auto base = feature_influence(m, c);
    const double k = rng.uniform(0.1, 10.0);
    const std::size_t last = m.net.layer_count() - 1;
    for (double& w : m.net.weights(last)) w *= k;
    for (double& b : m.net.bias(last)) b *= k;
    const auto scaled = feature_influence(m, c);
    for (std::size_t i = 0; i < 7; ++i) {
      EXPECT_NEAR(scaled.raw[i], k * base.raw[i], 1e-9 * (1.0 + std::abs(k * base.raw[i])));
      EXPECT_NEAR(scaled.normalized[i], base.normalized[i], 1e-9);
    }
  }
}

// Property: swapping two inputs together with their first-layer columns
// swaps the corresponding influence entries. The full grid is symmetric
// across axes, so the comparison is exact up to rounding.
TEST(FeatureInfluence, EquivariantUnderFeaturePermutation) {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    Rng rng(seed);
    auto m = RewardModel::glorot(default_schema(), {6}, Activation::kTanh, rng);
    const std::size_t i = rng.below(7);
    std::size_t j = rng.below(7);
    if (j == i) j = (i + 1) % 7;
    InfluenceConfig c;
    c.sampling = InfluenceConfig::Sampling::kFullGrid;
    c.points_per_axis = 3;
    const auto base = feature_influence(m, c);
    auto w = m.net.weights(0);
    for (std::size_t row = 0; row < 6; ++row) std::swap(w[row * 7 + i], w[row * 7 + j]);
    const auto swapped = feature_influence(m, c);
    for (std::size_t k = 0; k < 7; ++k) {
      const std::size_t src = k == i ? j : (k == j ? i : k);
      EXPECT_NEAR(swapped.normalized[k], base.normalized[src], 1e-12);
    }
  }
}

TEST(FeatureInfluence, MonteCarloSeedsAgree) {
  Rng rng(21);
  const auto m = RewardModel::glorot(default_schema(), {16, 16}, Activation::kTanh, rng);
  InfluenceConfig a, b;
  a.seed = 1;
  b.seed = 2;
  const auto ra = feature_influence(m, a), rb = feature_influence(m, b);
  for (std::size_t i = 0; i < 7; ++i) EXPECT_NEAR(ra.normalized[i], rb.normalized[i], 0.02);
}

TEST(FeatureInfluence, ThreadCountDoesNotChangeResult) {
  Rng rng(22);
  const auto m = RewardModel::glorot(default_schema(), {16, 16}, Activation::kTanh, rng);
  InfluenceConfig c;
  c.sample_count = 2000;
  const auto one = feature_influence(m, c);
  for (std::size_t t : {2u, 3u, 7u}) {
    c.threads = t;
    const auto many = feature_influence(m, c);
    for (std::size_t i = 0; i < 7; ++i) {
      EXPECT_NEAR(many.raw[i], one.raw[i], 1e-12);
      EXPECT_NEAR(many.normalized[i], one.normalized[i], 1e-12);
    }
  }
}

TEST(InfluenceReport, CsvAndChart) {
  const auto r = feature_influence(linear({0.5, 0.25, 0.25, 0, 0, 0, 0}), InfluenceConfig{});
  const auto csv = r.to_csv();
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "feature,raw,normalized");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 8);
  const auto chart = r.to_bar_chart(20);
  EXPECT_NE(chart.find("aspect-coverage"), std::string::npos);
  EXPECT_NE(chart.find(std::string(10, '#')), std::string::npos);
}

}  // namespace
}  // namespace dkrm
