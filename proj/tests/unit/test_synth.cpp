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
#include <random>

#include "dkrm/error.hpp"
#include "dkrm/synth.hpp"
#include "test_support.hpp"

namespace dkrm {
namespace {

using testing::default_schema;

const std::vector<double> kWeights{0.2, 0.18, 0.12, 0.08, 0.1, 0.25, 0.07};

TEST(LatentReward, LinearExamples) {
  const auto first = LatentRewardSpec::linear({1, 0, 0, 0, 0, 0, 0});
  EXPECT_EQ(latent_reward(first, default_schema(), FeatureVector{2, 4, 4, 4, 4, 4, 4}), 2.0);
  const auto sevenths = LatentRewardSpec::linear(std::vector<double>(7, 1.0 / 7.0));
  EXPECT_NEAR(latent_reward(sevenths, default_schema(), FeatureVector{5, 5, 5, 5, 5, 5, 5}), 5.0,
              1e-14);
}

TEST(LatentReward, RejectsBadSpecs) {
  EXPECT_THROW(LatentReward(LatentRewardSpec::linear({1, 2}), default_schema()), DataError);
  EXPECT_THROW(LatentReward(LatentRewardSpec::linear(kWeights, -1.0), default_schema()),
               DataError);
  EXPECT_THROW(LatentReward(LatentRewardSpec::linear({NAN, 0, 0, 0, 0, 0, 0}), default_schema()),
               DataError);
}

// Straight-loop re-implementation of the seeded random network: weights
// per layer in row-major order, then hidden/output biases in [-0.5, 0.5).
double reference_random_mlp(std::uint64_t seed, const std::vector<std::size_t>& hidden,
                            const std::vector<double>& raw) {
  std::mt19937_64 eng(seed);
  auto unit = [&] { return static_cast<double>(eng() >> 11) * 0x1.0p-53; };
  std::vector<std::size_t> dims{7};
  dims.insert(dims.end(), hidden.begin(), hidden.end());
  dims.push_back(1);
  std::vector<std::vector<double>> w(dims.size() - 1), b(dims.size() - 1);
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    const double a = std::sqrt(6.0 / static_cast<double>(dims[l] + dims[l + 1]));
    w[l].resize(dims[l] * dims[l + 1]);
    for (auto& x : w[l]) x = -a + 2.0 * a * unit();
  }
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    b[l].resize(dims[l + 1]);
    for (auto& x : b[l]) x = -0.5 + unit();
  }
  std::vector<double> act(7);
  for (std::size_t i = 0; i < 7; ++i) act[i] = raw[i] / 5.0;
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    std::vector<double> next(dims[l + 1]);
    for (std::size_t o = 0; o < dims[l + 1]; ++o) {
      double s = b[l][o];
      for (std::size_t i = 0; i < dims[l]; ++i) s += w[l][o * dims[l] + i] * act[i];
      next[o] = l + 2 < dims.size() ? std::tanh(s) : s;
    }
    act = std::move(next);
  }
  return act[0];
}

TEST(LatentReward, RandomMlpMatchesReferenceRecomputation) {
  const std::vector<double> x{3.6, 3.9, 3.8, 4.0, 4.1, 4.1, 4.6};
  for (const auto& hidden : {std::vector<std::size_t>{16, 16}, std::vector<std::size_t>{8}}) {
    const LatentReward latent(LatentRewardSpec::random_mlp(hidden, 11), default_schema());
    EXPECT_NEAR(latent(FeatureVector(x)), reference_random_mlp(11, hidden, x), 1e-12);
  }
}

TEST(SamplePreferences, NoiselessWinnerHasHigherReward) {
  const LatentReward latent(LatentRewardSpec::linear(kWeights), default_schema());
  const auto pairs = sample_preferences(latent, 940, 42);
  ASSERT_EQ(pairs.size(), 940u);
  for (const auto& p : pairs) {
    EXPECT_GE(latent(p.winner_features), latent(p.loser_features));
    validate_pair(p, default_schema());
  }
}

TEST(SamplePreferences, HugeTemperatureIsACoinFlip) {
  const LatentReward latent(LatentRewardSpec::linear(kWeights, 1e6), default_schema());
  const auto pairs = sample_preferences(latent, 10000, 5);
  std::size_t higher_wins = 0;
  for (const auto& p : pairs) higher_wins += latent(p.winner_features) > latent(p.loser_features);
  EXPECT_NEAR(static_cast<double>(higher_wins) / 10000.0, 0.5, 0.02);
}

TEST(SamplePreferences, DeterministicGivenSeed) {
  const LatentReward latent(LatentRewardSpec::random_mlp({16, 16}, 3, 0.5), default_schema());
  EXPECT_EQ(sample_preferences(latent, 50, 9), sample_preferences(latent, 50, 9));
  EXPECT_NE(sample_preferences(latent, 50, 9), sample_preferences(latent, 50, 10));
}

// Property: within buckets of the reward gap, the rate at which the first
// drawn candidate wins stays within binomial bounds of sigmoid(gap / t).
TEST(SamplePreferences, WinRateTracksBradleyTerryPerBucket) {
  const double t = 0.5;
  const LatentReward latent(LatentRewardSpec::linear(kWeights, t), default_schema());
  const auto pairs = sample_preferences(latent, 40000, 17);
  constexpr int kBuckets = 8;
  const double lo = -2.0, hi = 2.0;
  std::vector<double> wins(kBuckets, 0.0), expected(kBuckets, 0.0), var(kBuckets, 0.0);
  std::vector<std::size_t> count(kBuckets, 0);
  for (const auto& p : pairs) {
    const bool first_won = p.winner.candidate_id.back() == 'a';
    const auto& a = first_won ? p.winner_features : p.loser_features;
    const auto& b = first_won ? p.loser_features : p.winner_features;
    const double gap = latent(a) - latent(b);
    if (gap < lo || gap >= hi) continue;
    const auto k = static_cast<std::size_t>((gap - lo) / (hi - lo) * kBuckets);
    const double q = 1.0 / (1.0 + std::exp(-gap / t));
    wins[k] += first_won;
    expected[k] += q;
    var[k] += q * (1.0 - q);
    ++count[k];
  }
  for (int k = 0; k < kBuckets; ++k) {
    if (count[k] < 100) continue;
    EXPECT_LE(std::abs(wins[k] - expected[k]), 4.0 * std::sqrt(var[k])) << "bucket " << k;
  }
}

TEST(GenCandidatePools, ShapeAndTiers) {
  const LatentReward latent(LatentRewardSpec::linear(kWeights), default_schema());
  EXPECT_TRUE(gen_candidate_pools(latent, 0, 3, 1).empty());
  EXPECT_THROW(gen_candidate_pools(latent, 2, 0, 1), DataError);
  const auto pools = gen_candidate_pools(latent, 4, 3, 1);
  ASSERT_EQ(pools.size(), 4u);
  for (const auto& pool : pools) {
    ASSERT_EQ(pool.candidates.size(), 9u);
    int per[3] = {0, 0, 0};
    for (const auto& c : pool.candidates) {
      ++per[tier_rank(c.tier)];
      EXPECT_EQ(c.sft_logprob, 0.0);
    }
    EXPECT_EQ(per[0], 3);
    EXPECT_EQ(per[1], 3);
    EXPECT_EQ(per[2], 3);
    validate_pool(pool, default_schema());
  }
}

// Property: a higher tier never holds a lower latent reward than a lower tier.
TEST(GenCandidatePools, TiersFollowLatentOrder) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    Rng rng(seed);
    const auto spec = seed % 2 ? LatentRewardSpec::linear(kWeights)
                               : LatentRewardSpec::random_mlp({8, 8}, seed);
    const LatentReward latent(spec, default_schema());
    const auto pools = gen_candidate_pools(latent, 3, 1 + rng.below(5), seed);
    for (const auto& pool : pools) {
      for (const auto& hi : pool.candidates) {
        for (const auto& lo : pool.candidates) {
          if (tier_rank(hi.tier) > tier_rank(lo.tier)) {
            EXPECT_GE(latent(hi.features), latent(lo.features));
          }
        }
      }
    }
  }
}

TEST(LatentSpecFile, RoundTrip) {
  testing::TempDir dir;
  const auto mlp = LatentRewardSpec::random_mlp({16, 4}, 11, 0.25);
  save_latent_spec(dir / "m.json", mlp);
  const auto back = load_latent_spec(dir / "m.json");
  EXPECT_EQ(back.kind, LatentRewardSpec::Kind::kRandomMlp);
  EXPECT_EQ(back.hidden_dims, mlp.hidden_dims);
  EXPECT_EQ(back.mlp_seed, 11u);
  EXPECT_EQ(back.noise_temperature, 0.25);
  save_latent_spec(dir / "l.json", LatentRewardSpec::linear(kWeights));
  EXPECT_EQ(load_latent_spec(dir / "l.json").weights, kWeights);
}

}  // namespace
}  // namespace dkrm
