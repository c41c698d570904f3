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

#include <set>

#include "dkrm/baselines.hpp"
#include "dkrm/error.hpp"
#include "test_support.hpp"

namespace dkrm {
namespace {

using testing::default_schema;

TEST(NaiveMeanReward, Examples) {
  EXPECT_EQ(naive_mean_reward(FeatureVector{5, 5, 5, 5, 5, 5, 5}, default_schema()), 5.0);
  EXPECT_EQ(naive_mean_reward(FeatureVector{0, 0, 0, 0, 0, 0, 0}, default_schema()), 0.0);
  // Hand-summed: 28.27 / 7.
  const double m =
      naive_mean_reward(FeatureVector{3.69, 4.02, 3.92, 4.05, 4.10, 3.99, 4.50}, default_schema());
  EXPECT_NEAR(m, 4.0386, 5e-5);
  EXPECT_THROW(naive_mean_reward(FeatureVector{1, 2}, default_schema()), DataError);
}

// Property: permutation-invariant over features and affine in each one.
TEST(NaiveMeanReward, PermutationInvariantAndAffine) {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Rng rng(seed);
    auto v = testing::random_features(default_schema(), rng);
    const double base = naive_mean_reward(v, default_schema());
    auto perm = v;
    rng.shuffle(std::span<double>(perm.values));
    EXPECT_NEAR(naive_mean_reward(perm, default_schema()), base, 1e-14);
    const std::size_t i = rng.below(7);
    const double x0 = rng.uniform(0, 5), x1 = rng.uniform(0, 5);
    auto a = v, b = v, mid = v;
    a[i] = x0;
    b[i] = x1;
    mid[i] = 0.5 * (x0 + x1);
    EXPECT_NEAR(naive_mean_reward(mid, default_schema()),
                0.5 * (naive_mean_reward(a, default_schema()) + naive_mean_reward(b, default_schema())),
                1e-14);
  }
}

CandidatePool pool_333(std::uint64_t seed) {
  Rng rng(seed);
  return testing::random_pool(default_schema(), rng, 3, "p");
}

TEST(DeriveImplicitPairs, CombinatorialCounts) {
  const std::vector<CandidatePool> pools{pool_333(1)};
  EXPECT_EQ(derive_implicit_pairs(pools, {}).size(), 27u);
  ImplicitPairPolicy adj;
  adj.pairing = ImplicitPairPolicy::Pairing::kAdjacentTierOnly;
  EXPECT_EQ(derive_implicit_pairs(pools, adj).size(), 18u);

  auto good_only = pools;
  for (auto& c : good_only[0].candidates) c.tier = Tier::kGood;
  EXPECT_TRUE(derive_implicit_pairs(good_only, {}).empty());
}

TEST(DeriveImplicitPairs, OrderAndAnnotator) {
  const std::vector<CandidatePool> pools{pool_333(2)};
  const auto pairs = derive_implicit_pairs(pools, {});
  ASSERT_EQ(pairs.size(), 27u);
  // GOOD/SBAD block, then GOOD/VBAD, then SBAD/VBAD.
  EXPECT_EQ(pairs[0].winner.candidate_id, "p-c0");
  EXPECT_EQ(pairs[0].loser.candidate_id, "p-c3");
  EXPECT_EQ(pairs[9].loser.candidate_id, "p-c6");
  EXPECT_EQ(pairs[18].winner.candidate_id, "p-c3");
  for (const auto& p : pairs) {
    EXPECT_EQ(p.annotator_id, "implicit");
    EXPECT_EQ(p.context_id, "p");
  }
}

TEST(DeriveImplicitPairs, CapIsSeededSubset) {
  const std::vector<CandidatePool> pools{pool_333(3), pool_333(4)};
  ImplicitPairPolicy cap;
  cap.max_pairs_per_pool = 5;
  cap.seed = 7;
  const auto a = derive_implicit_pairs(pools, cap);
  EXPECT_EQ(a.size(), 10u);
  EXPECT_EQ(a, derive_implicit_pairs(pools, cap));
  cap.seed = 8;
  EXPECT_NE(a, derive_implicit_pairs(pools, cap));
  cap.max_pairs_per_pool = 100;
  EXPECT_EQ(derive_implicit_pairs(pools, cap), derive_implicit_pairs(pools, {}));
  cap.max_pairs_per_pool = 0;
  EXPECT_THROW(derive_implicit_pairs(pools, cap), DataError);
}

// Property: winners always come from a strictly higher tier, and every
// emitted pair is distinct.
TEST(DeriveImplicitPairs, WinnerTierStrictlyHigher) {
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    Rng rng(seed);
    std::vector<CandidatePool> pools;
    for (int i = 0; i < 3; ++i) {
      auto pool = testing::random_pool(default_schema(), rng, 1 + rng.below(4), "p" + std::to_string(i));
      for (auto& c : pool.candidates) c.tier = static_cast<Tier>(rng.below(3));
      pools.push_back(std::move(pool));
    }
    ImplicitPairPolicy policy;
    policy.pairing = rng.below(2) ? ImplicitPairPolicy::Pairing::kAllCrossTier
                                  : ImplicitPairPolicy::Pairing::kAdjacentTierOnly;
    for (const auto& p : derive_implicit_pairs(pools, policy)) {
      Tier wt{}, lt{};
      for (const auto& pool : pools) {
        if (pool.context_id != p.context_id) continue;
        for (const auto& c : pool.candidates) {
          if (c.candidate_id == p.winner.candidate_id) wt = c.tier;
          if (c.candidate_id == p.loser.candidate_id) lt = c.tier;
        }
      }
      EXPECT_GT(tier_rank(wt), tier_rank(lt));
      if (policy.pairing == ImplicitPairPolicy::Pairing::kAdjacentTierOnly) {
        EXPECT_EQ(tier_rank(wt) - tier_rank(lt), 1);
      }
    }
  }
}

}  // namespace
}  // namespace dkrm
