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

#include "dkrm/baselines.hpp"

#include <algorithm>
#include <numeric>

#include "dkrm/error.hpp"
#include "dkrm/rng.hpp"

namespace dkrm {

double naive_mean_reward(const FeatureVector& features, const FeatureSchema& schema) {
  if (auto r = validate_feature_vector(features, schema); !r.ok()) {
    throw DataError("naive mean: " + r.to_string());
  }
  double s = 0.0;
  for (double v : features.values) s += v;
  return s / static_cast<double>(features.size());
}

std::vector<PreferencePair> derive_implicit_pairs(std::span<const CandidatePool> pools,
                                                  const ImplicitPairPolicy& policy) {
  if (policy.max_pairs_per_pool && *policy.max_pairs_per_pool == 0) {
    throw DataError("max_pairs_per_pool must be positive");
  }
  static constexpr Tier kOrder[] = {Tier::kGood, Tier::kSBad, Tier::kVBad};
  Rng rng(policy.seed);
  std::vector<PreferencePair> out;
  for (const auto& pool : pools) {
    std::vector<PreferencePair> local;
    for (std::size_t hi = 0; hi < 3; ++hi) {
      for (std::size_t lo = hi + 1; lo < 3; ++lo) {
        if (policy.pairing == ImplicitPairPolicy::Pairing::kAdjacentTierOnly && lo != hi + 1) {
          continue;
        }
        for (const auto& w : pool.candidates) {
          if (w.tier != kOrder[hi]) continue;
          for (const auto& l : pool.candidates) {
            if (l.tier != kOrder[lo]) continue;
            PreferencePair p;
            p.context_id = pool.context_id;
            p.winner = {w.candidate_id, w.text};
            p.loser = {l.candidate_id, l.text};
            p.winner_features = w.features;
            p.loser_features = l.features;
            p.annotator_id = "implicit";
            local.push_back(std::move(p));
          }
        }
      }
    }
    if (policy.max_pairs_per_pool && local.size() > *policy.max_pairs_per_pool) {
      std::vector<std::size_t> idx(local.size());
      std::iota(idx.begin(), idx.end(), std::size_t{0});
      rng.shuffle(std::span<std::size_t>(idx));
      idx.resize(*policy.max_pairs_per_pool);
      std::sort(idx.begin(), idx.end());
      for (auto i : idx) out.push_back(std::move(local[i]));
    } else {
      for (auto& p : local) out.push_back(std::move(p));
    }
  }
  return out;
}

}  // namespace dkrm
