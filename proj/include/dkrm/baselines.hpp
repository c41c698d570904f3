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
#include <optional>
#include <span>
#include <vector>

#include "dkrm/records.hpp"
#include "dkrm/schema.hpp"

namespace dkrm {

/// Arithmetic mean of the raw feature scores.
double naive_mean_reward(const FeatureVector& features, const FeatureSchema& schema);

/// How implicit preferences are read off tiered pools (GOOD > SBAD > VBAD).
struct ImplicitPairPolicy {
  enum class Pairing { kAllCrossTier, kAdjacentTierOnly };

  Pairing pairing = Pairing::kAllCrossTier;
  std::optional<std::size_t> max_pairs_per_pool;
  std::uint64_t seed = 0;
};

/// Emits one pair per permitted (higher tier, lower tier) candidate
/// combination, never within a tier, with annotator_id "implicit". Pairs come
/// out grouped by tier combination (GOOD/SBAD, GOOD/VBAD, SBAD/VBAD) in
/// candidate order. When max_pairs_per_pool caps a pool, a seeded subset is
/// kept in that same order.
std::vector<PreferencePair> derive_implicit_pairs(std::span<const CandidatePool> pools,
                                                  const ImplicitPairPolicy& policy);

}  // namespace dkrm
