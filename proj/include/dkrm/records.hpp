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

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dkrm/schema.hpp"

namespace dkrm {

/// Generation quality of an offline candidate. Ordered best first.
enum class Tier { kGood, kSBad, kVBad };

/// Higher is better: GOOD = 2, SBAD = 1, VBAD = 0.
int tier_rank(Tier t);
std::string_view tier_name(Tier t);
/// Case-insensitive; throws DataError on unknown labels.
Tier parse_tier(std::string_view label);

struct CandidateRef {
  std::string candidate_id;
  std::optional<std::string> text;  // provenance only

  bool operator==(const CandidateRef&) const = default;
};

struct PreferencePair {
  std::string context_id;
  CandidateRef winner;
  CandidateRef loser;
  FeatureVector winner_features;
  FeatureVector loser_features;
  std::optional<std::string> annotator_id;

  bool operator==(const PreferencePair&) const = default;
};

struct Candidate {
  std::string candidate_id;
  Tier tier = Tier::kGood;
  FeatureVector features;
  double sft_logprob = 0.0;
  std::optional<std::string> text;

  bool operator==(const Candidate&) const = default;
};

struct CandidatePool {
  std::string context_id;
  std::vector<Candidate> candidates;

  bool operator==(const CandidatePool&) const = default;
};

// Both throw DataError describing the first problem found.
void validate_pair(const PreferencePair& pair, const FeatureSchema& schema);
void validate_pool(const CandidatePool& pool, const FeatureSchema& schema);

}  // namespace dkrm
