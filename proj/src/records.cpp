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

#include "dkrm/records.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>

#include "dkrm/error.hpp"

namespace dkrm {

int tier_rank(Tier t) {
  switch (t) {
    case Tier::kGood: return 2;
    case Tier::kSBad: return 1;
    case Tier::kVBad: return 0;
  }
  return 0;
}

std::string_view tier_name(Tier t) {
  switch (t) {
    case Tier::kGood: return "GOOD";
    case Tier::kSBad: return "SBAD";
    case Tier::kVBad: return "VBAD";
  }
  return "?";
}

Tier parse_tier(std::string_view label) {
  std::string up(label);
  std::transform(up.begin(), up.end(), up.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  if (up == "GOOD") return Tier::kGood;
  if (up == "SBAD") return Tier::kSBad;
  if (up == "VBAD") return Tier::kVBad;
  throw DataError("unknown tier label '" + std::string(label) + "'");
}

void validate_pair(const PreferencePair& pair, const FeatureSchema& schema) {
  if (pair.context_id.empty()) throw DataError("empty context_id");
  if (pair.winner.candidate_id.empty() || pair.loser.candidate_id.empty()) {
    throw DataError("empty candidate_id");
  }
  if (pair.winner.candidate_id == pair.loser.candidate_id) {
    throw DataError("winner and loser are the same candidate '" +
                    pair.winner.candidate_id + "'");
  }
  if (auto r = validate_feature_vector(pair.winner_features, schema); !r.ok()) {
    throw DataError("winner_features: " + r.to_string());
  }
  if (auto r = validate_feature_vector(pair.loser_features, schema); !r.ok()) {
    throw DataError("loser_features: " + r.to_string());
  }
}

void validate_pool(const CandidatePool& pool, const FeatureSchema& schema) {
  if (pool.context_id.empty()) throw DataError("empty context_id");
  if (pool.candidates.size() < 2) {
    throw DataError("pool too small: context '" + pool.context_id + "' has " +
                    std::to_string(pool.candidates.size()) + " candidate(s)");
  }
  std::set<std::string_view> ids;
  for (const auto& c : pool.candidates) {
    if (c.candidate_id.empty()) throw DataError("empty candidate_id");
    if (!ids.insert(c.candidate_id).second) {
      throw DataError("duplicate candidate_id '" + c.candidate_id + "'");
    }
    if (!std::isfinite(c.sft_logprob)) {
      throw DataError("candidate '" + c.candidate_id + "': non-finite sft_logprob");
    }
    if (auto r = validate_feature_vector(c.features, schema); !r.ok()) {
      throw DataError("candidate '" + c.candidate_id + "' features: " + r.to_string());
    }
  }
}

}  // namespace dkrm
