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
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "dkrm/mlp.hpp"
#include "dkrm/records.hpp"
#include "dkrm/schema.hpp"

namespace dkrm {

/// Ground-truth reward used to simulate annotators.
struct LatentRewardSpec {
  enum class Kind { kLinear, kRandomMlp };

  Kind kind = Kind::kLinear;
  std::vector<double> weights;             // kLinear, applied to raw features
  std::vector<std::size_t> hidden_dims;    // kRandomMlp
  std::uint64_t mlp_seed = 0;              // kRandomMlp
  double noise_temperature = 0.0;          // 0 = noiseless labels

  static LatentRewardSpec linear(std::vector<double> w, double temperature = 0.0);
  static LatentRewardSpec random_mlp(std::vector<std::size_t> hidden, std::uint64_t seed,
                                     double temperature = 0.0);
};

/// Evaluates a latent spec. The random MLP variant is a tanh network over
/// schema-normalized features with Glorot weights drawn from mlp_seed.
class LatentReward {
 public:
  LatentReward(LatentRewardSpec spec, const FeatureSchema& schema);

  double operator()(std::span<const double> raw) const;
  double operator()(const FeatureVector& v) const { return (*this)(v.span()); }

  const LatentRewardSpec& spec() const { return spec_; }
  const FeatureSchema& schema() const { return schema_; }
  /// Present for kRandomMlp.
  const std::optional<Mlp>& network() const { return net_; }

 private:
  LatentRewardSpec spec_;
  FeatureSchema schema_;
  std::optional<Mlp> net_;
};

double latent_reward(const LatentRewardSpec& spec, const FeatureSchema& schema,
                     const FeatureVector& features);

/// Uniform feature vector within the schema bounds.
FeatureVector sample_features(const FeatureSchema& schema, Rng& rng);

/// n pairs of uniformly drawn candidates. With temperature t > 0 the first
/// candidate wins with probability sigmoid((r_a - r_b) / t); with t = 0 the
/// higher latent reward wins (the first one on exact ties).
std::vector<PreferencePair> sample_preferences(const LatentReward& latent, std::size_t n,
                                               std::uint64_t seed);

/// Pools of 3 * candidates_per_tier candidates; tiers are assigned by
/// within-pool latent-reward terciles (top third GOOD). sft_logprob = 0.
std::vector<CandidatePool> gen_candidate_pools(const LatentReward& latent,
                                               std::size_t pool_count,
                                               std::size_t candidates_per_tier,
                                               std::uint64_t seed);

// Sidecar recording the latent spec next to generated data.
void save_latent_spec(const std::filesystem::path& path, const LatentRewardSpec& spec);
LatentRewardSpec load_latent_spec(const std::filesystem::path& path);

}  // namespace dkrm
