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

#include <filesystem>
#include <optional>
#include <string>

#include "dkrm/policy.hpp"
#include "dkrm/reward_model.hpp"
#include "dkrm/train.hpp"

namespace dkrm {

// Checkpoints are single JSON documents:
//   {"format": "dkrm-checkpoint", "format_version": 1, "kind": "reward"|"policy",
//    "layer_dims": [...], "activation": "tanh"|"relu", "parameters": [...],
//    "schema": {"features": [...]}, "schema_fingerprint": "<sha256>",
//    "train_config": {...}}
// Policy checkpoints add "beta", "objective_variant" and "epsilon".
// Parameters are written with round-trip precision.

struct RewardCheckpoint {
  RewardModel model;
  std::optional<TrainConfig> train_config;
};

struct PolicyCheckpoint {
  PolicySelector policy;
  PolicyOptConfig config;
};

void save_reward_checkpoint(const std::filesystem::path& path, const RewardModel& model,
                            const std::optional<TrainConfig>& config);
RewardCheckpoint load_reward_checkpoint(const std::filesystem::path& path);

void save_policy_checkpoint(const std::filesystem::path& path, const PolicySelector& policy,
                            const PolicyOptConfig& config);
PolicyCheckpoint load_policy_checkpoint(const std::filesystem::path& path);

// String forms used by the files above and by run manifests.
std::string train_config_json(const TrainConfig& config);
std::string policy_config_json(const PolicyOptConfig& config);

}  // namespace dkrm
