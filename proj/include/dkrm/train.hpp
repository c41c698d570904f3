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
#include <string>
#include <vector>

#include "dkrm/mlp.hpp"
#include "dkrm/records.hpp"
#include "dkrm/reward_model.hpp"

namespace dkrm {

struct TrainConfig {
  std::size_t batch_size = 128;
  double learning_rate = 0.005;
  double weight_decay = 0.05;
  double warmup_fraction = 0.1;
  std::size_t total_epochs = 60;
  std::uint64_t seed = 0;
  double holdout_fraction = 0.1;
  std::vector<std::size_t> hidden_dims{16, 16};
  Activation activation = Activation::kTanh;

  /// Throws DataError on out-of-range values (batch size vs. split size is
  /// checked at training time).
  void validate() const;
};

struct EpochStats {
  std::size_t epoch = 0;  // 1-based
  double train_loss = 0.0;
  std::optional<double> holdout_loss;
  std::optional<double> holdout_accuracy;
};

struct TrainReport {
  std::vector<EpochStats> epochs;
  std::size_t train_size = 0;
  std::size_t holdout_size = 0;
  std::size_t steps = 0;
  double wall_seconds = 0.0;

  /// "epoch,train_loss,holdout_loss,holdout_acc" with one row per epoch.
  std::string to_csv() const;
};

struct PairTrainResult {
  Mlp net;
  TrainReport report;
};

/// Minibatch AdamW on the Elo loss with warmup + cosine decay. Batches are
/// drawn from a per-epoch Fisher-Yates shuffle seeded by config.seed.
/// Throws NumericalError naming the step when a batch loss is non-finite.
PairTrainResult train_pairs(Mlp init, const PairInputs& train, const PairInputs& holdout,
                            const TrainConfig& config);

struct RewardTrainResult {
  RewardModel model;
  TrainReport report;
};

/// Shuffles the dataset with config.seed, holds out the trailing
/// floor(holdout_fraction * n) pairs, initializes with Glorot(init_seed) and
/// trains. Bit-reproducible for identical inputs on one kernel ISA.
RewardTrainResult train_reward(std::span<const PreferencePair> dataset,
                               const FeatureSchema& schema, const TrainConfig& config,
                               std::uint64_t init_seed);

}  // namespace dkrm
