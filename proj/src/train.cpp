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

#include "dkrm/train.hpp"

#include <chrono>
#include <cmath>
#include <numeric>
#include <sstream>

#include "dkrm/error.hpp"
#include "dkrm/optim.hpp"
#include "dkrm/rng.hpp"

namespace dkrm {

void TrainConfig::validate() const {
  if (batch_size == 0) throw DataError("batch_size must be positive");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw DataError("learning_rate must be positive");
  }
  if (!(weight_decay >= 0.0)) throw DataError("weight_decay must be non-negative");
  if (!(warmup_fraction >= 0.0 && warmup_fraction < 1.0)) {
    throw DataError("warmup_fraction must be in [0, 1)");
  }
  if (total_epochs == 0) throw DataError("total_epochs must be positive");
  if (!(holdout_fraction >= 0.0 && holdout_fraction < 1.0)) {
    throw DataError("holdout_fraction must be in [0, 1)");
  }
  for (auto h : hidden_dims) {
    if (h == 0) throw DataError("hidden layer widths must be positive");
  }
}

std::string TrainReport::to_csv() const {
  std::ostringstream os;
  os.precision(17);
  os << "epoch,train_loss,holdout_loss,holdout_acc\n";
  for (const auto& e : epochs) {
    os << e.epoch << ',' << e.train_loss << ',';
    if (e.holdout_loss) os << *e.holdout_loss;
    os << ',';
    if (e.holdout_accuracy) os << *e.holdout_accuracy;
    os << '\n';
  }
  return os.str();
}

PairTrainResult train_pairs(Mlp init, const PairInputs& train, const PairInputs& holdout,
                            const TrainConfig& config) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  const std::size_t n = train.size();
  if (n == 0) throw DataError("empty dataset");
  if (config.batch_size > n) {
    throw DataError("batch_size " + std::to_string(config.batch_size) +
                    " exceeds training split size " + std::to_string(n));
  }

  Mlp net = std::move(init);
  const std::size_t steps_per_epoch = (n + config.batch_size - 1) / config.batch_size;
  const std::size_t total_steps = steps_per_epoch * config.total_epochs;
  const auto warmup = static_cast<std::size_t>(
      std::floor(config.warmup_fraction * static_cast<double>(total_steps)));
  WarmupCosineSchedule schedule(config.learning_rate, total_steps, warmup);
  AdamW opt(net.parameter_count(), {.weight_decay = config.weight_decay});

  // Separate stream from the dataset split so the split does not depend on
  // how many epochs are run.
  Rng rng(config.seed ^ 0x9E3779B97F4A7C15ULL);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<double> grad(net.parameter_count(), 0.0);

  TrainReport report;
  report.train_size = n;
  report.holdout_size = holdout.size();
  std::size_t step = 0;
  for (std::size_t epoch = 1; epoch <= config.total_epochs; ++epoch) {
    rng.shuffle(std::span<std::size_t>(order));
    for (std::size_t b = 0; b < n; b += config.batch_size) {
      const std::size_t e = std::min(n, b + config.batch_size);
      const std::span<const std::size_t> rows(order.data() + b, e - b);
      const double loss = pair_loss_grad(net, train, rows, grad);
      if (!std::isfinite(loss)) {
        throw NumericalError("divergence: non-finite loss at step " + std::to_string(step));
      }
      opt.step(net.parameters(), grad, schedule.at(step));
      ++step;
    }
    if (!net.all_finite()) {
      throw NumericalError("divergence: non-finite parameters after step " +
                           std::to_string(step - 1));
    }
    EpochStats stats;
    stats.epoch = epoch;
    stats.train_loss = pair_loss(net, train);
    if (holdout.size() > 0) {
      stats.holdout_loss = pair_loss(net, holdout);
      stats.holdout_accuracy = pair_accuracy(net, holdout);
    }
    report.epochs.push_back(stats);
  }
  report.steps = step;
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {std::move(net), std::move(report)};
}

RewardTrainResult train_reward(std::span<const PreferencePair> dataset,
                               const FeatureSchema& schema, const TrainConfig& config,
                               std::uint64_t init_seed) {
  config.validate();
  if (dataset.empty()) throw DataError("empty dataset");
  std::vector<std::size_t> order(dataset.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  Rng split_rng(config.seed);
  split_rng.shuffle(std::span<std::size_t>(order));

  const auto n_hold = static_cast<std::size_t>(
      std::floor(config.holdout_fraction * static_cast<double>(dataset.size())));
  const std::size_t n_train = dataset.size() - n_hold;
  std::vector<PreferencePair> train_pairs_v, hold_pairs_v;
  train_pairs_v.reserve(n_train);
  hold_pairs_v.reserve(n_hold);
  for (std::size_t i = 0; i < order.size(); ++i) {
    (i < n_train ? train_pairs_v : hold_pairs_v).push_back(dataset[order[i]]);
  }

  Rng init_rng(init_seed);
  RewardModel model = RewardModel::glorot(schema, config.hidden_dims, config.activation, init_rng);
  auto train_in = make_pair_inputs(train_pairs_v, schema);
  auto hold_in = make_pair_inputs(hold_pairs_v, schema);
  auto result = train_pairs(std::move(model.net), train_in, hold_in, config);
  return {RewardModel(schema, std::move(result.net)), std::move(result.report)};
}

}  // namespace dkrm
