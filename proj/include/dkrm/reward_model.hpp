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

#include <cstddef>
#include <span>
#include <vector>

#include "dkrm/mlp.hpp"
#include "dkrm/records.hpp"
#include "dkrm/schema.hpp"

namespace dkrm {

/// Feature-based reward model: raw feature scores are mapped affinely onto
/// [0, 1] by the schema bounds and fed to a scalar-output network.
struct RewardModel {
  FeatureSchema schema;
  Mlp net;

  /// Throws DataError unless the first layer width equals the schema size.
  RewardModel(FeatureSchema s, Mlp n);

  /// Default shape is {schema.size(), 16, 16, 1}.
  static RewardModel glorot(const FeatureSchema& schema, std::vector<std::size_t> hidden,
                            Activation act, Rng& rng);
  static RewardModel zeros(const FeatureSchema& schema, std::vector<std::size_t> hidden,
                           Activation act);

  /// Allocating convenience; use RewardEvaluator in loops.
  double score(const FeatureVector& raw) const;
};

/// Reusable scratch for scoring many vectors with one model (one per thread).
class RewardEvaluator {
 public:
  explicit RewardEvaluator(const RewardModel& model);

  double operator()(std::span<const double> raw);
  /// Accumulates dout * d(last score)/d(params) into grad.
  void backward(double dout, std::span<double> grad);

 private:
  const RewardModel* model_;
  MlpWorkspace ws_;
  std::vector<double> normalized_;
};

// --- Bradley-Terry / Elo preference loss -----------------------------------
//
// Per pair the loss is -log sigmoid(r_w - r_l); the batch loss is the mean.

/// Numerically stable log(1 + exp(x)).
double softplus(double x);
/// Numerically stable 1 / (1 + exp(-x)).
double sigmoid(double x);

/// Winner/loser inputs already in network space (normalized or lifted),
/// stored row-major with `dim` columns.
struct PairInputs {
  std::size_t dim = 0;
  std::vector<double> winners;
  std::vector<double> losers;

  std::size_t size() const { return dim == 0 ? 0 : winners.size() / dim; }
  std::span<const double> winner(std::size_t i) const {
    return std::span<const double>(winners).subspan(i * dim, dim);
  }
  std::span<const double> loser(std::size_t i) const {
    return std::span<const double>(losers).subspan(i * dim, dim);
  }
  void push_back(std::span<const double> w, std::span<const double> l);
};

/// Normalizes each pair's features by the schema bounds.
PairInputs make_pair_inputs(std::span<const PreferencePair> pairs, const FeatureSchema& schema);

/// Mean loss over the selected rows (all rows when `rows` is empty).
double pair_loss(const Mlp& net, const PairInputs& data, std::span<const std::size_t> rows = {});
/// Overwrites grad with the gradient of pair_loss and returns the loss.
double pair_loss_grad(const Mlp& net, const PairInputs& data, std::span<const std::size_t> rows,
                      std::span<double> grad);
/// Fraction of rows with r_w > r_l; exact ties count one half.
double pair_accuracy(const Mlp& net, const PairInputs& data);

struct LossAndGrad {
  double loss = 0.0;
  std::vector<double> grad;  // same layout as Mlp::parameters()
};

// Each throws DataError("empty batch") / DataError("empty dataset") on empty
// input and DataError on feature/schema mismatch.
double elo_loss(const RewardModel& model, std::span<const PreferencePair> batch);
LossAndGrad elo_loss_grad(const RewardModel& model, std::span<const PreferencePair> batch);
double preference_accuracy(const RewardModel& model, std::span<const PreferencePair> dataset);

}  // namespace dkrm
