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

#include "dkrm/reward_model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dkrm/error.hpp"

namespace dkrm {

RewardModel::RewardModel(FeatureSchema s, Mlp n) : schema(std::move(s)), net(std::move(n)) {
  if (net.input_dim() != schema.size()) {
    throw DataError("dimension mismatch: network input " + std::to_string(net.input_dim()) +
                    " vs schema size " + std::to_string(schema.size()));
  }
}

namespace {
std::vector<std::size_t> full_dims(const FeatureSchema& schema,
                                   const std::vector<std::size_t>& hidden) {
  std::vector<std::size_t> dims{schema.size()};
  dims.insert(dims.end(), hidden.begin(), hidden.end());
  dims.push_back(1);
  return dims;
}
}  // namespace

RewardModel RewardModel::glorot(const FeatureSchema& schema, std::vector<std::size_t> hidden,
                                Activation act, Rng& rng) {
  return RewardModel(schema, Mlp::glorot_uniform(full_dims(schema, hidden), act, rng));
}

RewardModel RewardModel::zeros(const FeatureSchema& schema, std::vector<std::size_t> hidden,
                               Activation act) {
  return RewardModel(schema, Mlp(full_dims(schema, hidden), act));
}

double RewardModel::score(const FeatureVector& raw) const {
  RewardEvaluator eval(*this);
  return eval(raw.span());
}

RewardEvaluator::RewardEvaluator(const RewardModel& model)
    : model_(&model), ws_(model.net), normalized_(model.schema.size(), 0.0) {}

double RewardEvaluator::operator()(std::span<const double> raw) {
  if (raw.size() != model_->schema.size()) {
    throw DataError("dimension mismatch: expected " + std::to_string(model_->schema.size()) +
                    " features, got " + std::to_string(raw.size()));
  }
  model_->schema.normalize(raw, normalized_);
  return model_->net.forward(normalized_, ws_);
}

void RewardEvaluator::backward(double dout, std::span<double> grad) {
  model_->net.backward(ws_, dout, grad);
}

double softplus(double x) {
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

void PairInputs::push_back(std::span<const double> w, std::span<const double> l) {
  winners.insert(winners.end(), w.begin(), w.end());
  losers.insert(losers.end(), l.begin(), l.end());
}

PairInputs make_pair_inputs(std::span<const PreferencePair> pairs, const FeatureSchema& schema) {
  PairInputs out;
  out.dim = schema.size();
  out.winners.resize(pairs.size() * out.dim);
  out.losers.resize(pairs.size() * out.dim);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const auto& p = pairs[i];
    if (p.winner_features.size() != out.dim || p.loser_features.size() != out.dim) {
      throw DataError("pair " + std::to_string(i) + ": feature length mismatch with schema");
    }
    schema.normalize(p.winner_features.span(),
                     std::span<double>(out.winners).subspan(i * out.dim, out.dim));
    schema.normalize(p.loser_features.span(),
                     std::span<double>(out.losers).subspan(i * out.dim, out.dim));
  }
  return out;
}

namespace {

template <typename Fn>
void for_rows(const PairInputs& data, std::span<const std::size_t> rows, Fn fn) {
  if (rows.empty()) {
    for (std::size_t i = 0; i < data.size(); ++i) fn(i);
  } else {
    for (auto i : rows) fn(i);
  }
}

void check_dim(const Mlp& net, const PairInputs& data) {
  if (net.input_dim() != data.dim) {
    throw DataError("dimension mismatch: network expects " + std::to_string(net.input_dim()) +
                    " inputs, data has " + std::to_string(data.dim));
  }
}

}  // namespace

double pair_loss(const Mlp& net, const PairInputs& data, std::span<const std::size_t> rows) {
  check_dim(net, data);
  const std::size_t n = rows.empty() ? data.size() : rows.size();
  if (n == 0) throw DataError("empty batch");
  MlpWorkspace ws(net);
  double total = 0.0;
  for_rows(data, rows, [&](std::size_t i) {
    const double d = net.forward(data.winner(i), ws) - net.forward(data.loser(i), ws);
    total += softplus(-d);
  });
  return total / static_cast<double>(n);
}

double pair_loss_grad(const Mlp& net, const PairInputs& data, std::span<const std::size_t> rows,
                      std::span<double> grad) {
  check_dim(net, data);
  const std::size_t n = rows.empty() ? data.size() : rows.size();
  if (n == 0) throw DataError("empty batch");
  std::fill(grad.begin(), grad.end(), 0.0);
  MlpWorkspace ws(net);
  const double inv_n = 1.0 / static_cast<double>(n);
  double total = 0.0;
  for_rows(data, rows, [&](std::size_t i) {
    const double rw = net.forward(data.winner(i), ws);
    // Backward consumes the stored activations, so the winner pass is
    // replayed after the loser's output is known.
    const double rl = net.forward(data.loser(i), ws);
    const double d = rw - rl;
    total += softplus(-d);
    const double g = -sigmoid(-d) * inv_n;  // dL/dr_w; dL/dr_l = -g
    net.backward(ws, -g, grad);
    net.forward(data.winner(i), ws);
    net.backward(ws, g, grad);
  });
  return total * inv_n;
}

double pair_accuracy(const Mlp& net, const PairInputs& data) {
  check_dim(net, data);
  if (data.size() == 0) throw DataError("empty dataset");
  MlpWorkspace ws(net);
  double hits = 0.0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const double rw = net.forward(data.winner(i), ws);
    const double rl = net.forward(data.loser(i), ws);
    if (rw > rl) {
      hits += 1.0;
    } else if (rw == rl) {
      hits += 0.5;
    }
  }
  return hits / static_cast<double>(data.size());
}

double elo_loss(const RewardModel& model, std::span<const PreferencePair> batch) {
  if (batch.empty()) throw DataError("empty batch");
  return pair_loss(model.net, make_pair_inputs(batch, model.schema));
}

LossAndGrad elo_loss_grad(const RewardModel& model, std::span<const PreferencePair> batch) {
  if (batch.empty()) throw DataError("empty batch");
  LossAndGrad out;
  out.grad.assign(model.net.parameter_count(), 0.0);
  out.loss = pair_loss_grad(model.net, make_pair_inputs(batch, model.schema), {}, out.grad);
  return out;
}

double preference_accuracy(const RewardModel& model, std::span<const PreferencePair> dataset) {
  if (dataset.empty()) throw DataError("empty dataset");
  return pair_accuracy(model.net, make_pair_inputs(dataset, model.schema));
}

}  // namespace dkrm
