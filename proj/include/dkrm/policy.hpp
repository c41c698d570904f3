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
#include <span>
#include <string>
#include <vector>

#include "dkrm/mlp.hpp"
#include "dkrm/records.hpp"
#include "dkrm/reward_model.hpp"

namespace dkrm {

/// Candidate-selection policy over an offline pool: a network maps each
/// candidate's normalized features to a logit and the per-pool policy is the
/// softmax of those logits.
struct PolicySelector {
  FeatureSchema schema;
  Mlp net;

  PolicySelector(FeatureSchema s, Mlp n);

  /// Glorot hidden layers and a zero output layer, so the initial policy is
  /// uniform over every pool.
  static PolicySelector uniform_init(const FeatureSchema& schema,
                                     std::vector<std::size_t> hidden, Activation act,
                                     Rng& rng);
};

enum class ObjectiveVariant { kExactExpectation, kClippedRatio };

std::string_view variant_name(ObjectiveVariant v);
ObjectiveVariant parse_variant(std::string_view name);

struct PolicyOptConfig {
  double beta = 0.0;
  double learning_rate = 0.01;
  std::size_t epochs = 1000;
  std::uint64_t seed = 0;
  ObjectiveVariant variant = ObjectiveVariant::kExactExpectation;
  double epsilon = 0.2;             // clipped ratio only
  std::size_t steps_per_epoch = 1;  // updates per old-policy snapshot
  std::size_t pool_batch_size = 0;  // 0 = all pools per update
  std::vector<std::size_t> hidden_dims{16, 16};
  Activation activation = Activation::kTanh;

  void validate() const;
};

/// Softmax helpers over a logit vector.
std::vector<double> softmax(std::span<const double> logits);
std::vector<double> log_softmax(std::span<const double> logits);

std::vector<double> policy_logits(const PolicySelector& policy, const CandidatePool& pool);
std::vector<double> policy_distribution(const PolicySelector& policy, const CandidatePool& pool);
/// Reference policy: softmax of the pool's sft_logprob values.
std::vector<double> reference_distribution(const CandidatePool& pool);

/// L = -mean_pools sum_s pi(s) [ r(s) - beta (log pi(s) - log pi_ref(s)) ],
/// an exact expectation over each pool's candidates.
double policy_objective(const PolicySelector& policy, std::span<const CandidatePool> pools,
                        const RewardModel& reward, double beta);
/// Gradient of policy_objective w.r.t. the policy parameters.
LossAndGrad policy_objective_grad(const PolicySelector& policy,
                                  std::span<const CandidatePool> pools,
                                  const RewardModel& reward, double beta);

/// Clipped-ratio surrogate plus the exact KL penalty:
///   -mean_pools sum_s pi_old(s) min(rho A, clip(rho, 1-eps, 1+eps) A) + beta KL(pi || pi_ref)
/// with rho = pi / pi_old and A = r - (unweighted pool mean of r).
/// old_probs holds one distribution per pool.
LossAndGrad clipped_objective_grad(const PolicySelector& policy,
                                   std::span<const CandidatePool> pools,
                                   const RewardModel& reward,
                                   std::span<const std::vector<double>> old_probs,
                                   double epsilon, double beta);

struct PolicyMetrics {
  double objective = 0.0;          // policy_objective value
  double mean_reward = 0.0;        // mean over pools of E_pi[r]
  double mean_kl = 0.0;            // mean over pools of KL(pi || pi_ref)
  double mean_argmax_prob = 0.0;   // mean over pools of pi(argmax_s r(s))
  double min_argmax_prob = 0.0;
};

PolicyMetrics evaluate_policy(const PolicySelector& policy, std::span<const CandidatePool> pools,
                              const RewardModel& reward, double beta);

struct PolicyEpochStats {
  std::size_t epoch = 0;  // 1-based
  double objective = 0.0;
  double mean_reward = 0.0;
  double mean_kl = 0.0;
};

struct PolicyTrainReport {
  std::vector<PolicyEpochStats> epochs;
  double wall_seconds = 0.0;

  /// "epoch,objective,mean_reward,mean_kl"
  std::string to_csv() const;
};

struct PolicyTrainResult {
  PolicySelector policy;
  PolicyTrainReport report;
};

/// Adam (no weight decay) on the chosen objective. init_seed drives the
/// network initialization, config.seed the pool minibatch order.
PolicyTrainResult train_policy(std::span<const CandidatePool> pools, const RewardModel& reward,
                               const PolicyOptConfig& config, std::uint64_t init_seed);

}  // namespace dkrm
